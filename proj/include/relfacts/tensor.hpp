#ifndef RELFACTS_TENSOR_HPP
#define RELFACTS_TENSOR_HPP

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace relfacts {

using Complex = std::complex<double>;

// Tolerance used by type invariants (Hermiticity, idempotence, norms).
inline constexpr double kInvariantTol = 1e-10;
// Default tolerance for merging near-equal eigenvalues into one group.
inline constexpr double kMergeTol = 1e-8;
// Operators larger than this many entries are refused.
inline constexpr std::size_t kMaxEntries = std::size_t{1} << 20;

/// Dense row-major complex matrix. Constructors reject non-finite entries;
/// element mutation through at() is unchecked.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);  // zero-filled
    CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static CMatrix identity(std::size_t n);
    static CMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Complex& at(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Complex& at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<const Complex> entries() const { return entries_; }

    CMatrix operator+(const CMatrix& other) const;
    CMatrix operator-(const CMatrix& other) const;
    CMatrix operator*(const CMatrix& other) const;
    CMatrix scaled(Complex factor) const;

    Complex trace() const;
    double max_abs() const;  // largest entry magnitude
    bool is_hermitian(double tol) const;
    bool is_square() const { return rows_ == cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

/// Dense complex vector; amplitudes are dimensionless. Normalization is not
/// an invariant here: operations that need it check it themselves.
class CVector {
public:
    CVector() = default;
    explicit CVector(std::size_t dim);  // zero-filled
    explicit CVector(std::vector<Complex> entries);

    static CVector basis(std::size_t dim, std::size_t index);

    std::size_t dim() const { return entries_.size(); }
    Complex& at(std::size_t i) { return entries_[i]; }
    const Complex& at(std::size_t i) const { return entries_[i]; }
    std::span<const Complex> entries() const { return entries_; }

    double norm() const;
    CVector normalized() const;  // UsageError on zero norm

private:
    std::vector<Complex> entries_;
};

struct EigenGroup {
    double eigenvalue = 0.0;
    CMatrix projector;
};

/// Grouped spectral decomposition of a Hermitian matrix. Groups are sorted by
/// ascending eigenvalue; projectors are Hermitian, idempotent, mutually
/// orthogonal and sum to the identity (all within kInvariantTol).
struct SpectralDecomposition {
    std::vector<EigenGroup> groups;
    double tolerance = kMergeTol;

    CMatrix reconstruct() const;  // sum of eigenvalue * projector
};

// Kronecker product; result entry ((i*b.rows+k),(j*b.cols+l)) = a(i,j)*b(k,l).
// Throws SizingError when the result would exceed max_entries.
CMatrix kron(const CMatrix& a, const CMatrix& b, std::size_t max_entries = kMaxEntries);
CVector kron(const CVector& a, const CVector& b, std::size_t max_entries = kMaxEntries);

// Conjugate transpose.
CMatrix dagger(const CMatrix& a);

// |a><b|
CMatrix outer(const CVector& a, const CVector& b);

CVector apply(const CMatrix& m, const CVector& v);

// Inner product <a|b> (conjugate-linear in the first argument).
Complex inner(const CVector& a, const CVector& b);

// Eigenvalues within tol of each other are merged into one group. Requires h
// Hermitian within kInvariantTol, else ContractViolation. Reconstruction
// error of the result is below 1e-8 for the sizes this library targets.
SpectralDecomposition spectral_decompose(const CMatrix& h, double tol = kMergeTol);

// Eigenvalues only (ascending); same Jacobi iteration as spectral_decompose.
std::vector<double> hermitian_eigenvalues(const CMatrix& h);

// Trace out every subsystem not listed in keep. dims are the per-subsystem
// dimensions in tensor order; keep holds subsystem indices. Hermiticity and
// unit trace of rho are checked at warn level only.
CMatrix partial_trace(const CMatrix& rho, std::span<const std::size_t> dims,
                      std::span<const std::size_t> keep);

}  // namespace relfacts

#endif
