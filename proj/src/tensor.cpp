#include "relfacts/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "relfacts/errors.hpp"

namespace relfacts {

namespace {

void require_finite(std::span<const Complex> entries) {
    for (const Complex& z : entries) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw UsageError("non-finite entry");
        }
    }
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) throw UsageError("matrix dimensions must be positive");
    entries_.assign(rows * cols, Complex{0.0, 0.0});
}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows == 0 || cols == 0) throw UsageError("matrix dimensions must be positive");
    if (entries_.size() != rows * cols) {
        throw UsageError("entry count does not match matrix dimensions");
    }
    require_finite(entries_);
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    std::vector<Complex> flat;
    std::size_t ncols = 0;
    for (const auto& row : rows) {
        if (ncols == 0) ncols = row.size();
        if (row.size() != ncols) throw UsageError("ragged matrix literal");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return CMatrix(rows.size(), ncols, std::move(flat));
}

CMatrix CMatrix::operator+(const CMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw UsageError("matrix shape mismatch in +");
    CMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i] + other.entries_[i];
    return out;
}

CMatrix CMatrix::operator-(const CMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw UsageError("matrix shape mismatch in -");
    CMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i] - other.entries_[i];
    return out;
}

CMatrix CMatrix::operator*(const CMatrix& other) const {
    if (cols_ != other.rows_) throw UsageError("matrix shape mismatch in *");
    CMatrix out(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const Complex aik = entries_[i * cols_ + k];
            if (aik == Complex{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < other.cols_; ++j) {
                out.entries_[i * other.cols_ + j] += aik * other.entries_[k * other.cols_ + j];
            }
        }
    }
    return out;
}

CMatrix CMatrix::scaled(Complex factor) const {
    CMatrix out = *this;
    for (Complex& z : out.entries_) z *= factor;
    return out;
}

Complex CMatrix::trace() const {
    if (!is_square()) throw UsageError("trace of non-square matrix");
    Complex t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) t += at(i, i);
    return t;
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const Complex& z : entries_) m = std::max(m, std::abs(z));
    return m;
}

bool CMatrix::is_hermitian(double tol) const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = i; j < cols_; ++j) {
            if (std::abs(at(i, j) - std::conj(at(j, i))) > tol) return false;
        }
    }
    return true;
}

CVector::CVector(std::size_t dim) {
    if (dim == 0) throw UsageError("vector dimension must be positive");
    entries_.assign(dim, Complex{0.0, 0.0});
}

CVector::CVector(std::vector<Complex> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw UsageError("vector dimension must be positive");
    require_finite(entries_);
}

CVector CVector::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw UsageError("basis index out of range");
    CVector v(dim);
    v.at(index) = 1.0;
    return v;
}

double CVector::norm() const {
    double s = 0.0;
    for (const Complex& z : entries_) s += std::norm(z);
    return std::sqrt(s);
}

CVector CVector::normalized() const {
    const double n = norm();
    if (n < 1e-300) throw UsageError("cannot normalize a zero vector");
    CVector out = *this;
    for (Complex& z : out.entries_) z /= n;
    return out;
}

CMatrix SpectralDecomposition::reconstruct() const {
    if (groups.empty()) throw UsageError("empty decomposition");
    CMatrix sum(groups.front().projector.rows(), groups.front().projector.cols());
    for (const EigenGroup& g : groups) {
        sum = sum + g.projector.scaled(g.eigenvalue);
    }
    return sum;
}

CMatrix kron(const CMatrix& a, const CMatrix& b, std::size_t max_entries) {
    if (a.rows() == 0 || b.rows() == 0) throw UsageError("kron of empty matrix");
    if (a.rows() > max_entries / b.rows() || a.cols() > max_entries / b.cols()) {
        throw SizingError("kron result exceeds the entry ceiling");
    }
    const std::size_t rr = a.rows() * b.rows();
    const std::size_t cc = a.cols() * b.cols();
    if (cc != 0 && rr > max_entries / cc) {
        throw SizingError("kron result exceeds the entry ceiling");
    }
    CMatrix out(rr, cc);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Complex aij = a.at(i, j);
            if (aij == Complex{0.0, 0.0}) continue;
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    out.at(i * b.rows() + k, j * b.cols() + l) = aij * b.at(k, l);
                }
            }
        }
    }
    return out;
}

CVector kron(const CVector& a, const CVector& b, std::size_t max_entries) {
    if (a.dim() > max_entries / b.dim()) {
        throw SizingError("kron result exceeds the entry ceiling");
    }
    CVector out(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t k = 0; k < b.dim(); ++k) {
            out.at(i * b.dim() + k) = a.at(i) * b.at(k);
        }
    }
    return out;
}

CMatrix dagger(const CMatrix& a) {
    CMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out.at(j, i) = std::conj(a.at(i, j));
        }
    }
    return out;
}

CMatrix outer(const CVector& a, const CVector& b) {
    CMatrix out(a.dim(), b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j) {
            out.at(i, j) = a.at(i) * std::conj(b.at(j));
        }
    }
    return out;
}

CVector apply(const CMatrix& m, const CVector& v) {
    if (m.cols() != v.dim()) throw UsageError("matrix/vector shape mismatch");
    CVector out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Complex acc{0.0, 0.0};
        for (std::size_t j = 0; j < m.cols(); ++j) acc += m.at(i, j) * v.at(j);
        out.at(i) = acc;
    }
    return out;
}

Complex inner(const CVector& a, const CVector& b) {
    if (a.dim() != b.dim()) throw UsageError("vector dimension mismatch");
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a.at(i)) * b.at(i);
    return acc;
}

namespace {

// Cyclic Jacobi for complex Hermitian matrices. Rotates the (p,q) plane with
// U = [[c, -s*e^{i phi}], [s*e^{-i phi}, c]] where e^{i phi} carries the phase
// of M(p,q); accumulating V = V*U leaves eigenvectors in the columns of V.
struct JacobiResult {
    std::vector<double> eigenvalues;  // unsorted, V column order
    CMatrix vectors;
};

JacobiResult hermitian_jacobi(const CMatrix& h) {
    const std::size_t n = h.rows();
    CMatrix m = h;
    CMatrix v = CMatrix::identity(n);
    const double scale = std::max(m.max_abs(), 1e-300);
    const double stop = 1e-14 * scale;
    const int max_sweeps = 100;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off = std::max(off, std::abs(m.at(p, q)));
            }
        }
        if (off <= stop) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex b = m.at(p, q);
                const double babs = std::abs(b);
                if (babs <= stop * 1e-2) continue;

                const double a = m.at(p, p).real();
                const double d = m.at(q, q).real();
                const Complex phase = b / babs;
                const double tau = (a - d) / (2.0 * babs);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                m.at(p, p) = Complex{a * c * c + 2.0 * c * s * babs + d * s * s, 0.0};
                m.at(q, q) = Complex{a * s * s - 2.0 * c * s * babs + d * c * c, 0.0};
                m.at(p, q) = Complex{0.0, 0.0};
                m.at(q, p) = Complex{0.0, 0.0};

                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const Complex mkp = m.at(k, p);
                    const Complex mkq = m.at(k, q);
                    m.at(k, p) = c * mkp + s * std::conj(phase) * mkq;
                    m.at(k, q) = -s * phase * mkp + c * mkq;
                    m.at(p, k) = std::conj(m.at(k, p));
                    m.at(q, k) = std::conj(m.at(k, q));
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex vkp = v.at(k, p);
                    const Complex vkq = v.at(k, q);
                    v.at(k, p) = c * vkp + s * std::conj(phase) * vkq;
                    v.at(k, q) = -s * phase * vkp + c * vkq;
                }
            }
        }
    }

    JacobiResult result;
    result.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.eigenvalues[i] = m.at(i, i).real();
    result.vectors = std::move(v);
    return result;
}

}  // namespace

SpectralDecomposition spectral_decompose(const CMatrix& h, double tol) {
    if (!h.is_square()) throw UsageError("spectral decomposition of non-square matrix");
    if (!h.is_hermitian(kInvariantTol)) {
        throw ContractViolation("spectral decomposition requires a Hermitian matrix");
    }

    const std::size_t n = h.rows();
    JacobiResult jac = hermitian_jacobi(h);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return jac.eigenvalues[i] < jac.eigenvalues[j];
    });

    SpectralDecomposition decomp;
    decomp.tolerance = tol;
    std::size_t pos = 0;
    while (pos < n) {
        std::size_t end = pos + 1;
        while (end < n &&
               jac.eigenvalues[order[end]] - jac.eigenvalues[order[end - 1]] <= tol) {
            ++end;
        }
        CMatrix projector(n, n);
        double eigsum = 0.0;
        for (std::size_t k = pos; k < end; ++k) {
            const std::size_t col = order[k];
            eigsum += jac.eigenvalues[col];
            for (std::size_t i = 0; i < n; ++i) {
                const Complex vi = jac.vectors.at(i, col);
                for (std::size_t j = 0; j < n; ++j) {
                    projector.at(i, j) += vi * std::conj(jac.vectors.at(j, col));
                }
            }
        }
        decomp.groups.push_back({eigsum / static_cast<double>(end - pos), std::move(projector)});
        pos = end;
    }
    return decomp;
}

std::vector<double> hermitian_eigenvalues(const CMatrix& h) {
    if (!h.is_square()) throw UsageError("eigenvalues of non-square matrix");
    if (!h.is_hermitian(kInvariantTol)) {
        throw ContractViolation("eigenvalues require a Hermitian matrix");
    }
    std::vector<double> eigs = hermitian_jacobi(h).eigenvalues;
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

CMatrix partial_trace(const CMatrix& rho, std::span<const std::size_t> dims,
                      std::span<const std::size_t> keep) {
    if (!rho.is_square()) throw UsageError("partial trace of non-square matrix");
    std::size_t total = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw UsageError("subsystem dimension must be positive");
        total *= d;
    }
    if (total != rho.rows()) throw UsageError("dims do not factor the matrix side");

    std::vector<std::size_t> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
        throw UsageError("duplicate subsystem index in keep set");
    }
    for (std::size_t k : kept) {
        if (k >= dims.size()) throw UsageError("keep index out of range");
    }

    if (!rho.is_hermitian(kInvariantTol) ||
        std::abs(rho.trace() - Complex{1.0, 0.0}) > kInvariantTol) {
        std::cerr << "relfacts: warning: partial_trace input is not a unit-trace "
                     "Hermitian matrix within 1e-10\n";
    }

    std::vector<std::size_t> stride(dims.size(), 1);
    for (std::size_t j = dims.size(); j-- > 1;) stride[j - 1] = stride[j] * dims[j];

    std::vector<std::size_t> traced;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        if (!std::binary_search(kept.begin(), kept.end(), j)) traced.push_back(j);
    }

    // Flat offsets contributed by each kept (resp. traced) multi-index.
    auto offsets_for = [&](const std::vector<std::size_t>& subsystems) {
        std::size_t count = 1;
        for (std::size_t j : subsystems) count *= dims[j];
        std::vector<std::size_t> offsets(count, 0);
        for (std::size_t flat = 0; flat < count; ++flat) {
            std::size_t rest = flat;
            for (std::size_t j = subsystems.size(); j-- > 0;) {
                const std::size_t sub = subsystems[j];
                offsets[flat] += (rest % dims[sub]) * stride[sub];
                rest /= dims[sub];
            }
        }
        return offsets;
    };

    const std::vector<std::size_t> keep_off = offsets_for(kept);
    const std::vector<std::size_t> trace_off = offsets_for(traced);

    CMatrix out(keep_off.size(), keep_off.size());
    for (std::size_t r = 0; r < keep_off.size(); ++r) {
        for (std::size_t c = 0; c < keep_off.size(); ++c) {
            Complex acc{0.0, 0.0};
            for (std::size_t t : trace_off) {
                acc += rho.at(keep_off[r] + t, keep_off[c] + t);
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

}  // namespace relfacts
