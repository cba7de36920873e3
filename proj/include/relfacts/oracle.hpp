#ifndef RELFACTS_ORACLE_HPP
#define RELFACTS_ORACLE_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

// Brute-force reference implementations, deliberately written as plain index
// loops over flat buffers with no calls into the library fast paths. Tests
// and the `oracle` CLI subcommand use them to check the library from the
// outside.
namespace relfacts::oracle {

using Complex = std::complex<double>;

// a is (ar x ac) row-major, b is (br x bc); returns the (ar*br x ac*bc)
// Kronecker product, row-major.
std::vector<Complex> kron_naive(std::span<const Complex> a, std::size_t ar, std::size_t ac,
                                std::span<const Complex> b, std::size_t br, std::size_t bc);

// rho is (n x n) row-major with n = product of dims. Sums rho over every
// basis pair whose traced-out digits coincide. keep holds subsystem indices;
// the result is row-major over the kept subsystems in their original order.
std::vector<Complex> partial_trace_naive(std::span<const Complex> rho,
                                         std::span<const std::size_t> dims,
                                         std::span<const std::size_t> keep);

struct ChainProbes {
    double p_collapse = 0.0;
    double p_unitary = 0.0;
    double deficit = 0.0;
    double cross_terms = 0.0;  // |sum over i != j of z_i * conj(z_j)|
};

// Evaluates both probability compositions of an amplitude chain directly.
ChainProbes chain_probes(std::span<const Complex> w_ba, std::span<const Complex> w_cb);

// Direct evaluation of |tr(B rho) - sum_i tr(B A_i rho A_i)| from flat (n x n)
// row-major buffers; branches with tr(A_i rho A_i) below 1e-14 contribute 0.
double stability_deviation_naive(std::span<const Complex> rho,
                                 std::span<const std::vector<Complex>> projectors,
                                 std::span<const Complex> target, std::size_t n);

}  // namespace relfacts::oracle

#endif
