#include "relfacts/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace relfacts::oracle {

std::vector<Complex> kron_naive(std::span<const Complex> a, std::size_t ar, std::size_t ac,
                                std::span<const Complex> b, std::size_t br, std::size_t bc) {
    if (a.size() != ar * ac || b.size() != br * bc) {
        throw std::invalid_argument("kron_naive: buffer size mismatch");
    }
    std::vector<Complex> out(ar * br * ac * bc, Complex{0.0, 0.0});
    const std::size_t out_cols = ac * bc;
    for (std::size_t i = 0; i < ar; ++i) {
        for (std::size_t j = 0; j < ac; ++j) {
            for (std::size_t k = 0; k < br; ++k) {
                for (std::size_t l = 0; l < bc; ++l) {
                    out[(i * br + k) * out_cols + (j * bc + l)] =
                        a[i * ac + j] * b[k * bc + l];
                }
            }
        }
    }
    return out;
}

std::vector<Complex> partial_trace_naive(std::span<const Complex> rho,
                                         std::span<const std::size_t> dims,
                                         std::span<const std::size_t> keep) {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    if (rho.size() != n * n) throw std::invalid_argument("partial_trace_naive: bad buffer");

    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size()) throw std::invalid_argument("partial_trace_naive: keep index");
        kept[k] = true;
    }
    std::size_t out_dim = 1;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        if (kept[j]) out_dim *= dims[j];
    }

    std::vector<Complex> out(out_dim * out_dim, Complex{0.0, 0.0});
    std::vector<std::size_t> row_digits(dims.size()), col_digits(dims.size());
    for (std::size_t row = 0; row < n; ++row) {
        std::size_t rest = row;
        for (std::size_t j = dims.size(); j-- > 0;) {
            row_digits[j] = rest % dims[j];
            rest /= dims[j];
        }
        for (std::size_t col = 0; col < n; ++col) {
            rest = col;
            for (std::size_t j = dims.size(); j-- > 0;) {
                col_digits[j] = rest % dims[j];
                rest /= dims[j];
            }
            bool diagonal_in_traced = true;
            for (std::size_t j = 0; j < dims.size(); ++j) {
                if (!kept[j] && row_digits[j] != col_digits[j]) {
                    diagonal_in_traced = false;
                    break;
                }
            }
            if (!diagonal_in_traced) continue;
            std::size_t out_row = 0, out_col = 0;
            for (std::size_t j = 0; j < dims.size(); ++j) {
                if (!kept[j]) continue;
                out_row = out_row * dims[j] + row_digits[j];
                out_col = out_col * dims[j] + col_digits[j];
            }
            out[out_row * out_dim + out_col] += rho[row * n + col];
        }
    }
    return out;
}

ChainProbes chain_probes(std::span<const Complex> w_ba, std::span<const Complex> w_cb) {
    if (w_ba.size() != w_cb.size() || w_ba.empty()) {
        throw std::invalid_argument("chain_probes: legs must be non-empty and equal length");
    }
    ChainProbes probes;
    Complex amplitude{0.0, 0.0};
    for (std::size_t i = 0; i < w_ba.size(); ++i) {
        const Complex path = w_cb[i] * w_ba[i];
        probes.p_collapse += path.real() * path.real() + path.imag() * path.imag();
        amplitude += path;
    }
    probes.p_unitary = amplitude.real() * amplitude.real() + amplitude.imag() * amplitude.imag();
    probes.deficit = std::abs(probes.p_unitary - probes.p_collapse);

    Complex cross{0.0, 0.0};
    for (std::size_t i = 0; i < w_ba.size(); ++i) {
        for (std::size_t j = 0; j < w_ba.size(); ++j) {
            if (i == j) continue;
            cross += (w_cb[i] * w_ba[i]) * std::conj(w_cb[j] * w_ba[j]);
        }
    }
    probes.cross_terms = std::abs(cross);
    return probes;
}

namespace {

// tr(B * M) over flat row-major buffers.
Complex trace_product(std::span<const Complex> b, std::span<const Complex> m, std::size_t n) {
    Complex t{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            t += b[i * n + k] * m[k * n + i];
        }
    }
    return t;
}

std::vector<Complex> sandwich(std::span<const Complex> a, std::span<const Complex> rho,
                              std::size_t n) {
    std::vector<Complex> tmp(n * n, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                tmp[i * n + j] += a[i * n + k] * rho[k * n + j];
            }
        }
    }
    std::vector<Complex> out(n * n, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                out[i * n + j] += tmp[i * n + k] * a[k * n + j];
            }
        }
    }
    return out;
}

}  // namespace

double stability_deviation_naive(std::span<const Complex> rho,
                                 std::span<const std::vector<Complex>> projectors,
                                 std::span<const Complex> target, std::size_t n) {
    if (rho.size() != n * n || target.size() != n * n) {
        throw std::invalid_argument("stability_deviation_naive: bad buffer");
    }
    const double p_direct = trace_product(target, rho, n).real();
    double p_composed = 0.0;
    for (const std::vector<Complex>& a : projectors) {
        if (a.size() != n * n) throw std::invalid_argument("stability_deviation_naive: projector");
        const std::vector<Complex> branch = sandwich(a, rho, n);
        Complex branch_weight{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) branch_weight += branch[i * n + i];
        if (branch_weight.real() < 1e-14) continue;
        p_composed += trace_product(target, branch, n).real();
    }
    return std::abs(p_direct - p_composed);
}

}  // namespace relfacts::oracle
