#ifndef RELFACTS_TESTS_SUPPORT_HPP
#define RELFACTS_TESTS_SUPPORT_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "relfacts/qstate.hpp"
#include "relfacts/rng.hpp"
#include "relfacts/tensor.hpp"

namespace testsupport {

using relfacts::CMatrix;
using relfacts::Complex;
using relfacts::CVector;

// Seeded generators so every "random" test is reproducible.
class Rand {
public:
    explicit Rand(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return rng_.next_double(); }
    double sym() { return 2.0 * uniform() - 1.0; }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng_.next() % n); }
    Complex complex_value() { return Complex{sym(), sym()}; }

    CMatrix matrix(std::size_t rows, std::size_t cols) {
        CMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = complex_value();
        }
        return m;
    }

    CMatrix hermitian(std::size_t n) {
        const CMatrix a = matrix(n, n);
        return (a + relfacts::dagger(a)).scaled(0.5);
    }

    CMatrix density(std::size_t n) {
        const CMatrix g = matrix(n, n);
        CMatrix rho = g * relfacts::dagger(g);
        return rho.scaled(1.0 / rho.trace());
    }

    CVector unit_vector(std::size_t n) {
        CVector v(n);
        for (std::size_t i = 0; i < n; ++i) v.at(i) = complex_value();
        return v.normalized();
    }

private:
    relfacts::SplitMix64 rng_;
};

inline double max_diff(const CMatrix& a, const CMatrix& b) { return (a - b).max_abs(); }

inline double max_diff(const CVector& a, const CVector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a.at(i) - b.at(i)));
    return m;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::string scenario_path(const std::string& name) {
    return std::string(RELFACTS_SCENARIO_DIR) + "/" + name;
}

}  // namespace testsupport

#endif
