#include "relfacts/tensor.hpp"

#include <cmath>

#include "doctest.h"
#include "relfacts/errors.hpp"
#include "relfacts/oracle.hpp"
#include "support.hpp"

using namespace relfacts;
using testsupport::max_diff;
using testsupport::Rand;

namespace {

CMatrix oracle_kron(const CMatrix& a, const CMatrix& b) {
    const auto flat = oracle::kron_naive(a.entries(), a.rows(), a.cols(), b.entries(), b.rows(),
                                         b.cols());
    return CMatrix(a.rows() * b.rows(), a.cols() * b.cols(), flat);
}

}  // namespace

TEST_CASE("matrix constructors enforce finiteness and shape") {
    CHECK_THROWS_AS(CMatrix(2, 2, {Complex{1, 0}, Complex{0, 0}, Complex{0, 0}}), UsageError);
    CHECK_THROWS_AS(CMatrix(0, 2), UsageError);
    const double nan = std::nan("");
    CHECK_THROWS_AS(CMatrix(1, 2, {Complex{nan, 0}, Complex{0, 0}}), UsageError);
    CHECK_THROWS_AS(CVector({Complex{0, nan}}), UsageError);
    CHECK_THROWS_AS(CVector(std::vector<Complex>{}), UsageError);
}

TEST_CASE("kron of identities is the identity") {
    const CMatrix result = kron(CMatrix::identity(2), CMatrix::identity(2));
    CHECK(max_diff(result, CMatrix::identity(4)) == 0.0);
}

TEST_CASE("kron with a swap matrix permutes subsystem blocks") {
    const CMatrix swap = CMatrix::from_rows({{0, 1}, {1, 0}});
    const CMatrix result = kron(swap, CMatrix::identity(2));
    const CMatrix expected = CMatrix::from_rows({{0, 0, 1, 0},
                                                 {0, 0, 0, 1},
                                                 {1, 0, 0, 0},
                                                 {0, 1, 0, 0}});
    CHECK(max_diff(result, expected) == 0.0);
    CHECK(max_diff(result, oracle_kron(swap, CMatrix::identity(2))) == 0.0);
}

TEST_CASE("kron with a 1x1 factor is scalar multiplication") {
    Rand rand(11);
    const CMatrix m = rand.matrix(3, 2);
    const Complex c{0.25, -1.5};
    const CMatrix scalar(1, 1, {c});
    CHECK(max_diff(kron(scalar, m), m.scaled(c)) == 0.0);
}

TEST_CASE("kron is associative and matches the naive oracle") {
    Rand rand(17);
    for (int trial = 0; trial < 50; ++trial) {
        const CMatrix a = rand.matrix(2, 2);
        const CMatrix b = rand.matrix(1 + trial % 3, 2);
        const CMatrix c = rand.matrix(2, 1 + trial % 2);
        CHECK(max_diff(kron(kron(a, b), c), kron(a, kron(b, c))) <= 1e-12);
        CHECK(max_diff(kron(a, b), oracle_kron(a, b)) == 0.0);
    }
}

TEST_CASE("kron refuses results beyond the entry ceiling") {
    const CMatrix tall(1200, 1);
    CHECK_THROWS_AS(kron(tall, tall), SizingError);
    CHECK_NOTHROW(kron(tall, CMatrix(2, 1)));
}

TEST_CASE("dagger on the identity and a nilpotent matrix") {
    CHECK(max_diff(dagger(CMatrix::identity(3)), CMatrix::identity(3)) == 0.0);
    const CMatrix upper = CMatrix::from_rows({{Complex{0, 0}, Complex{0, 1}},
                                              {Complex{0, 0}, Complex{0, 0}}});
    const CMatrix expected = CMatrix::from_rows({{Complex{0, 0}, Complex{0, 0}},
                                                 {Complex{0, -1}, Complex{0, 0}}});
    CHECK(max_diff(dagger(upper), expected) == 0.0);
}

TEST_CASE("dagger is an involution") {
    Rand rand(23);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix m = rand.matrix(3, 4);
        CHECK(max_diff(dagger(dagger(m)), m) == 0.0);
    }
}

TEST_CASE("spectral decomposition of an already diagonal spin observable") {
    const CMatrix sz = CMatrix::from_rows({{0.5, 0}, {0, -0.5}});
    const SpectralDecomposition decomp = spectral_decompose(sz);
    REQUIRE(decomp.groups.size() == 2);
    CHECK(decomp.groups[0].eigenvalue == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(decomp.groups[1].eigenvalue == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(max_diff(decomp.groups[0].projector, CMatrix::from_rows({{0, 0}, {0, 1}})) <= 1e-12);
    CHECK(max_diff(decomp.groups[1].projector, CMatrix::from_rows({{1, 0}, {0, 0}})) <= 1e-12);
}

TEST_CASE("spectral decomposition merges degenerate eigenvalues") {
    const SpectralDecomposition decomp = spectral_decompose(CMatrix::identity(4));
    REQUIRE(decomp.groups.size() == 1);
    CHECK(decomp.groups[0].eigenvalue == doctest::Approx(1.0));
    CHECK(max_diff(decomp.groups[0].projector, CMatrix::identity(4)) <= 1e-10);

    const CMatrix partly = CMatrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 2}});
    const SpectralDecomposition two = spectral_decompose(partly);
    REQUIRE(two.groups.size() == 2);
    CHECK(two.groups[0].projector.trace().real() == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("spectral decomposition reconstructs random Hermitian matrices") {
    Rand rand(31);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix h = rand.hermitian(4);
        const SpectralDecomposition decomp = spectral_decompose(h);
        CHECK(max_diff(decomp.reconstruct(), h) <= 1e-8);
    }
}

TEST_CASE("spectral decomposition rejects non-Hermitian input") {
    const CMatrix skew = CMatrix::from_rows({{0, 1}, {2, 0}});
    CHECK_THROWS_AS(spectral_decompose(skew), ContractViolation);
}

TEST_CASE("spectral projectors are idempotent, orthogonal, and complete") {
    Rand rand(37);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 7;  // up to 8x8
        const CMatrix h = rand.hermitian(n);
        const SpectralDecomposition decomp = spectral_decompose(h);
        CMatrix sum(n, n);
        for (const EigenGroup& g : decomp.groups) {
            CHECK(max_diff(g.projector * g.projector, g.projector) <= 1e-10);
            CHECK(g.projector.is_hermitian(1e-10));
            sum = sum + g.projector;
        }
        CHECK(max_diff(sum, CMatrix::identity(n)) <= 1e-10);
        for (std::size_t i = 0; i < decomp.groups.size(); ++i) {
            for (std::size_t j = i + 1; j < decomp.groups.size(); ++j) {
                CHECK((decomp.groups[i].projector * decomp.groups[j].projector).max_abs() <=
                      1e-10);
            }
        }
    }
}

TEST_CASE("partial trace of a product state factors exactly") {
    Rand rand(41);
    const CMatrix rho_a = rand.density(2);
    const CMatrix rho_b = rand.density(3);
    const CMatrix joint = kron(rho_a, rho_b);
    const std::size_t dims[] = {2, 3};
    const std::size_t keep_a[] = {0};
    CHECK(max_diff(partial_trace(joint, dims, keep_a), rho_a) <= 1e-12);
    const std::size_t keep_b[] = {1};
    CHECK(max_diff(partial_trace(joint, dims, keep_b), rho_b) <= 1e-12);
}

TEST_CASE("partial trace of the Bell state is maximally mixed") {
    const double w = 1.0 / std::sqrt(2.0);
    CVector bell(4);
    bell.at(0) = w;
    bell.at(3) = w;
    const CMatrix rho = outer(bell, bell);
    const std::size_t dims[] = {2, 2};
    const std::size_t keep[] = {0};
    const CMatrix reduced = partial_trace(rho, dims, keep);
    CHECK(max_diff(reduced, CMatrix::identity(2).scaled(0.5)) <= 1e-12);

    const auto naive = oracle::partial_trace_naive(rho.entries(), dims, keep);
    CHECK(max_diff(reduced, CMatrix(2, 2, naive)) <= 1e-12);
}

TEST_CASE("partial trace with every subsystem kept is the identity map") {
    Rand rand(43);
    const CMatrix rho = rand.density(6);
    const std::size_t dims[] = {2, 3};
    const std::size_t keep[] = {0, 1};
    CHECK(max_diff(partial_trace(rho, dims, keep), rho) == 0.0);
}

TEST_CASE("partial trace preserves the trace and matches the naive oracle") {
    Rand rand(47);
    const std::vector<std::vector<std::size_t>> splits = {
        {2, 2}, {2, 3}, {3, 3}, {2, 2, 2}, {4, 4}, {2, 2, 4}, {2, 8}};
    for (const auto& dims : splits) {
        std::size_t total = 1;
        for (std::size_t d : dims) total *= d;
        const CMatrix rho = rand.density(total);
        for (std::size_t mask = 1; mask < (std::size_t{1} << dims.size()); ++mask) {
            std::vector<std::size_t> keep;
            for (std::size_t j = 0; j < dims.size(); ++j) {
                if (mask & (std::size_t{1} << j)) keep.push_back(j);
            }
            const CMatrix reduced = partial_trace(rho, dims, keep);
            CHECK(std::abs(reduced.trace() - rho.trace()) <= 1e-12);
            const auto naive = oracle::partial_trace_naive(rho.entries(), dims, keep);
            CHECK(max_diff(reduced, CMatrix(reduced.rows(), reduced.cols(), naive)) <= 1e-12);
        }
    }
}

TEST_CASE("partial trace validates its arguments") {
    Rand rand(53);
    const CMatrix rho = rand.density(4);
    const std::size_t dims[] = {2, 2};
    const std::size_t bad[] = {2};
    CHECK_THROWS_AS(partial_trace(rho, dims, bad), UsageError);
    const std::size_t dup[] = {0, 0};
    CHECK_THROWS_AS(partial_trace(rho, dims, dup), UsageError);
    const std::size_t wrong_dims[] = {3, 2};
    const std::size_t keep[] = {0};
    CHECK_THROWS_AS(partial_trace(rho, wrong_dims, keep), UsageError);
}

TEST_CASE("vector normalization rejects the zero vector") {
    CHECK_THROWS_AS(CVector(2).normalized(), UsageError);
    const CVector v({Complex{3, 0}, Complex{4, 0}});
    CHECK(v.normalized().norm() == doctest::Approx(1.0).epsilon(1e-14));
}
