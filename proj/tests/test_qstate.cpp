#include "relfacts/qstate.hpp"

#include <cmath>

#include "doctest.h"
#include "relfacts/errors.hpp"
#include "support.hpp"

using namespace relfacts;
using testsupport::max_diff;
using testsupport::Rand;

namespace {

SystemRegistry lab_registry() {
    SystemRegistry reg;
    reg.add_system("s", 2);
    reg.add_system("O", 3);
    return reg;
}

}  // namespace

TEST_CASE("registry rejects duplicate or empty labels and oversized products") {
    SystemRegistry reg;
    reg.add_system("s", 2);
    CHECK_THROWS_AS(reg.add_system("s", 3), UsageError);
    CHECK_THROWS_AS(reg.add_system("", 2), UsageError);
    CHECK_THROWS_AS(reg.add_system("zero", 0), UsageError);

    SystemRegistry big;
    big.add_system("a", 1024);
    big.add_system("b", 1024);  // exactly 2^20
    CHECK(big.total_dim() == (std::size_t{1} << 20));
    CHECK_THROWS_AS(big.add_system("c", 2), SizingError);
}

TEST_CASE("registry groups cover contiguous runs only") {
    SystemRegistry reg;
    reg.add_system("s", 2);
    reg.add_system("O", 3);
    reg.add_system("E", 2);
    const std::string lab[] = {"s", "O"};
    reg.add_group("lab", lab);
    CHECK(reg.target_span("lab").dim == 6);
    CHECK(reg.target_span("lab").first == 0);

    const std::string gap[] = {"s", "E"};
    CHECK_THROWS_AS(reg.add_group("gap", gap), UsageError);
    const std::string again[] = {"O"};
    CHECK_THROWS_AS(reg.add_group("lab", again), UsageError);
    CHECK_THROWS_AS(reg.add_group("s", again), UsageError);
}

TEST_CASE("product state lays components out apparatus-last") {
    SystemRegistry reg;
    reg.add_system("s", 2);
    reg.add_system("A", 2);
    const CVector spin({Complex{0.6, 0}, Complex{0.8, 0}});
    const CVector ready = CVector::basis(2, 0);
    const CVector components[] = {spin, ready};
    const State state = product_state(reg, components);
    REQUIRE(state.is_pure());
    CHECK(state.ket().at(0) == Complex{0.6, 0});
    CHECK(state.ket().at(1) == Complex{0.0, 0});
    CHECK(state.ket().at(2) == Complex{0.8, 0});
    CHECK(state.ket().at(3) == Complex{0.0, 0});
}

TEST_CASE("product state of basis vectors is the global basis vector") {
    SystemRegistry reg;
    reg.add_system("a", 2);
    reg.add_system("b", 3);
    const CVector components[] = {CVector::basis(2, 0), CVector::basis(3, 0)};
    const State state = product_state(reg, components);
    CHECK(state.ket().at(0) == Complex{1.0, 0});
    for (std::size_t i = 1; i < 6; ++i) CHECK(state.ket().at(i) == Complex{0.0, 0});
}

TEST_CASE("product state over three subsystems matches the kron chain") {
    Rand rand(61);
    SystemRegistry reg;
    reg.add_system("a", 2);
    reg.add_system("b", 2);
    reg.add_system("c", 3);
    const CVector va = rand.unit_vector(2);
    const CVector vb = rand.unit_vector(2);
    const CVector vc = rand.unit_vector(3);
    const CVector components[] = {va, vb, vc};
    const State state = product_state(reg, components);
    const CVector expected = kron(kron(va, vb), vc);
    CHECK(testsupport::max_diff(state.ket(), expected) <= 1e-12);
}

TEST_CASE("product state validates components") {
    SystemRegistry reg = lab_registry();
    const CVector only[] = {CVector::basis(2, 0)};
    CHECK_THROWS_AS(product_state(reg, only), UsageError);
    const CVector wrong_dim[] = {CVector::basis(2, 0), CVector::basis(2, 0)};
    CHECK_THROWS_AS(product_state(reg, wrong_dim), UsageError);
    const CVector unnormalized[] = {CVector({Complex{2, 0}, Complex{0, 0}}), CVector::basis(3, 0)};
    CHECK_THROWS_AS(product_state(reg, unnormalized), UsageError);
}

TEST_CASE("embed lifts operators into the declared layout") {
    const CMatrix sz = CMatrix::from_rows({{0.5, 0}, {0, -0.5}});

    SystemRegistry solo;
    solo.add_system("s", 2);
    CHECK(max_diff(embed(sz, solo, "s"), sz) == 0.0);

    const SystemRegistry lab = lab_registry();
    CHECK(max_diff(embed(sz, lab, "s"), kron(sz, CMatrix::identity(3))) == 0.0);

    Rand rand(67);
    SystemRegistry three;
    three.add_system("a", 2);
    three.add_system("b", 3);
    three.add_system("c", 2);
    const CMatrix op = rand.hermitian(3);
    const CMatrix expected = kron(kron(CMatrix::identity(2), op), CMatrix::identity(2));
    CHECK(max_diff(embed(op, three, "b"), expected) <= 1e-15);

    CHECK_THROWS_AS(embed(sz, lab, "nope"), UsageError);
    CHECK_THROWS_AS(embed(sz, lab, "O"), UsageError);  // wrong side
}

TEST_CASE("embed accepts group targets") {
    SystemRegistry reg;
    reg.add_system("s", 2);
    reg.add_system("O", 3);
    reg.add_system("E", 2);
    const std::string lab[] = {"s", "O"};
    reg.add_group("lab", lab);
    Rand rand(71);
    const CMatrix op = rand.hermitian(6);
    CHECK(max_diff(embed(op, reg, "lab"), kron(op, CMatrix::identity(2))) <= 1e-15);
}

TEST_CASE("to_density forms the expected outer products") {
    SystemRegistry solo;
    solo.add_system("s", 2);
    const State zero = State::pure(solo, CVector::basis(2, 0));
    CHECK(max_diff(to_density(zero).rho(), CMatrix::from_rows({{1, 0}, {0, 0}})) == 0.0);

    const double w = 1.0 / std::sqrt(2.0);
    const State plus = State::pure(solo, CVector({Complex{w, 0}, Complex{w, 0}}));
    CHECK(max_diff(to_density(plus).rho(),
                   CMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}})) <= 1e-12);
}

TEST_CASE("to_density of a random ket is a rank-1, trace-1 matrix") {
    Rand rand(73);
    SystemRegistry reg;
    reg.add_system("s", 4);
    const State state = State::pure(reg, rand.unit_vector(4));
    const State dense = to_density(state);
    CHECK(std::abs(dense.rho().trace() - Complex{1, 0}) <= 1e-12);
    const std::vector<double> eigs = hermitian_eigenvalues(dense.rho());
    CHECK(eigs.back() == doctest::Approx(1.0).epsilon(1e-10));
    for (std::size_t i = 0; i + 1 < eigs.size(); ++i) {
        CHECK(std::abs(eigs[i]) <= 1e-10);
    }
    // passing a mixed state through is the identity
    CHECK(max_diff(to_density(dense).rho(), dense.rho()) == 0.0);
}

TEST_CASE("reduced over every subsystem returns the same density matrix") {
    Rand rand(79);
    const SystemRegistry reg = lab_registry();
    const State state = State::pure(reg, rand.unit_vector(6));
    const std::string keep[] = {"s", "O"};
    CHECK(max_diff(state.reduced(keep).rho(), state.density()) <= 1e-12);
}

TEST_CASE("expectation values for spin-z") {
    SystemRegistry solo;
    solo.add_system("s", 2);
    const Observable sz = spin_z(solo, "s");

    const State up = State::pure(solo, CVector::basis(2, 0));
    CHECK(expectation(up, sz) == doctest::Approx(0.5).epsilon(1e-12));

    const double w = 1.0 / std::sqrt(2.0);
    const State plus = State::pure(solo, CVector({Complex{w, 0}, Complex{w, 0}}));
    CHECK(std::abs(expectation(plus, sz)) <= 1e-12);

    const State tilted = State::pure(solo, CVector({Complex{0.6, 0}, Complex{0.8, 0}}));
    CHECK(expectation(tilted, sz) == doctest::Approx(-0.14).epsilon(1e-12));
}

TEST_CASE("expectation lies within the spectral range") {
    Rand rand(83);
    SystemRegistry reg;
    reg.add_system("s", 4);
    const CMatrix h = rand.hermitian(4);
    const Observable obs("h", reg, "s", h);
    for (int trial = 0; trial < 200; ++trial) {
        const State state = State::pure(reg, rand.unit_vector(4));
        const double value = expectation(state, obs);
        CHECK(value >= obs.min_eigenvalue() - 1e-10);
        CHECK(value <= obs.max_eigenvalue() + 1e-10);
    }
}

TEST_CASE("expectation requires matching registries") {
    SystemRegistry solo;
    solo.add_system("s", 2);
    const Observable sz = spin_z(lab_registry(), "s");
    const State up = State::pure(solo, CVector::basis(2, 0));
    CHECK_THROWS_AS(expectation(up, sz), UsageError);
}

TEST_CASE("state constructors enforce their invariants") {
    SystemRegistry solo;
    solo.add_system("s", 2);
    CHECK_THROWS_AS(State::pure(solo, CVector({Complex{1, 0}, Complex{1, 0}})),
                    ContractViolation);
    CHECK_THROWS_AS(State::pure(solo, CVector::basis(3, 0)), UsageError);

    CHECK_THROWS_AS(State::mixed(solo, CMatrix::from_rows({{1, 1}, {0, 0}})), ContractViolation);
    CHECK_THROWS_AS(State::mixed(solo, CMatrix::from_rows({{1.5, 0}, {0, -0.5}})),
                    ContractViolation);
    CHECK_THROWS_AS(State::mixed(solo, CMatrix::from_rows({{0.7, 0}, {0, 0.7}})),
                    ContractViolation);
    CHECK_NOTHROW(State::mixed(solo, CMatrix::from_rows({{0.5, 0}, {0, 0.5}})));
}

TEST_CASE("observables validate Hermiticity and label coverage") {
    SystemRegistry solo;
    solo.add_system("s", 2);
    CHECK_THROWS_AS(Observable("bad", solo, "s", CMatrix::from_rows({{0, 1}, {2, 0}})),
                    ContractViolation);
    CHECK_THROWS_AS(
        Observable("bad", solo, "s", CMatrix::from_rows({{0.5, 0}, {0, -0.5}}), {"only-one"}),
        UsageError);

    const Observable sz = spin_z(solo, "s");
    REQUIRE(sz.group_count() == 2);
    CHECK(sz.outcome_label(0) == "↓");
    CHECK(sz.outcome_label(1) == "↑");
    CHECK(sz.group_of_label("↑").value() == 1);
    CHECK(!sz.group_of_label("sideways").has_value());

    const Observable pointer = pointer_observable(lab_registry(), "O");
    REQUIRE(pointer.group_count() == 3);
    CHECK(pointer.outcome_label(0) == "Φ0");
    CHECK(pointer.eigenvalue(2) == doctest::Approx(2.0));
}
