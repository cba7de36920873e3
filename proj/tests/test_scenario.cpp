#include "relfacts/scenario.hpp"

#include <filesystem>
#include <vector>

#include "doctest.h"
#include "relfacts/errors.hpp"
#include "relfacts/interpret.hpp"
#include "relfacts/oracle.hpp"
#include "relfacts/report.hpp"
#include "support.hpp"

using namespace relfacts;
using namespace relfacts::scn;
using testsupport::read_file;
using testsupport::scenario_path;

namespace {

ScenarioAst parse_ok(const std::string& source) {
    ParseResult result = parse(source);
    if (const auto* error = std::get_if<ParseError>(&result)) {
        FAIL("unexpected parse error at " << error->line << ":" << error->column << ": "
                                          << error->message);
    }
    return std::get<ScenarioAst>(result);
}

ParseError parse_fails(const std::string& source) {
    ParseResult result = parse(source);
    if (std::holds_alternative<ScenarioAst>(result)) {
        FAIL("expected a parse error for:\n" << source);
    }
    return std::get<ParseError>(result);
}

std::vector<std::string> corpus_files() {
    std::vector<std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(RELFACTS_SCENARIO_DIR)) {
        if (entry.path().extension() == ".scn") files.push_back(entry.path().string());
    }
    REQUIRE(!files.empty());
    std::sort(files.begin(), files.end());
    return files;
}

void check_position_in_source(const ParseError& error, const std::string& source) {
    std::size_t lines = 1;
    for (char c : source) {
        if (c == '\n') ++lines;
    }
    CHECK(error.line >= 1);
    CHECK(error.line <= lines + 1);
    CHECK(error.column >= 1);
}

}  // namespace

TEST_CASE("the minimal program parses into four nodes") {
    const ScenarioAst ast = parse_ok(
        "system s dim 2\n"
        "state s = (0.6, 0.8)\n"
        "observer O\n"
        "measure O spin-z on s\n");
    CHECK(ast.name.empty());
    CHECK(!ast.default_seed.has_value());
    REQUIRE(ast.declarations.size() == 3);
    REQUIRE(ast.steps.size() == 1);
    CHECK(std::holds_alternative<SystemDecl>(ast.declarations[0].node));
    CHECK(std::holds_alternative<StateDecl>(ast.declarations[1].node));
    CHECK(std::holds_alternative<ObserverDecl>(ast.declarations[2].node));
    const auto& measure_step = std::get<MeasureStmt>(ast.steps[0].node);
    CHECK(measure_step.observer == "O");
    CHECK(measure_step.observable == "spin-z");
    CHECK(measure_step.system == "s");
}

TEST_CASE("a forward reference is reported at the offending token") {
    const ParseError error = parse_fails(
        "system s dim 2\n"
        "state s = (0.6, 0.8)\n"
        "observer O\n"
        "measure O spin-z on t\n");
    CHECK(error.line == 4);
    CHECK(error.column == 21);
    CHECK(error.message.find("forward reference") != std::string::npos);
}

TEST_CASE("the shipped Wigner scenario parses into the expected structure") {
    const ScenarioAst ast = parse_ok(read_file(scenario_path("wigner.scn")));
    CHECK(ast.name == "wigner");
    CHECK(ast.default_seed.value() == 42);

    int systems = 0, apparatuses = 0, observers = 0, observables = 0, states = 0;
    for (const Declaration& decl : ast.declarations) {
        if (std::holds_alternative<SystemDecl>(decl.node)) ++systems;
        if (std::holds_alternative<ApparatusDecl>(decl.node)) ++apparatuses;
        if (std::holds_alternative<ObserverDecl>(decl.node)) ++observers;
        if (std::holds_alternative<ObservableDecl>(decl.node)) ++observables;
        if (std::holds_alternative<StateDecl>(decl.node)) ++states;
    }
    CHECK(systems == 1);
    CHECK(apparatuses == 1);
    CHECK(observers == 2);
    CHECK(observables == 3);
    CHECK(states == 1);

    REQUIRE(ast.steps.size() == 5);
    CHECK(std::holds_alternative<PremeasureStmt>(ast.steps[0].node));
    CHECK(std::holds_alternative<MeasureStmt>(ast.steps[1].node));
    CHECK(std::holds_alternative<UnitaryViewStmt>(ast.steps[2].node));
    CHECK(std::holds_alternative<StabilityStmt>(ast.steps[3].node));
    CHECK(std::holds_alternative<CrossCheckStmt>(ast.steps[4].node));

    // the symmetric target projector carries 0.5 on the two occupied branches
    for (const Declaration& decl : ast.declarations) {
        const auto* obs = std::get_if<ObservableDecl>(&decl.node);
        if (obs == nullptr || obs->name != "sym") continue;
        CHECK(obs->target == "W");
        REQUIRE(obs->kind == ObservableKind::kMatrix);
        CHECK(obs->matrix.at(1, 1) == Complex{0.5, 0});
        CHECK(obs->matrix.at(1, 5) == Complex{0.5, 0});
        CHECK(obs->matrix.at(5, 1) == Complex{0.5, 0});
        CHECK(obs->matrix.at(5, 5) == Complex{0.5, 0});
    }
}

TEST_CASE("the whole corpus round-trips through print and parse") {
    for (const std::string& path : corpus_files()) {
        CAPTURE(path);
        const ScenarioAst ast = parse_ok(read_file(path));
        const std::string printed = print(ast);
        const ScenarioAst reparsed = parse_ok(printed);
        CHECK(reparsed == ast);
        CHECK(print(reparsed) == printed);
    }
}

TEST_CASE("measure statements with a seed clause round-trip") {
    const ScenarioAst ast = parse_ok(
        "system s dim 2\n"
        "observer O\n"
        "measure O spin-z on s seed 987654321\n");
    const auto& stmt = std::get<MeasureStmt>(ast.steps[0].node);
    CHECK(stmt.seed.value() == 987654321);
    CHECK(parse_ok(print(ast)) == ast);
}

TEST_CASE("the parser normalizes amplitudes and records the correction") {
    const ScenarioAst ast = parse_ok("system s dim 2\nstate s = (1, 1)\n");
    const auto& state = std::get<StateDecl>(ast.declarations[1].node);
    CHECK(state.applied_norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(state.amplitudes[0] - Complex{1.0 / std::sqrt(2.0), 0}) <= 1e-12);

    // already normalized lists are kept bit for bit
    const ScenarioAst exact = parse_ok("system s dim 2\nstate s = (0.6, 0.8)\n");
    const auto& exact_state = std::get<StateDecl>(exact.declarations[1].node);
    CHECK(exact_state.applied_norm == 1.0);
    CHECK(exact_state.amplitudes[0] == Complex{0.6, 0});
}

TEST_CASE("complex literals cover the grammar") {
    const ScenarioAst ast = parse_ok(
        "system s dim 4\n"
        "state s = (0.5+0.5i, 0.5-0.5i, -0.5, 1e-1+0i)\n");
    const auto& state = std::get<StateDecl>(ast.declarations[1].node);
    const double n = state.applied_norm;
    CHECK(std::abs(state.amplitudes[0] * n - Complex{0.5, 0.5}) <= 1e-12);
    CHECK(std::abs(state.amplitudes[1] * n - Complex{0.5, -0.5}) <= 1e-12);
    CHECK(std::abs(state.amplitudes[2] * n - Complex{-0.5, 0}) <= 1e-12);
    CHECK(std::abs(state.amplitudes[3] * n - Complex{0.1, 0}) <= 1e-12);
}

TEST_CASE("each static error is a distinct positioned message") {
    struct Case {
        const char* source;
        const char* fragment;
    };
    const Case cases[] = {
        {"system s dim 2\n@@@\n", "unexpected character"},
        {"sistem s dim 2\n", "unknown keyword"},
        {"system s dim 2\nstate s = (0.6, 0.8, 0.1)\n", "dimension mismatch"},
        {"system s dim 2\nstate s = (0, 0)\n", "state has zero norm"},
        {"system s dim 2\nsystem s dim 3\n", "duplicate label"},
        {"observer O\nobserver O\n", "duplicate observer"},
        {"system s dim 3\nobservable z on s = spin-z\n", "spin-z needs a 2-dimensional target"},
        {"apparatus A dim 2 ready 5\n", "ready index"},
        {"system s dim 2\nobservable z on s = [0, 1; 0, 0]\n", "not Hermitian"},
        {"system s dim 2\nobservable z on s = [0, 1, 0; 1, 0, 0]\n", "square"},
        {"scenario \"x\n", "unterminated string"},
        {"system s dim 2\nstate s = (1., 0)\n", "digits after decimal point"},
        {"system dim dim 2\n", "keyword"},
        {"system s dim 2\nstate s = (0.5i, 0.5)\n", "explicit real part"},
        {"system s dim 2\nobserver O\nmeasure O spin-z s\n", "expected 'on'"},
        {"system s dim 2\nseed 1\nseed 2\n", "seed already set"},
        {"system s dim 2\nobserver O\nobserver W\ncross-check W against W\n",
         "cannot cross-check against itself"},
        {"system s dim 2\nenvironment E dim 1\nobserver O\ndecohere s into E overlap 0.5\n",
         "too small"},
        {"system s dim 2\nsystem t dim 2\nobservable z on s = spin-z\nobserver O\n"
         "measure O z on t\n",
         "does not act on"},
        {"system s dim 1048577\n", "exceeds 2^20"},
    };
    for (const Case& c : cases) {
        CAPTURE(c.source);
        const ParseError error = parse_fails(c.source);
        CHECK(error.message.find(c.fragment) != std::string::npos);
        check_position_in_source(error, c.source);
    }
}

TEST_CASE("fuzzed mutations of valid sources never crash the parser") {
    std::vector<std::string> seeds;
    for (const std::string& path : corpus_files()) seeds.push_back(read_file(path));

    SplitMix64 rng(2024);
    const char alphabet[] = "abcXYZ012.,;()[]=+-#\"\n \t";
    int parse_errors = 0;
    for (int iteration = 0; iteration < 1000; ++iteration) {
        std::string mutated = seeds[rng.next() % seeds.size()];
        const int edits = 1 + static_cast<int>(rng.next() % 4);
        for (int e = 0; e < edits; ++e) {
            if (mutated.empty()) break;
            const std::size_t pos = rng.next() % mutated.size();
            switch (rng.next() % 3) {
                case 0: mutated[pos] = alphabet[rng.next() % (sizeof alphabet - 1)]; break;
                case 1: mutated.erase(pos, 1); break;
                default:
                    mutated.insert(pos, 1, alphabet[rng.next() % (sizeof alphabet - 1)]);
            }
        }
        const ParseResult result = parse(mutated);  // must not throw
        if (const auto* error = std::get_if<ParseError>(&result)) {
            ++parse_errors;
            check_position_in_source(*error, mutated);
        }
    }
    CHECK(parse_errors > 0);
}

TEST_CASE("interpreting the third-person scenario keeps W factless until the check") {
    const ScenarioAst ast = parse_ok(read_file(scenario_path("third_person.scn")));
    const ScenarioResult result = interpret(ast);

    REQUIRE(result.ledgers.size() == 2);
    const PerspectiveLedger& o = result.ledgers[0];
    const PerspectiveLedger& w = result.ledgers[1];
    CHECK(o.observer() == "O");
    REQUIRE(o.facts().size() == 1);

    REQUIRE(result.stability_checks.size() == 1);
    const StabilityEntry& stability = result.stability_checks[0];
    CHECK(std::abs(stability.report.deviation - 0.5) <= 1e-10);
    CHECK(!stability.report.stable);
    CHECK(stability.witness > 0.0);

    // W's only fact comes from the cross-check, after the stability step
    REQUIRE(w.facts().size() == 1);
    CHECK(w.facts()[0].step > stability.step_index);
    REQUIRE(result.cross_checks.size() == 1);
    CHECK(result.cross_checks[0].status == CrossCheckStatus::kAgree);
    CHECK(std::abs(result.cross_checks[0].exact_correlation - 1.0) <= 1e-12);
}

TEST_CASE("a scenario without steps reports the initial states only") {
    const ScenarioAst ast = parse_ok(
        "system s dim 2\n"
        "state s = (0.6, 0.8)\n"
        "observer O\n");
    const ScenarioResult result = interpret(ast);
    REQUIRE(result.ledgers.size() == 1);
    CHECK(result.ledgers[0].facts().empty());
    CHECK(result.stability_checks.empty());
    CHECK(result.cross_checks.empty());
    CHECK(result.ledgers[0].state().ket().at(0) == Complex{0.6, 0});
}

TEST_CASE("decoherence with orthogonal records makes the fact stable for W") {
    const ScenarioAst ast = parse_ok(read_file(scenario_path("wigner_decohere.scn")));
    const ScenarioResult result = interpret(ast);
    REQUIRE(result.stability_checks.size() == 1);
    CHECK(result.stability_checks[0].report.stable);
    CHECK(result.stability_checks[0].report.deviation <= 1e-10);
    REQUIRE(result.cross_checks.size() == 1);
    CHECK(result.cross_checks[0].status == CrossCheckStatus::kAgree);
}

TEST_CASE("interpretation is deterministic and honors seed overrides") {
    const ScenarioAst ast = parse_ok(read_file(scenario_path("wigner.scn")));

    const std::string first = render_report(interpret(ast), ReportFormat::kJson);
    const std::string second = render_report(interpret(ast), ReportFormat::kJson);
    CHECK(first == second);

    InterpretOptions options;
    options.seed_override = 5;
    CHECK(interpret(ast, options).seed == 5);
}

TEST_CASE("a measure statement's seed pins its outcome across scenario seeds") {
    std::uint64_t forced = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        if (SplitMix64(seed).next_double() >= 0.64) {
            forced = seed;
            break;
        }
    }
    const std::string source =
        "system s dim 2\n"
        "state s = (0.6, 0.8)\n"
        "observer O\n"
        "measure O spin-z on s seed " +
        std::to_string(forced) + "\n";
    const ScenarioAst ast = parse_ok(source);
    for (std::uint64_t scenario_seed : {0ull, 1ull, 99ull}) {
        InterpretOptions options;
        options.seed_override = scenario_seed;
        const ScenarioResult result = interpret(ast, options);
        CHECK(result.ledgers[0].facts()[0].outcome == "↑");
    }
}

TEST_CASE("runtime violations carry the offending step's line") {
    const ScenarioAst ast = parse_ok(
        "system s dim 2\n"
        "apparatus A dim 3 ready 0\n"
        "observer O\n"
        "observer W\n"
        "state s = (0.6, 0.8)\n"
        "premeasure s with A using spin-z\n"
        "premeasure s with A using spin-z\n");
    try {
        interpret(ast);
        FAIL("expected a runtime violation");
    } catch (const RuntimeViolation& violation) {
        CHECK(violation.line() == 7);
        CHECK(std::string(violation.what()).find("ready") != std::string::npos);
    }
}

TEST_CASE("unitary-view rejects an observer who already interacted") {
    const ScenarioAst ast = parse_ok(
        "system s dim 2\n"
        "apparatus A dim 3 ready 0\n"
        "observer O\n"
        "observer W\n"
        "state s = (0.6, 0.8)\n"
        "premeasure s with A using spin-z\n"
        "measure W spin-z on s\n"
        "unitary-view W\n");
    try {
        interpret(ast);
        FAIL("expected a runtime violation");
    } catch (const RuntimeViolation& violation) {
        CHECK(violation.line() == 8);
        CHECK(std::string(violation.what()).find("no longer unitary") != std::string::npos);
    }
}

TEST_CASE("an observer embodied by the only system has nothing to describe") {
    const ScenarioAst ast = parse_ok(
        "system s dim 2\n"
        "observer s\n");
    CHECK_THROWS_AS(interpret(ast), RuntimeViolation);
}

TEST_CASE("cross-checks read each friend through its own apparatus") {
    const ScenarioAst ast = parse_ok(
        "system s dim 2\n"
        "apparatus A dim 3 ready 0\n"
        "apparatus B dim 3 ready 0\n"
        "observer A\n"
        "observer B\n"
        "observer W\n"
        "state s = (0.6, 0.8)\n"
        "premeasure s with A using spin-z\n"
        "premeasure s with B using spin-z\n"
        "measure A spin-z on s\n"
        "measure B spin-z on s\n"
        "cross-check W against A\n"
        "cross-check W against B\n");
    const ScenarioResult result = interpret(ast);
    REQUIRE(result.cross_checks.size() == 2);

    const PerspectiveLedger& w = result.ledgers[2];
    REQUIRE(!w.facts().empty());
    CHECK(w.facts()[0].system == "A");
    CHECK(result.cross_checks[0].status == CrossCheckStatus::kAgree);

    // A and B sampled independently; the second reading agrees exactly when
    // their private outcomes happened to coincide
    const std::string outcome_a = result.ledgers[0].facts()[0].outcome;
    const std::string outcome_b = result.ledgers[1].facts()[0].outcome;
    if (outcome_a == outcome_b) {
        CHECK(result.cross_checks[1].status == CrossCheckStatus::kAgree);
        REQUIRE(w.facts().size() == 2);
        CHECK(w.facts()[1].system == "B");
    } else {
        CHECK(result.cross_checks[1].status == CrossCheckStatus::kDisagree);
    }
}

TEST_CASE("library stability numbers match the naive oracle on every scenario") {
    for (const std::string& path : corpus_files()) {
        CAPTURE(path);
        const ScenarioAst ast = parse_ok(read_file(path));
        const ScenarioResult result = interpret(ast);
        for (const StabilityEntry& entry : result.stability_checks) {
            std::vector<std::vector<Complex>> projectors;
            for (const CMatrix& p : entry.partition_projectors) {
                projectors.emplace_back(p.entries().begin(), p.entries().end());
            }
            const double naive = oracle::stability_deviation_naive(
                entry.analyzed_rho.entries(), projectors, entry.target_projector.entries(),
                entry.analyzed_rho.rows());
            CHECK(std::abs(entry.report.deviation - naive) <= 1e-10);
        }
    }
}
