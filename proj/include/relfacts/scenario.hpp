#ifndef RELFACTS_SCENARIO_HPP
#define RELFACTS_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "relfacts/tensor.hpp"

namespace relfacts::scn {

/// First problem found in a scenario source, with a 1-based position.
struct ParseError {
    std::size_t line = 1;
    std::size_t column = 1;
    std::string message;
    std::vector<std::string> expected;
};

struct SystemDecl {
    std::string label;
    std::size_t dim = 0;
    bool operator==(const SystemDecl&) const = default;
};

struct ApparatusDecl {
    std::string label;
    std::size_t dim = 0;
    std::size_t ready = 0;
    bool operator==(const ApparatusDecl&) const = default;
};

struct EnvironmentDecl {
    std::string label;
    std::size_t dim = 0;
    bool operator==(const EnvironmentDecl&) const = default;
};

struct ObserverDecl {
    std::string label;
    bool operator==(const ObserverDecl&) const = default;
};

struct StateDecl {
    std::string label;
    std::vector<Complex> amplitudes;  // stored normalized
    double applied_norm = 1.0;        // norm the parser divided out (not part of equality)

    bool operator==(const StateDecl& other) const {
        return label == other.label && amplitudes == other.amplitudes;
    }
};

enum class ObservableKind { kSpinZ, kPointer, kMatrix };

struct ObservableDecl {
    std::string name;
    std::string target;  // physical system label or observer label
    ObservableKind kind = ObservableKind::kMatrix;
    CMatrix matrix;      // only for kMatrix

    bool operator==(const ObservableDecl& other) const;
};

using DeclarationNode = std::variant<SystemDecl, ApparatusDecl, EnvironmentDecl, ObserverDecl,
                                     StateDecl, ObservableDecl>;

struct Declaration {
    std::size_t line = 0;
    DeclarationNode node;
    bool operator==(const Declaration& other) const { return node == other.node; }
};

struct PremeasureStmt {
    std::string system, apparatus, observable;
    bool operator==(const PremeasureStmt&) const = default;
};

struct MeasureStmt {
    std::string observer, observable, system;
    std::optional<std::uint64_t> seed;
    bool operator==(const MeasureStmt&) const = default;
};

struct UnitaryViewStmt {
    std::string observer;
    bool operator==(const UnitaryViewStmt&) const = default;
};

struct DecohereStmt {
    std::string target, env;
    double overlap = 0.0;
    bool operator==(const DecohereStmt&) const = default;
};

struct StabilityStmt {
    std::string observer, partition, target;
    bool operator==(const StabilityStmt&) const = default;
};

struct CrossCheckStmt {
    std::string observer, friend_observer;
    bool operator==(const CrossCheckStmt&) const = default;
};

using StepNode = std::variant<PremeasureStmt, MeasureStmt, UnitaryViewStmt, DecohereStmt,
                              StabilityStmt, CrossCheckStmt>;

struct Step {
    std::size_t line = 0;
    StepNode node;
    bool operator==(const Step& other) const { return node == other.node; }
};

struct ScenarioAst {
    std::string name;
    std::optional<std::uint64_t> default_seed;
    std::vector<Declaration> declarations;
    std::vector<Step> steps;

    bool operator==(const ScenarioAst& other) const {
        return name == other.name && default_seed == other.default_seed &&
               declarations == other.declarations && steps == other.steps;
    }
};

// Names usable as observables without a declaration.
inline constexpr std::string_view kBuiltinSpinZ = "spin-z";
inline constexpr std::string_view kBuiltinPointer = "pointer";

using ParseResult = std::variant<ScenarioAst, ParseError>;

// Parses and statically validates a scenario. Comments run from '#' to end of
// line; every label must be declared before a statement uses it. Never throws:
// the first problem comes back as a positioned ParseError.
ParseResult parse(std::string_view source);

// Canonical text form; parse(print(ast)) == ast.
std::string print(const ScenarioAst& ast);

// Shared syntax for "c1,c2,..." amplitude lists (used by the CLI oracles).
std::variant<std::vector<Complex>, ParseError> parse_complex_list(std::string_view text);

// %.17g, the precision every report and printed scenario uses.
std::string format_double(double value);
std::string format_complex(Complex value);

}  // namespace relfacts::scn

#endif
