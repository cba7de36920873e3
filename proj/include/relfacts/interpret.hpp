#ifndef RELFACTS_INTERPRET_HPP
#define RELFACTS_INTERPRET_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relfacts/errors.hpp"
#include "relfacts/facts.hpp"
#include "relfacts/perspectives.hpp"
#include "relfacts/scenario.hpp"

namespace relfacts::scn {

/// A module error raised while executing one step, annotated with the step's
/// source line.
class RuntimeViolation : public Error {
public:
    RuntimeViolation(std::size_t line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_ = 0;
};

struct InterpretOptions {
    std::optional<std::uint64_t> seed_override;
    double stability_threshold = kDefaultStabilityThreshold;
};

struct StabilityEntry {
    std::size_t line = 0;
    std::uint64_t step_index = 0;
    std::string observer;
    std::string partition;
    std::string target;
    StabilityReport report;
    double witness = 0.0;
    // Inputs of the check, kept so independent oracles can recompute it.
    CMatrix analyzed_rho;
    std::vector<CMatrix> partition_projectors;
    CMatrix target_projector;
};

struct CrossCheckEntry {
    std::size_t line = 0;
    std::uint64_t step_index = 0;
    std::string observer;
    std::string friend_observer;
    CrossCheckStatus status = CrossCheckStatus::kDisagree;
    std::string observer_outcome;  // set when the check produced a fact
    std::string friend_outcome;
    double probability = 0.0;        // checker's Born weight for that outcome
    double exact_correlation = 0.0;  // P(system and pointer labels agree), exact
};

struct ScenarioResult {
    std::string name;
    std::uint64_t seed = 0;
    double threshold = kDefaultStabilityThreshold;
    std::vector<PerspectiveLedger> ledgers;  // observer declaration order
    std::vector<StabilityEntry> stability_checks;
    std::vector<CrossCheckEntry> cross_checks;
};

// Executes the scenario's steps in order. Deterministic for a fixed seed;
// contract violations surface as RuntimeViolation carrying the step's line.
ScenarioResult interpret(const ScenarioAst& ast, const InterpretOptions& options = {});

}  // namespace relfacts::scn

#endif
