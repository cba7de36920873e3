#ifndef RELFACTS_PERSPECTIVES_HPP
#define RELFACTS_PERSPECTIVES_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "relfacts/qstate.hpp"
#include "relfacts/rng.hpp"

namespace relfacts {

/// One relative fact: the outcome a specific observer obtained for a specific
/// variable, with the Born probability it carried at that moment.
struct FactRecord {
    std::string observer;
    std::string system;
    std::string observable;
    std::string outcome;
    double eigenvalue = 0.0;
    double probability = 0.0;
    std::uint64_t step = 0;

    bool operator==(const FactRecord&) const = default;
};

/// One observer's account: the state of everything that observer describes
/// (never including the observer itself) plus the ordered log of facts
/// relative to it. Value-semantic; operations return updated copies.
class PerspectiveLedger {
public:
    PerspectiveLedger(std::string observer, State state, std::uint64_t rng_seed);

    const std::string& observer() const { return observer_; }
    const State& state() const { return state_; }
    const std::vector<FactRecord>& facts() const { return facts_; }
    std::uint64_t rng_seed() const { return rng_seed_; }

    PerspectiveLedger with_state(State state) const;
    PerspectiveLedger reseeded(std::uint64_t seed) const;

    bool has_fact_on(const std::string& system) const;
    std::uint64_t next_step() const;

private:
    std::string observer_;
    State state_;
    std::vector<FactRecord> facts_;
    std::uint64_t rng_seed_ = 0;
    SplitMix64 rng_;

    friend struct LedgerOps;
};

// Apparatus basis index assigned to each eigenvalue group (groups in their
// canonical ascending order). Groups take pointer slots in descending
// eigenvalue order, skipping the ready index, so that for spin-z with ready 0
// the +1/2 outcome drives the first pointer position.
std::vector<std::size_t> pointer_assignment(std::size_t group_count, std::size_t apparatus_dim,
                                            std::size_t ready_index);

// von Neumann pre-measurement: entangles the observable's eigenbranches of
// `system` with distinct pointer states of `apparatus`. The apparatus must be
// in the ready basis state; the map is unitary on that subspace.
State premeasure(const State& state, const std::string& system, const std::string& apparatus,
                 const Observable& obs, std::size_t ready_index);

struct MeasureResult {
    PerspectiveLedger ledger;
    FactRecord fact;
};

// Projective measurement with Born sampling from the ledger's seeded stream;
// collapses the ledger state and appends the fact.
MeasureResult measure(const PerspectiveLedger& ledger, const Observable& obs,
                      std::optional<std::uint64_t> step = std::nullopt);

// Inverse-CDF selection over group probabilities in ascending-eigenvalue
// order. Throws DegenerateMeasurement when every probability is below 1e-12.
std::size_t sample_group(std::span<const double> probabilities, double u);

struct UnitaryStep {
    std::string target;
    CMatrix op;
};
struct PremeasureStep {
    std::string system;
    std::string apparatus;
    Observable obs;
    std::size_t ready_index = 0;
};
using EvolutionStep = std::variant<UnitaryStep, PremeasureStep>;

// Purely unitary account of interactions the observer did not take part in:
// no collapse, no facts. Requires that the observer holds no facts about the
// systems the steps involve.
PerspectiveLedger unitary_view(const PerspectiveLedger& ledger,
                               std::span<const EvolutionStep> steps);

enum class CrossCheckStatus { kAgree, kDisagree, kInformationDestroyed };

struct CrossCheckResult {
    PerspectiveLedger ledger;
    CrossCheckStatus status = CrossCheckStatus::kDisagree;
    std::optional<FactRecord> fact;
};

using ObservableResolver = std::function<std::optional<Observable>(const FactRecord&)>;

// True when the friend performed a later measurement on the same system whose
// observable does not commute with the checked fact's observable.
bool destroys_information(const PerspectiveLedger& friend_ledger, const FactRecord& fact,
                          const ObservableResolver& resolve);

// The checking observer reads the friend's pointer variable. Internal
// consistency makes the reading reproduce the friend's recorded outcome
// (provided the information survived); the fact is logged with the checker's
// own Born probability and the checker's state collapses accordingly.
CrossCheckResult cross_check(const PerspectiveLedger& checker,
                             const PerspectiveLedger& friend_ledger,
                             const FactRecord& friend_fact, const Observable& pointer_obs,
                             const ObservableResolver& resolve = {},
                             std::optional<std::uint64_t> step = std::nullopt);

// P(system outcome label == pointer outcome label) computed exactly from the
// state, summing joint projector traces over label-matched group pairs.
double exact_agreement_probability(const State& state, const Observable& system_obs,
                                   const Observable& pointer_obs);

}  // namespace relfacts

#endif
