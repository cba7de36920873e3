#include "relfacts/perspectives.hpp"

#include <algorithm>
#include <cmath>

#include "relfacts/errors.hpp"

namespace relfacts {

// Grants the measurement operations access to ledger internals so the public
// type can stay immutable from the outside.
struct LedgerOps {
    static SplitMix64& rng(PerspectiveLedger& ledger) { return ledger.rng_; }
    static void set_state(PerspectiveLedger& ledger, State state) {
        ledger.state_ = std::move(state);
    }
    static void append(PerspectiveLedger& ledger, FactRecord fact) {
        if (!ledger.facts_.empty() && fact.step <= ledger.facts_.back().step) {
            throw UsageError("fact step indices must be strictly increasing");
        }
        ledger.facts_.push_back(std::move(fact));
    }
};

PerspectiveLedger::PerspectiveLedger(std::string observer, State state, std::uint64_t rng_seed)
    : observer_(std::move(observer)),
      state_(std::move(state)),
      rng_seed_(rng_seed),
      rng_(rng_seed) {
    if (observer_.empty()) throw UsageError("observer label must be non-empty");
    if (state_.registry().has_system(observer_)) {
        throw ContractViolation("an observer does not describe itself: '" + observer_ +
                                "' appears in its own state registry");
    }
}

PerspectiveLedger PerspectiveLedger::with_state(State state) const {
    if (state.registry().has_system(observer_)) {
        throw ContractViolation("an observer does not describe itself: '" + observer_ +
                                "' appears in the replacement state");
    }
    PerspectiveLedger out = *this;
    out.state_ = std::move(state);
    return out;
}

PerspectiveLedger PerspectiveLedger::reseeded(std::uint64_t seed) const {
    PerspectiveLedger out = *this;
    out.rng_seed_ = seed;
    out.rng_ = SplitMix64(seed);
    return out;
}

bool PerspectiveLedger::has_fact_on(const std::string& system) const {
    return std::any_of(facts_.begin(), facts_.end(),
                       [&](const FactRecord& f) { return f.system == system; });
}

std::uint64_t PerspectiveLedger::next_step() const {
    return facts_.empty() ? 0 : facts_.back().step + 1;
}

std::vector<std::size_t> pointer_assignment(std::size_t group_count, std::size_t apparatus_dim,
                                            std::size_t ready_index) {
    if (ready_index >= apparatus_dim) throw UsageError("ready index out of range");
    if (apparatus_dim < group_count + 1) {
        throw SizingError("apparatus needs at least one pointer state per outcome plus ready");
    }
    std::vector<std::size_t> free_slots;
    for (std::size_t i = 0; i < apparatus_dim && free_slots.size() < group_count; ++i) {
        if (i != ready_index) free_slots.push_back(i);
    }
    // ascending group g has descending rank G-1-g
    std::vector<std::size_t> assignment(group_count);
    for (std::size_t g = 0; g < group_count; ++g) {
        assignment[g] = free_slots[group_count - 1 - g];
    }
    return assignment;
}

namespace {

State apply_operator(const State& state, const CMatrix& op) {
    if (state.is_pure()) {
        return State::pure(state.registry(), apply(op, state.ket()));
    }
    return State::mixed(state.registry(), op * state.rho() * dagger(op));
}

void require_ready(const State& state, const std::string& subsystem, std::size_t ready_index,
                   const char* who) {
    const std::string labels[] = {subsystem};
    const State red = state.reduced(labels);
    const std::size_t d = red.dim();
    if (ready_index >= d) throw UsageError("ready index out of range");
    CMatrix expected(d, d);
    expected.at(ready_index, ready_index) = 1.0;
    if ((red.rho() - expected).max_abs() > 1e-8) {
        throw PreconditionError(std::string(who) + " '" + subsystem +
                                "' is not in its ready basis state");
    }
}

std::vector<double> group_probabilities(const State& state, const Observable& obs) {
    std::vector<double> probs(obs.group_count(), 0.0);
    for (std::size_t g = 0; g < obs.group_count(); ++g) {
        const CMatrix proj = obs.embedded_projector(g);
        double p;
        if (state.is_pure()) {
            const double n = apply(proj, state.ket()).norm();
            p = n * n;
        } else {
            p = (proj * state.rho()).trace().real();
        }
        probs[g] = std::max(p, 0.0);
    }
    return probs;
}

State collapse_onto(const State& state, const CMatrix& proj, double probability) {
    if (state.is_pure()) {
        CVector branch = apply(proj, state.ket());
        const double n = branch.norm();
        for (std::size_t i = 0; i < branch.dim(); ++i) branch.at(i) /= n;
        return State::pure(state.registry(), std::move(branch));
    }
    CMatrix post = proj * state.rho() * proj;
    return State::mixed(state.registry(), post.scaled(1.0 / probability));
}

}  // namespace

State premeasure(const State& state, const std::string& system, const std::string& apparatus,
                 const Observable& obs, std::size_t ready_index) {
    if (!(obs.registry() == state.registry())) {
        throw UsageError("observable registry does not match the state");
    }
    if (obs.target() != system) {
        throw UsageError("observable does not act on system '" + system + "'");
    }
    const std::size_t app_dim = state.registry().target_span(apparatus).dim;
    const std::vector<std::size_t> pointers =
        pointer_assignment(obs.group_count(), app_dim, ready_index);
    require_ready(state, apparatus, ready_index, "apparatus");

    const CVector ready = CVector::basis(app_dim, ready_index);
    CMatrix entangler(state.dim(), state.dim());
    for (std::size_t g = 0; g < obs.group_count(); ++g) {
        const CMatrix lift = embed(outer(CVector::basis(app_dim, pointers[g]), ready),
                                   state.registry(), apparatus);
        entangler = entangler + obs.embedded_projector(g) * lift;
    }
    return apply_operator(state, entangler);
}

std::size_t sample_group(std::span<const double> probabilities, double u) {
    double total = 0.0;
    std::size_t last_live = probabilities.size();
    for (std::size_t g = 0; g < probabilities.size(); ++g) {
        if (probabilities[g] >= 1e-12) last_live = g;
        total += probabilities[g];
    }
    if (last_live == probabilities.size()) {
        throw DegenerateMeasurement("every outcome probability is below 1e-12");
    }
    double acc = 0.0;
    for (std::size_t g = 0; g < probabilities.size(); ++g) {
        acc += probabilities[g];
        if (u < acc && probabilities[g] >= 1e-12) return g;
    }
    return last_live;  // u fell into the rounding gap at the top of the CDF
}

MeasureResult measure(const PerspectiveLedger& ledger, const Observable& obs,
                      std::optional<std::uint64_t> step) {
    if (!(obs.registry() == ledger.state().registry())) {
        throw UsageError("observable registry does not match the ledger state");
    }
    const std::vector<double> probs = group_probabilities(ledger.state(), obs);

    PerspectiveLedger next = ledger;
    const double u = LedgerOps::rng(next).next_double();
    const std::size_t g = sample_group(probs, u);

    LedgerOps::set_state(next, collapse_onto(ledger.state(), obs.embedded_projector(g), probs[g]));
    FactRecord fact{ledger.observer(), obs.target(),       obs.name(), obs.outcome_label(g),
                    obs.eigenvalue(g), probs[g],           step.value_or(ledger.next_step())};
    LedgerOps::append(next, fact);
    return MeasureResult{std::move(next), std::move(fact)};
}

PerspectiveLedger unitary_view(const PerspectiveLedger& ledger,
                               std::span<const EvolutionStep> steps) {
    const SystemRegistry& reg = ledger.state().registry();
    for (const EvolutionStep& step : steps) {
        std::vector<std::string> involved;
        if (const auto* u = std::get_if<UnitaryStep>(&step)) {
            const auto span = reg.target_span(u->target);
            for (std::size_t i = 0; i < span.count; ++i) involved.push_back(reg.label(span.first + i));
        } else {
            const auto& pm = std::get<PremeasureStep>(step);
            involved = {pm.system, pm.apparatus};
        }
        for (const std::string& sys : involved) {
            if (ledger.has_fact_on(sys)) {
                throw PreconditionError("observer '" + ledger.observer() +
                                        "' already holds a fact about '" + sys +
                                        "'; its account of that system is no longer unitary");
            }
        }
    }

    State state = ledger.state();
    for (const EvolutionStep& step : steps) {
        if (const auto* u = std::get_if<UnitaryStep>(&step)) {
            const CMatrix lifted = embed(u->op, reg, u->target);
            if ((dagger(lifted) * lifted - CMatrix::identity(lifted.rows())).max_abs() > 1e-8) {
                throw UsageError("evolution step operator is not unitary");
            }
            state = apply_operator(state, lifted);
        } else {
            const auto& pm = std::get<PremeasureStep>(step);
            state = premeasure(state, pm.system, pm.apparatus, pm.obs, pm.ready_index);
        }
    }
    return ledger.with_state(std::move(state));
}

bool destroys_information(const PerspectiveLedger& friend_ledger, const FactRecord& fact,
                          const ObservableResolver& resolve) {
    if (!resolve) return false;
    const std::optional<Observable> original = resolve(fact);
    if (!original) return false;
    for (const FactRecord& later : friend_ledger.facts()) {
        if (later.step <= fact.step || later.system != fact.system) continue;
        const std::optional<Observable> other = resolve(later);
        if (!other) continue;
        if (other->matrix().rows() != original->matrix().rows()) continue;
        const CMatrix commutator =
            original->matrix() * other->matrix() - other->matrix() * original->matrix();
        if (commutator.max_abs() > kInvariantTol) return true;
    }
    return false;
}

CrossCheckResult cross_check(const PerspectiveLedger& checker,
                             const PerspectiveLedger& friend_ledger,
                             const FactRecord& friend_fact, const Observable& pointer_obs,
                             const ObservableResolver& resolve,
                             std::optional<std::uint64_t> step) {
    if (!(pointer_obs.registry() == checker.state().registry())) {
        throw UsageError("pointer observable registry does not match the checker's state");
    }
    const std::optional<std::size_t> group = pointer_obs.group_of_label(friend_fact.outcome);
    if (!group) {
        throw ConfigError("pointer observable carries no outcome label matching '" +
                          friend_fact.outcome + "'");
    }
    if (destroys_information(friend_ledger, friend_fact, resolve)) {
        return CrossCheckResult{checker, CrossCheckStatus::kInformationDestroyed, std::nullopt};
    }

    const std::vector<double> probs = group_probabilities(checker.state(), pointer_obs);
    const double p = probs[*group];
    if (p < 1e-12) {
        // The checker's state assigns no weight to the friend's branch.
        return CrossCheckResult{checker, CrossCheckStatus::kDisagree, std::nullopt};
    }

    PerspectiveLedger next = checker;
    LedgerOps::set_state(next,
                         collapse_onto(checker.state(), pointer_obs.embedded_projector(*group), p));
    FactRecord fact{checker.observer(),
                    pointer_obs.target(),
                    pointer_obs.name(),
                    pointer_obs.outcome_label(*group),
                    pointer_obs.eigenvalue(*group),
                    p,
                    step.value_or(checker.next_step())};
    LedgerOps::append(next, fact);
    return CrossCheckResult{std::move(next), CrossCheckStatus::kAgree, std::move(fact)};
}

double exact_agreement_probability(const State& state, const Observable& system_obs,
                                   const Observable& pointer_obs) {
    if (!(system_obs.registry() == state.registry()) ||
        !(pointer_obs.registry() == state.registry())) {
        throw UsageError("observable registries do not match the state");
    }
    const CMatrix rho = state.density();
    double agree = 0.0;
    for (std::size_t g = 0; g < system_obs.group_count(); ++g) {
        for (std::size_t h = 0; h < pointer_obs.group_count(); ++h) {
            if (system_obs.outcome_label(g) != pointer_obs.outcome_label(h)) continue;
            const CMatrix joint = system_obs.embedded_projector(g) * pointer_obs.embedded_projector(h);
            agree += (joint * rho).trace().real();
        }
    }
    return agree;
}

}  // namespace relfacts
