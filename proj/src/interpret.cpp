#include "relfacts/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "relfacts/rng.hpp"

namespace relfacts::scn {

namespace {

enum class PhysKind { kSystem, kApparatus, kEnvironment };

struct PhysSystem {
    std::string label;
    std::size_t dim = 0;
    PhysKind kind = PhysKind::kSystem;
    std::size_t ready = 0;
    std::vector<Complex> init;  // normalized amplitudes
};

// What a pre-measurement left behind on an apparatus: which observable drove
// it and which pointer slot each eigenvalue group occupies.
struct PremeasureEvent {
    std::string system;
    std::string apparatus;
    std::string observable;
    std::size_t apparatus_dim = 0;
    std::size_t ready = 0;
    std::vector<std::size_t> pointers;        // ascending group -> pointer index
    std::vector<std::string> group_labels;    // ascending group order
};

class Interpreter {
public:
    Interpreter(const ScenarioAst& ast, const InterpretOptions& options)
        : ast_(ast), options_(options) {}

    ScenarioResult run() {
        collect_declarations();
        build_ledgers();
        for (std::size_t i = 0; i < ast_.steps.size(); ++i) {
            const Step& step = ast_.steps[i];
            try {
                step_index_ = i;
                std::visit([this](const auto& node) { execute(node); }, step.node);
            } catch (const RuntimeViolation&) {
                throw;
            } catch (const Error& e) {
                throw RuntimeViolation(step.line, e.what());
            }
        }
        result_.name = ast_.name;
        result_.threshold = options_.stability_threshold;
        for (const std::string& name : observer_order_) {
            result_.ledgers.push_back(ledgers_.at(name));
        }
        return std::move(result_);
    }

private:
    void collect_declarations() {
        for (const Declaration& decl : ast_.declarations) {
            if (const auto* sys = std::get_if<SystemDecl>(&decl.node)) {
                physical_.push_back({sys->label, sys->dim, PhysKind::kSystem, 0, {}});
            } else if (const auto* app = std::get_if<ApparatusDecl>(&decl.node)) {
                physical_.push_back({app->label, app->dim, PhysKind::kApparatus, app->ready, {}});
            } else if (const auto* env = std::get_if<EnvironmentDecl>(&decl.node)) {
                physical_.push_back({env->label, env->dim, PhysKind::kEnvironment, 0, {}});
            } else if (const auto* obs = std::get_if<ObserverDecl>(&decl.node)) {
                observer_order_.push_back(obs->label);
            } else if (const auto* state = std::get_if<StateDecl>(&decl.node)) {
                find_physical(state->label).init = state->amplitudes;
            } else if (const auto* o = std::get_if<ObservableDecl>(&decl.node)) {
                observables_.emplace(o->name, *o);
            }
        }
    }

    PhysSystem& find_physical(const std::string& label) {
        for (PhysSystem& p : physical_) {
            if (p.label == label) return p;
        }
        throw UsageError("unknown system: " + label);
    }

    const PhysSystem& find_physical(const std::string& label) const {
        for (const PhysSystem& p : physical_) {
            if (p.label == label) return p;
        }
        throw UsageError("unknown system: " + label);
    }

    CVector initial_ket(const PhysSystem& phys) const {
        if (!phys.init.empty()) {
            return CVector(phys.init);
        }
        if (phys.kind == PhysKind::kApparatus) {
            return CVector::basis(phys.dim, phys.ready);
        }
        return CVector::basis(phys.dim, 0);
    }

    void build_ledgers() {
        result_.seed = options_.seed_override.value_or(ast_.default_seed.value_or(0));
        SplitMix64 master(result_.seed);
        for (const std::string& observer : observer_order_) {
            const std::uint64_t ledger_seed = master.next();
            SystemRegistry registry;
            std::vector<CVector> components;
            for (const PhysSystem& phys : physical_) {
                if (phys.label == observer) continue;  // no account of oneself
                registry.add_system(phys.label, phys.dim);
                components.push_back(initial_ket(phys));
            }
            if (registry.size() == 0) {
                throw RuntimeViolation(1, "observer '" + observer + "' has nothing to describe");
            }
            State state = product_state(registry, components);
            ledgers_.emplace(observer, PerspectiveLedger(observer, std::move(state), ledger_seed));
        }
    }

    // Instantiates an observable declaration (or builtin) against a registry,
    // acting on the given system.
    Observable system_observable(const std::string& name, const std::string& system,
                                 const SystemRegistry& registry) const {
        if (name == kBuiltinSpinZ) return spin_z(registry, system);
        if (name == kBuiltinPointer) return pointer_observable(registry, system);
        const ObservableDecl& decl = observables_.at(name);
        switch (decl.kind) {
            case ObservableKind::kSpinZ: return spin_z(registry, system, decl.name);
            case ObservableKind::kPointer: return pointer_observable(registry, system, decl.name);
            case ObservableKind::kMatrix: break;
        }
        return Observable(decl.name, registry, system, decl.matrix);
    }

    void execute(const PremeasureStmt& stmt) {
        const PhysSystem& apparatus = find_physical(stmt.apparatus);

        PremeasureEvent event;
        event.system = stmt.system;
        event.apparatus = stmt.apparatus;
        event.observable = stmt.observable;
        event.apparatus_dim = apparatus.dim;
        event.ready = apparatus.ready;

        bool described = false;
        for (const std::string& name : observer_order_) {
            PerspectiveLedger& ledger = ledgers_.at(name);
            const SystemRegistry& reg = ledger.state().registry();
            if (!reg.has_system(stmt.system) || !reg.has_system(stmt.apparatus)) continue;

            Observable obs = system_observable(stmt.observable, stmt.system, reg);
            if (!described) {
                event.pointers =
                    pointer_assignment(obs.group_count(), apparatus.dim, apparatus.ready);
                event.group_labels = obs.outcome_labels();
                described = true;
            }
            const EvolutionStep steps[] = {
                PremeasureStep{stmt.system, stmt.apparatus, std::move(obs), apparatus.ready}};
            ledger = unitary_view(ledger, steps);
        }
        if (!described) {
            // No spectator ledger: derive the pointer map from a throwaway registry
            // so a later cross-check can still label the pointer states.
            SystemRegistry reg;
            reg.add_system(stmt.system, find_physical(stmt.system).dim);
            Observable obs = system_observable(stmt.observable, stmt.system, reg);
            event.pointers = pointer_assignment(obs.group_count(), apparatus.dim, apparatus.ready);
            event.group_labels = obs.outcome_labels();
        }
        events_.push_back(std::move(event));
    }

    void execute(const MeasureStmt& stmt) {
        PerspectiveLedger& ledger = ledgers_.at(stmt.observer);
        const SystemRegistry& reg = ledger.state().registry();
        if (!reg.has_system(stmt.system)) {
            throw UsageError("observer '" + stmt.observer + "' does not describe system '" +
                             stmt.system + "'");
        }
        Observable obs = system_observable(stmt.observable, stmt.system, reg);
        if (stmt.seed) ledger = ledger.reseeded(*stmt.seed);
        MeasureResult result = measure(ledger, obs, step_index_);
        ledger = std::move(result.ledger);
    }

    void execute(const UnitaryViewStmt& stmt) {
        const PerspectiveLedger& ledger = ledgers_.at(stmt.observer);
        const SystemRegistry& reg = ledger.state().registry();
        for (const PremeasureEvent& event : events_) {
            for (const std::string& sys : {event.system, event.apparatus}) {
                if (reg.has_system(sys) && ledger.has_fact_on(sys)) {
                    throw PreconditionError("observer '" + stmt.observer +
                                            "' already holds a fact about '" + sys +
                                            "'; its account is no longer unitary");
                }
            }
        }
        // The unitary description itself was applied when the interactions
        // happened; this step asserts the observer is still a bystander.
    }

    void execute(const DecohereStmt& stmt) {
        const PhysSystem& target = find_physical(stmt.target);
        const PhysSystem& env = find_physical(stmt.env);
        const std::size_t ready =
            target.kind == PhysKind::kApparatus ? target.ready : kNoReady;
        const std::vector<CVector> vectors =
            branch_vectors(target.dim, ready, env.dim, stmt.overlap);
        for (const std::string& name : observer_order_) {
            PerspectiveLedger& ledger = ledgers_.at(name);
            const SystemRegistry& reg = ledger.state().registry();
            if (!reg.has_system(stmt.target) || !reg.has_system(stmt.env)) continue;
            ledger = ledger.with_state(decohere(ledger.state(), stmt.target, stmt.env, vectors));
        }
    }

    static constexpr std::size_t kNoReady = static_cast<std::size_t>(-1);

    // One environment vector per target basis state. The first branch records
    // into e0; each later branch records into overlap*e0 + sqrt(1-overlap^2)
    // along a fresh axis, so `overlap` is exactly the inner product between
    // the first branch's record and every later one.
    static std::vector<CVector> branch_vectors(std::size_t target_dim, std::size_t ready,
                                               std::size_t env_dim, double overlap) {
        std::vector<CVector> vectors;
        std::size_t fresh = 1;
        bool first_seen = false;
        for (std::size_t j = 0; j < target_dim; ++j) {
            if (j == ready) {
                vectors.push_back(CVector::basis(env_dim, 0));  // never occupied
                continue;
            }
            if (!first_seen) {
                vectors.push_back(CVector::basis(env_dim, 0));
                first_seen = true;
                continue;
            }
            if (fresh >= env_dim) throw SizingError("environment too small for branch count");
            CVector v(env_dim);
            v.at(0) = overlap;
            v.at(fresh) = std::sqrt(std::max(0.0, 1.0 - overlap * overlap));
            ++fresh;
            vectors.push_back(std::move(v));
        }
        return vectors;
    }

    void execute(const StabilityStmt& stmt) {
        const PerspectiveLedger& ledger = ledgers_.at(stmt.observer);
        const SystemRegistry& reg = ledger.state().registry();

        std::vector<std::string> keep;
        for (std::size_t i = 0; i < reg.size(); ++i) {
            if (find_physical(reg.label(i)).kind != PhysKind::kEnvironment) {
                keep.push_back(reg.label(i));
            }
        }
        if (keep.empty()) throw UsageError("nothing left to analyze after tracing environments");

        // The stable-fact question is asked of the non-environment part of the
        // observer's account, with every environment traced out.
        const bool traced = keep.size() != reg.size();
        const State analyzed =
            traced ? ledger.state().reduced(keep) : ledger.state();

        SystemRegistry areg;
        for (const std::string& label : keep) areg.add_system(label, find_physical(label).dim);
        areg.add_group(stmt.observer, keep);

        const Observable partition_obs = analysis_observable(stmt.partition, stmt.observer, areg);
        const ObservableDecl& target_decl = observables_.at(stmt.target);
        CMatrix target = analysis_matrix(target_decl, stmt.observer, areg);

        std::vector<CMatrix> projectors;
        for (std::size_t g = 0; g < partition_obs.group_count(); ++g) {
            projectors.push_back(partition_obs.embedded_projector(g));
        }
        FactPartition partition(projectors, target);

        StabilityEntry entry;
        entry.line = current_line(stmt);
        entry.step_index = step_index_;
        entry.observer = stmt.observer;
        entry.partition = stmt.partition;
        entry.target = stmt.target;
        entry.report = stability_deviation(analyzed, partition, options_.stability_threshold);
        entry.witness = interference_witness(analyzed, partition);
        entry.analyzed_rho = analyzed.density();
        entry.partition_projectors = std::move(projectors);
        entry.target_projector = std::move(target);
        result_.stability_checks.push_back(std::move(entry));
    }

    Observable analysis_observable(const std::string& name, const std::string& observer,
                                   const SystemRegistry& areg) const {
        const ObservableDecl& decl = observables_.at(name);
        const std::string& target = resolve_analysis_target(decl, observer);
        switch (decl.kind) {
            case ObservableKind::kSpinZ: return spin_z(areg, target, decl.name);
            case ObservableKind::kPointer: return pointer_observable(areg, target, decl.name);
            case ObservableKind::kMatrix: break;
        }
        return Observable(decl.name, areg, target, decl.matrix);
    }

    CMatrix analysis_matrix(const ObservableDecl& decl, const std::string& observer,
                            const SystemRegistry& areg) const {
        const Observable obs = analysis_observable(decl.name, observer, areg);
        return obs.embedded_matrix();
    }

    const std::string& resolve_analysis_target(const ObservableDecl& decl,
                                               const std::string& observer) const {
        const bool physical = std::any_of(physical_.begin(), physical_.end(),
                                          [&](const PhysSystem& p) { return p.label == decl.target; });
        if (physical) return decl.target;
        if (decl.target != observer) {
            throw ConfigError("observable '" + decl.name + "' is declared on observer '" +
                              decl.target + "' and cannot be used for '" + observer + "'");
        }
        return decl.target;  // the group named after the observer spans the whole view
    }

    void execute(const CrossCheckStmt& stmt) {
        PerspectiveLedger& checker = ledgers_.at(stmt.observer);
        const PerspectiveLedger& friendly = ledgers_.at(stmt.friend_observer);
        if (friendly.facts().empty()) {
            throw PreconditionError("observer '" + stmt.friend_observer +
                                    "' has no recorded facts to check against");
        }
        const FactRecord friend_fact = friendly.facts().back();

        const PremeasureEvent* event = nullptr;
        for (const PremeasureEvent& e : events_) {
            if (e.system == friend_fact.system && e.observable == friend_fact.observable) {
                event = &e;
            }
        }
        // an observer embodied by an apparatus is read through that apparatus
        for (const PremeasureEvent& e : events_) {
            if (e.apparatus == stmt.friend_observer && e.system == friend_fact.system &&
                e.observable == friend_fact.observable) {
                event = &e;
            }
        }
        if (event == nullptr) {
            throw PreconditionError("no pre-measurement recorded '" + friend_fact.observable +
                                    "' on '" + friend_fact.system + "' into an apparatus");
        }
        const SystemRegistry& reg = checker.state().registry();
        if (!reg.has_system(event->apparatus)) {
            throw UsageError("observer '" + stmt.observer + "' does not describe apparatus '" +
                             event->apparatus + "'");
        }

        const Observable pointer_obs = event_pointer_observable(*event, reg);
        const Observable system_obs =
            system_observable(friend_fact.observable, friend_fact.system, reg);

        auto resolver = [this, &friendly](const FactRecord& fact) -> std::optional<Observable> {
            const SystemRegistry& freg = friendly.state().registry();
            if (!freg.has_system(fact.system)) return std::nullopt;
            if (fact.observable != kBuiltinSpinZ && fact.observable != kBuiltinPointer &&
                !observables_.count(fact.observable)) {
                return std::nullopt;
            }
            return system_observable(fact.observable, fact.system, freg);
        };

        CrossCheckEntry entry;
        entry.line = current_line(stmt);
        entry.step_index = step_index_;
        entry.observer = stmt.observer;
        entry.friend_observer = stmt.friend_observer;
        entry.friend_outcome = friend_fact.outcome;
        entry.exact_correlation =
            exact_agreement_probability(checker.state(), system_obs, pointer_obs);

        CrossCheckResult result =
            cross_check(checker, friendly, friend_fact, pointer_obs, resolver, step_index_);
        entry.status = result.status;
        if (result.fact) {
            entry.observer_outcome = result.fact->outcome;
            entry.probability = result.fact->probability;
        }
        checker = std::move(result.ledger);
        result_.cross_checks.push_back(std::move(entry));
    }

    // Reads the apparatus in the pointer basis, labelling each occupied
    // pointer slot with the outcome it records.
    Observable event_pointer_observable(const PremeasureEvent& event,
                                        const SystemRegistry& registry) const {
        const std::size_t d = event.apparatus_dim;
        CMatrix m(d, d);
        std::vector<std::string> labels(d);
        for (std::size_t i = 0; i < d; ++i) {
            m.at(i, i) = static_cast<double>(i);
            labels[i] = "Φ" + std::to_string(i);
        }
        for (std::size_t g = 0; g < event.pointers.size(); ++g) {
            labels[event.pointers[g]] = event.group_labels[g];
        }
        return Observable("pointer(" + event.apparatus + ")", registry, event.apparatus,
                          std::move(m), std::move(labels));
    }

    template <typename Stmt>
    std::size_t current_line(const Stmt&) const {
        return ast_.steps[step_index_].line;
    }

    const ScenarioAst& ast_;
    const InterpretOptions& options_;

    std::vector<PhysSystem> physical_;
    std::vector<std::string> observer_order_;
    std::map<std::string, ObservableDecl> observables_;
    std::map<std::string, PerspectiveLedger> ledgers_;
    std::vector<PremeasureEvent> events_;
    std::uint64_t step_index_ = 0;
    ScenarioResult result_;
};

}  // namespace

ScenarioResult interpret(const ScenarioAst& ast, const InterpretOptions& options) {
    Interpreter interpreter(ast, options);
    return interpreter.run();
}

}  // namespace relfacts::scn
