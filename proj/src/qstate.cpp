#include "relfacts/qstate.hpp"

#include <algorithm>
#include <cmath>

#include "relfacts/errors.hpp"

namespace relfacts {

SystemRegistry::SystemRegistry(std::vector<std::pair<std::string, std::size_t>> systems) {
    for (const auto& [label, dim] : systems) add_system(label, dim);
}

void SystemRegistry::add_system(const std::string& label, std::size_t dim) {
    if (label.empty()) throw UsageError("subsystem label must be non-empty");
    if (dim == 0) throw UsageError("subsystem dimension must be positive");
    if (has_target(label)) throw UsageError("duplicate label: " + label);
    std::size_t total = dim;
    for (const auto& [_, d] : systems_) {
        if (total > kMaxTotalDim / d) throw SizingError("registry total dimension exceeds 2^20");
        total *= d;
    }
    systems_.emplace_back(label, dim);
}

void SystemRegistry::add_group(const std::string& label, std::span<const std::string> members) {
    if (label.empty()) throw UsageError("group label must be non-empty");
    if (members.empty()) throw UsageError("group must cover at least one subsystem");
    if (has_target(label)) throw UsageError("duplicate label: " + label);
    const std::size_t first = index_of(members.front());
    std::size_t dim = 1;
    for (std::size_t k = 0; k < members.size(); ++k) {
        const std::size_t idx = first + k;
        if (idx >= systems_.size() || systems_[idx].first != members[k]) {
            throw UsageError("group members must be contiguous subsystems in registry order");
        }
        dim *= systems_[idx].second;
    }
    groups_.emplace_back(label, TargetSpan{first, members.size(), dim});
}

std::size_t SystemRegistry::total_dim() const {
    std::size_t total = 1;
    for (const auto& [_, d] : systems_) total *= d;
    return total;
}

std::vector<std::size_t> SystemRegistry::dims() const {
    std::vector<std::size_t> out;
    out.reserve(systems_.size());
    for (const auto& [_, d] : systems_) out.push_back(d);
    return out;
}

bool SystemRegistry::has_system(const std::string& label) const {
    return std::any_of(systems_.begin(), systems_.end(),
                       [&](const auto& s) { return s.first == label; });
}

bool SystemRegistry::has_target(const std::string& label) const {
    if (has_system(label)) return true;
    return std::any_of(groups_.begin(), groups_.end(),
                       [&](const auto& g) { return g.first == label; });
}

std::size_t SystemRegistry::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < systems_.size(); ++i) {
        if (systems_[i].first == label) return i;
    }
    throw UsageError("unknown subsystem: " + label);
}

SystemRegistry::TargetSpan SystemRegistry::target_span(const std::string& label) const {
    for (std::size_t i = 0; i < systems_.size(); ++i) {
        if (systems_[i].first == label) return TargetSpan{i, 1, systems_[i].second};
    }
    for (const auto& [glabel, span] : groups_) {
        if (glabel == label) return span;
    }
    throw UsageError("unknown subsystem or group: " + label);
}

CMatrix embed(const CMatrix& op, const SystemRegistry& registry, const std::string& target) {
    const SystemRegistry::TargetSpan span = registry.target_span(target);
    if (!op.is_square() || op.rows() != span.dim) {
        throw UsageError("operator side does not match target dimension");
    }
    std::size_t before = 1;
    for (std::size_t i = 0; i < span.first; ++i) before *= registry.dim(i);
    std::size_t after = 1;
    for (std::size_t i = span.first + span.count; i < registry.size(); ++i) {
        after *= registry.dim(i);
    }
    CMatrix out = op;
    if (before > 1) out = kron(CMatrix::identity(before), out);
    if (after > 1) out = kron(out, CMatrix::identity(after));
    return out;
}

State State::pure(SystemRegistry registry, CVector psi) {
    if (psi.dim() != registry.total_dim()) {
        throw UsageError("ket dimension does not match registry");
    }
    if (std::abs(psi.norm() - 1.0) > kInvariantTol) {
        throw ContractViolation("pure state is not normalized within 1e-10");
    }
    return State(std::move(registry), std::move(psi));
}

State State::mixed(SystemRegistry registry, CMatrix rho) {
    if (!rho.is_square() || rho.rows() != registry.total_dim()) {
        throw UsageError("density matrix side does not match registry");
    }
    if (!rho.is_hermitian(kInvariantTol)) {
        throw ContractViolation("density matrix is not Hermitian within 1e-10");
    }
    if (std::abs(rho.trace() - Complex{1.0, 0.0}) > kInvariantTol) {
        throw ContractViolation("density matrix trace is not 1 within 1e-10");
    }
    const std::vector<double> eigs = hermitian_eigenvalues(rho);
    if (eigs.front() < -1e-8) {
        throw ContractViolation("density matrix is not positive semidefinite");
    }
    return State(std::move(registry), std::move(rho));
}

std::size_t State::dim() const { return registry_.total_dim(); }

const CVector& State::ket() const {
    if (!is_pure()) throw UsageError("state is not pure");
    return std::get<CVector>(form_);
}

const CMatrix& State::rho() const {
    if (is_pure()) throw UsageError("state is not mixed");
    return std::get<CMatrix>(form_);
}

CMatrix State::density() const {
    if (is_pure()) {
        const CVector& psi = std::get<CVector>(form_);
        return outer(psi, psi);
    }
    return std::get<CMatrix>(form_);
}

double State::purity() const {
    if (is_pure()) return 1.0;
    const CMatrix& r = std::get<CMatrix>(form_);
    double p = 0.0;
    for (std::size_t i = 0; i < r.rows(); ++i) {
        for (std::size_t j = 0; j < r.cols(); ++j) {
            p += (r.at(i, j) * r.at(j, i)).real();
        }
    }
    return p;
}

State State::reduced(std::span<const std::string> keep_labels) const {
    std::vector<std::size_t> keep;
    keep.reserve(keep_labels.size());
    for (const std::string& label : keep_labels) keep.push_back(registry_.index_of(label));
    std::sort(keep.begin(), keep.end());

    const std::vector<std::size_t> dims = registry_.dims();
    CMatrix traced = partial_trace(density(), dims, keep);

    SystemRegistry sub;
    for (std::size_t idx : keep) sub.add_system(registry_.label(idx), registry_.dim(idx));
    return State::mixed(std::move(sub), std::move(traced));
}

State to_density(const State& state) {
    if (!state.is_pure()) return state;
    return State::mixed(state.registry(), state.density());
}

State product_state(const SystemRegistry& registry, std::span<const CVector> components) {
    if (components.size() != registry.size()) {
        throw UsageError("need exactly one component per subsystem");
    }
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (components[i].dim() != registry.dim(i)) {
            throw UsageError("component dimension mismatch for subsystem " + registry.label(i));
        }
        if (std::abs(components[i].norm() - 1.0) > 1e-8) {
            throw UsageError("component for subsystem " + registry.label(i) +
                             " is not normalized within 1e-8");
        }
    }
    CVector chain = components[0];
    for (std::size_t i = 1; i < components.size(); ++i) chain = kron(chain, components[i]);
    return State::pure(registry, chain.normalized());
}

Observable::Observable(std::string name, SystemRegistry registry, std::string target,
                       CMatrix matrix, std::vector<std::string> outcome_labels,
                       double merge_tol)
    : name_(std::move(name)),
      registry_(std::move(registry)),
      target_(std::move(target)),
      matrix_(std::move(matrix)) {
    const SystemRegistry::TargetSpan span = registry_.target_span(target_);
    if (!matrix_.is_square() || matrix_.rows() != span.dim) {
        throw UsageError("observable matrix side does not match its target");
    }
    if (!matrix_.is_hermitian(kInvariantTol)) {
        throw ContractViolation("observable matrix is not Hermitian within 1e-10");
    }
    decomposition_ = spectral_decompose(matrix_, merge_tol);
    if (outcome_labels.empty()) {
        char buf[32];
        for (const EigenGroup& g : decomposition_.groups) {
            std::snprintf(buf, sizeof buf, "%.6g", g.eigenvalue);
            outcome_labels.emplace_back(buf);
        }
    }
    if (outcome_labels.size() != decomposition_.groups.size()) {
        throw UsageError("outcome labels must cover every eigenvalue group");
    }
    outcome_labels_ = std::move(outcome_labels);
}

std::optional<std::size_t> Observable::group_of_label(const std::string& label) const {
    for (std::size_t g = 0; g < outcome_labels_.size(); ++g) {
        if (outcome_labels_[g] == label) return g;
    }
    return std::nullopt;
}

CMatrix Observable::embedded_matrix() const { return embed(matrix_, registry_, target_); }

CMatrix Observable::embedded_projector(std::size_t group) const {
    return embed(decomposition_.groups[group].projector, registry_, target_);
}

Observable spin_z(const SystemRegistry& registry, const std::string& target, std::string name) {
    CMatrix m = CMatrix::from_rows({{0.5, 0.0}, {0.0, -0.5}});
    // ascending group order: -1/2 first
    return Observable(std::move(name), registry, target, std::move(m), {"↓", "↑"});
}

Observable pointer_observable(const SystemRegistry& registry, const std::string& target,
                              std::string name) {
    const std::size_t d = registry.target_span(target).dim;
    CMatrix m(d, d);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < d; ++i) {
        m.at(i, i) = static_cast<double>(i);
        labels.push_back("Φ" + std::to_string(i));
    }
    return Observable(std::move(name), registry, target, std::move(m), std::move(labels));
}

double expectation(const State& state, const Observable& obs) {
    if (!(state.registry() == obs.registry())) {
        throw UsageError("state and observable registries do not match");
    }
    const CMatrix op = obs.embedded_matrix();
    if (state.is_pure()) {
        const CVector& psi = state.ket();
        return inner(psi, apply(op, psi)).real();
    }
    return (state.rho() * op).trace().real();
}

}  // namespace relfacts
