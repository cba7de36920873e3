#ifndef RELFACTS_QSTATE_HPP
#define RELFACTS_QSTATE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "relfacts/tensor.hpp"

namespace relfacts {

inline constexpr std::size_t kMaxTotalDim = std::size_t{1} << 20;

/// Ordered list of named subsystems. Declaration order fixes the Kronecker
/// layout: the first subsystem is the most significant tensor factor.
/// A group names a contiguous run of subsystems so that observables can act
/// on a composite (e.g. a system-plus-apparatus "lab") without special cases.
class SystemRegistry {
public:
    struct TargetSpan {
        std::size_t first = 0;   // index of the first subsystem covered
        std::size_t count = 0;   // number of subsystems covered
        std::size_t dim = 0;     // product of the covered dimensions
    };

    SystemRegistry() = default;
    explicit SystemRegistry(std::vector<std::pair<std::string, std::size_t>> systems);

    void add_system(const std::string& label, std::size_t dim);
    void add_group(const std::string& label, std::span<const std::string> members);

    std::size_t size() const { return systems_.size(); }
    const std::string& label(std::size_t i) const { return systems_[i].first; }
    std::size_t dim(std::size_t i) const { return systems_[i].second; }
    std::size_t total_dim() const;
    std::vector<std::size_t> dims() const;

    bool has_system(const std::string& label) const;
    bool has_target(const std::string& label) const;  // system or group
    std::size_t index_of(const std::string& label) const;
    TargetSpan target_span(const std::string& label) const;

    // Registries are compatible when their subsystems agree; groups are
    // layout annotations and do not participate.
    bool operator==(const SystemRegistry& other) const { return systems_ == other.systems_; }

private:
    std::vector<std::pair<std::string, std::size_t>> systems_;
    std::vector<std::pair<std::string, TargetSpan>> groups_;
};

// Lift an operator acting on one subsystem (or group) to the full space.
CMatrix embed(const CMatrix& op, const SystemRegistry& registry, const std::string& target);

/// A pure or mixed state over a registry. Public constructors enforce the
/// invariants: unit norm for kets; Hermitian, positive semidefinite, unit
/// trace for density matrices.
class State {
public:
    static State pure(SystemRegistry registry, CVector psi);
    static State mixed(SystemRegistry registry, CMatrix rho);

    bool is_pure() const { return std::holds_alternative<CVector>(form_); }
    const SystemRegistry& registry() const { return registry_; }
    std::size_t dim() const;

    const CVector& ket() const;   // UsageError when mixed
    const CMatrix& rho() const;   // UsageError when pure

    CMatrix density() const;      // |psi><psi| for pure states, copy otherwise
    double purity() const;        // tr(rho^2)

    // Partial trace onto the named subsystems (registry order preserved).
    State reduced(std::span<const std::string> keep_labels) const;

private:
    State(SystemRegistry registry, std::variant<CVector, CMatrix> form)
        : registry_(std::move(registry)), form_(std::move(form)) {}

    SystemRegistry registry_;
    std::variant<CVector, CMatrix> form_;
};

State to_density(const State& state);

// Kronecker chain of one normalized component per subsystem, re-normalized.
State product_state(const SystemRegistry& registry, std::span<const CVector> components);

/// Hermitian operator on one subsystem (or group) with a grouped spectral
/// decomposition and one outcome label per eigenvalue group, in ascending
/// eigenvalue order.
class Observable {
public:
    Observable(std::string name, SystemRegistry registry, std::string target, CMatrix matrix,
               std::vector<std::string> outcome_labels = {}, double merge_tol = kMergeTol);

    const std::string& name() const { return name_; }
    const std::string& target() const { return target_; }
    const SystemRegistry& registry() const { return registry_; }
    const CMatrix& matrix() const { return matrix_; }
    const SpectralDecomposition& decomposition() const { return decomposition_; }
    const std::vector<std::string>& outcome_labels() const { return outcome_labels_; }

    std::size_t group_count() const { return decomposition_.groups.size(); }
    double eigenvalue(std::size_t group) const { return decomposition_.groups[group].eigenvalue; }
    const std::string& outcome_label(std::size_t group) const { return outcome_labels_[group]; }
    std::optional<std::size_t> group_of_label(const std::string& label) const;

    CMatrix embedded_matrix() const;
    CMatrix embedded_projector(std::size_t group) const;

    double min_eigenvalue() const { return decomposition_.groups.front().eigenvalue; }
    double max_eigenvalue() const { return decomposition_.groups.back().eigenvalue; }

private:
    std::string name_;
    SystemRegistry registry_;
    std::string target_;
    CMatrix matrix_;
    SpectralDecomposition decomposition_;
    std::vector<std::string> outcome_labels_;
};

// diag(+1/2, -1/2) with outcome labels "↑"/"↓" (hbar = 1).
Observable spin_z(const SystemRegistry& registry, const std::string& target,
                  std::string name = "spin-z");

// diag(0, 1, ..., d-1) with outcome labels "Φ0".."Φ{d-1}".
Observable pointer_observable(const SystemRegistry& registry, const std::string& target,
                              std::string name = "pointer");

// tr(rho * embedded observable); the imaginary residue is discarded.
double expectation(const State& state, const Observable& obs);

}  // namespace relfacts

#endif
