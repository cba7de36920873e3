#include "relfacts/facts.hpp"

#include <algorithm>
#include <cmath>

#include "relfacts/errors.hpp"

namespace relfacts {

AmplitudeChain::AmplitudeChain(std::vector<Complex> w_ba, std::vector<Complex> w_cb)
    : w_ba_(std::move(w_ba)), w_cb_(std::move(w_cb)) {
    if (w_ba_.empty()) throw UsageError("amplitude chain needs at least one alternative");
    if (w_ba_.size() != w_cb_.size()) {
        throw UsageError("amplitude chain legs must have equal length");
    }
    double weight = 0.0;
    for (const Complex& z : w_ba_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw UsageError("non-finite amplitude");
        }
        weight += std::norm(z);
    }
    for (const Complex& z : w_cb_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw UsageError("non-finite amplitude");
        }
    }
    if (weight > 1.0 + 1e-10) {
        throw UsageError("first-leg amplitudes exceed unit total weight");
    }
}

// Each term is |W(c,b_i) W(b_i,a)|^2, accumulated from the product so that a
// single-alternative chain reproduces p_unitary bit for bit.
double p_collapse(const AmplitudeChain& chain) {
    double p = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        p += std::norm(chain.w_cb()[i] * chain.w_ba()[i]);
    }
    return p;
}

double p_unitary(const AmplitudeChain& chain) {
    Complex amp{0.0, 0.0};
    for (std::size_t i = 0; i < chain.size(); ++i) {
        amp += chain.w_cb()[i] * chain.w_ba()[i];
    }
    return std::norm(amp);
}

double interference_deficit(const AmplitudeChain& chain) {
    return std::abs(p_unitary(chain) - p_collapse(chain));
}

FactPartition::FactPartition(std::vector<CMatrix> projectors, CMatrix target)
    : projectors_(std::move(projectors)), target_(std::move(target)) {
    if (projectors_.empty()) throw UsageError("partition needs at least one projector");
    const std::size_t n = target_.rows();
    if (!target_.is_square()) throw UsageError("target projector must be square");
    for (const CMatrix& p : projectors_) {
        if (!p.is_square() || p.rows() != n) {
            throw UsageError("partition projectors must share the target's dimension");
        }
        if (!p.is_hermitian(kInvariantTol)) {
            throw ContractViolation("partition projector is not Hermitian");
        }
    }
    CMatrix sum(n, n);
    for (const CMatrix& p : projectors_) sum = sum + p;
    if ((sum - CMatrix::identity(n)).max_abs() > kInvariantTol) {
        throw ContractViolation("partition projectors do not sum to the identity");
    }
    for (std::size_t i = 0; i < projectors_.size(); ++i) {
        for (std::size_t j = i + 1; j < projectors_.size(); ++j) {
            if ((projectors_[i] * projectors_[j]).max_abs() > kInvariantTol) {
                throw ContractViolation("partition projectors are not orthogonal");
            }
        }
    }
    if (!target_.is_hermitian(kInvariantTol) ||
        (target_ * target_ - target_).max_abs() > 1e-8) {
        throw ContractViolation("target is not a projector");
    }
}

StabilityReport stability_deviation(const State& state, const FactPartition& partition,
                                    double threshold) {
    if (partition.dim() != state.dim()) {
        throw UsageError("partition dimension does not match the state");
    }
    const CMatrix rho = state.density();
    const CMatrix& b = partition.target();

    StabilityReport report;
    report.p_direct = (b * rho).trace().real();
    report.p_composed = 0.0;
    for (const CMatrix& a : partition.projectors()) {
        const CMatrix branch = a * rho * a;
        if (branch.trace().real() < kNullBranchTol) continue;  // never happened
        report.p_composed += (b * branch).trace().real();
    }
    report.deviation = std::abs(report.p_direct - report.p_composed);
    report.stable = report.deviation <= threshold;
    return report;
}

double interference_witness(const State& state, const FactPartition& partition) {
    if (partition.dim() != state.dim()) {
        throw UsageError("partition dimension does not match the state");
    }
    const CMatrix rho = state.density();
    double witness = 0.0;
    const auto projs = partition.projectors();
    for (std::size_t i = 0; i < projs.size(); ++i) {
        for (std::size_t j = 0; j < projs.size(); ++j) {
            if (i == j) continue;
            witness = std::max(witness, (projs[i] * rho * projs[j]).max_abs());
        }
    }
    return witness;
}

State decohere(const State& state, const std::string& target, const std::string& env,
               std::span<const CVector> env_vectors) {
    const SystemRegistry& reg = state.registry();
    const std::size_t target_dim = reg.target_span(target).dim;
    const std::size_t env_dim = reg.target_span(env).dim;
    if (env_vectors.size() != target_dim) {
        throw UsageError("need exactly one environment vector per pointer branch");
    }
    for (const CVector& e : env_vectors) {
        if (e.dim() != env_dim) throw UsageError("environment vector dimension mismatch");
        if (std::abs(e.norm() - 1.0) > 1e-8) {
            throw UsageError("environment vectors must be normalized");
        }
    }
    {
        const std::string labels[] = {env};
        const State red = state.reduced(labels);
        CMatrix expected(env_dim, env_dim);
        expected.at(0, 0) = 1.0;
        if ((red.rho() - expected).max_abs() > 1e-8) {
            throw PreconditionError("environment '" + env + "' is not in its ready basis state");
        }
    }

    const CVector env_ready = CVector::basis(env_dim, 0);
    CMatrix coupler(state.dim(), state.dim());
    for (std::size_t j = 0; j < target_dim; ++j) {
        const CVector branch = CVector::basis(target_dim, j);
        const CMatrix record = embed(outer(env_vectors[j], env_ready), reg, env);
        coupler = coupler + embed(outer(branch, branch), reg, target) * record;
    }
    if (state.is_pure()) {
        return State::pure(reg, apply(coupler, state.ket()));
    }
    return State::mixed(reg, coupler * state.rho() * dagger(coupler));
}

std::map<std::string, FactStatus> classify_fact(const FactRecord& fact,
                                                std::span<const PerspectiveLedger> ledgers,
                                                const FactPartition& partition,
                                                double threshold) {
    std::map<std::string, FactStatus> out;
    for (const PerspectiveLedger& ledger : ledgers) {
        if (ledger.observer() == fact.observer) {
            out[ledger.observer()] = FactStatus::kRelative;
            continue;
        }
        const StabilityReport report = stability_deviation(ledger.state(), partition, threshold);
        out[ledger.observer()] = report.stable ? FactStatus::kStable : FactStatus::kNeither;
    }
    return out;
}

AmplitudeChain chain_from_state(const State& state, const FactPartition& partition) {
    if (!state.is_pure()) throw UsageError("chain extraction needs a pure state");
    if (partition.dim() != state.dim()) {
        throw UsageError("partition dimension does not match the state");
    }
    if (std::abs(partition.target().trace().real() - 1.0) > 1e-6) {
        throw UsageError("chain extraction needs a rank-1 target projector");
    }

    // Recover the target ray from its densest column.
    const CMatrix& b = partition.target();
    std::size_t best_col = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < b.cols(); ++j) {
        const double d = std::abs(b.at(j, j));
        if (d > best) {
            best = d;
            best_col = j;
        }
    }
    CVector ray(b.rows());
    for (std::size_t i = 0; i < b.rows(); ++i) ray.at(i) = b.at(i, best_col);
    ray = ray.normalized();

    std::vector<Complex> w_ba, w_cb;
    for (const CMatrix& a : partition.projectors()) {
        const CVector branch = apply(a, state.ket());
        const double weight = branch.norm();
        if (weight < 1e-15) {
            w_ba.emplace_back(0.0, 0.0);
            w_cb.emplace_back(0.0, 0.0);
            continue;
        }
        w_ba.emplace_back(weight, 0.0);
        w_cb.push_back(inner(ray, branch) / weight);
    }
    return AmplitudeChain(std::move(w_ba), std::move(w_cb));
}

}  // namespace relfacts
