#ifndef RELFACTS_FACTS_HPP
#define RELFACTS_FACTS_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

#include "relfacts/perspectives.hpp"
#include "relfacts/qstate.hpp"

namespace relfacts {

// Below this probability a branch is treated as never happening, so its
// conditional contribution is zero rather than 0/0.
inline constexpr double kNullBranchTol = 1e-14;
inline constexpr double kDefaultStabilityThreshold = 1e-6;

/// Transition amplitudes through N intermediate alternatives: w_ba[i] is the
/// amplitude from the initial fact a to alternative b_i, w_cb[i] from b_i to
/// the final fact c. Chains may be subnormalized.
class AmplitudeChain {
public:
    AmplitudeChain(std::vector<Complex> w_ba, std::vector<Complex> w_cb);

    std::size_t size() const { return w_ba_.size(); }
    std::span<const Complex> w_ba() const { return w_ba_; }
    std::span<const Complex> w_cb() const { return w_cb_; }

private:
    std::vector<Complex> w_ba_;
    std::vector<Complex> w_cb_;
};

// Probability of c given a when each intermediate alternative actualizes:
// sum_i |W(c,b_i)|^2 |W(b_i,a)|^2.
double p_collapse(const AmplitudeChain& chain);

// Probability of c given a under linear evolution: |sum_i W(c,b_i) W(b_i,a)|^2.
double p_unitary(const AmplitudeChain& chain);

// |p_unitary - p_collapse|: the surviving cross terms between alternatives.
double interference_deficit(const AmplitudeChain& chain);

/// Mutually exclusive alternatives a_i (projectors summing to the identity)
/// together with the projector of the fact b whose probability is composed
/// through them.
class FactPartition {
public:
    FactPartition(std::vector<CMatrix> projectors, CMatrix target);

    std::span<const CMatrix> projectors() const { return projectors_; }
    const CMatrix& target() const { return target_; }
    std::size_t dim() const { return target_.rows(); }

private:
    std::vector<CMatrix> projectors_;
    CMatrix target_;
};

struct StabilityReport {
    double p_direct = 0.0;    // tr(B rho)
    double p_composed = 0.0;  // sum_i tr(B A_i rho A_i)
    double deviation = 0.0;   // |p_direct - p_composed|
    bool stable = false;
};

// Compares the direct probability of the target fact with its composition
// through the partition; the fact is stable when they agree within threshold.
StabilityReport stability_deviation(const State& state, const FactPartition& partition,
                                    double threshold = kDefaultStabilityThreshold);

// Largest inter-branch coherence: max over i != j of the max-norm of
// A_i rho A_j. Zero exactly when rho is block diagonal in the partition.
double interference_witness(const State& state, const FactPartition& partition);

// Correlates each basis branch of `target` with the given environment vector:
// |j>_target |ready>_env -> |j>_target |E_j>_env. Overlapping environment
// vectors leave which-path information unrecorded; orthogonal ones erase the
// off-diagonal terms of the traced state entirely.
State decohere(const State& state, const std::string& target, const std::string& env,
               std::span<const CVector> env_vectors);

enum class FactStatus { kRelative, kStable, kNeither };

// A fact is relative to the observer whose log holds it; for any other
// observer it is stable exactly when that observer's state composes the
// target probability through the partition without interference corrections.
std::map<std::string, FactStatus> classify_fact(const FactRecord& fact,
                                                std::span<const PerspectiveLedger> ledgers,
                                                const FactPartition& partition,
                                                double threshold = kDefaultStabilityThreshold);

// Amplitude chain equivalent to a pure state and a rank-1 target fact:
// w_ba[i] is the weight of branch A_i psi, w_cb[i] the amplitude from the
// normalized branch to the target ray. Bridges the projector and chain
// formulations so they can be checked against each other.
AmplitudeChain chain_from_state(const State& state, const FactPartition& partition);

}  // namespace relfacts

#endif
