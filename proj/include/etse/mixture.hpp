#pragma once

// Gaussian-mixture estimators over channel-sequence hypotheses: the exact
// MMSE recursion and the two bounded approximations built on it.

#include <cstddef>
#include <optional>

#include "etse/kernels.hpp"

namespace etse {

/// How an arrived packet reweights the gamma_k = 1 hypotheses.
enum class WeightRule {
  /// Pr(s=1 | y) N(y; C m, C P C' + R): the exact posterior. The trigger
  /// factor is common to all hypotheses and cancels.
  kPredictiveDensity,
  /// Pr(s*gamma = 1 | hypothesis) with y integrated out. Ignores what the
  /// received value says about past drops; kept for comparison.
  kTransmitProbability,
};

struct MixtureOptions {
  /// Exact mode refuses to step past this time index (2^{cap+1} hypotheses).
  int horizon_cap = 20;
  /// Total Bayes-step weight at or below this raises kWeightUnderflow.
  double underflow_guard = 1e-300;
  WeightRule weight_rule = WeightRule::kPredictiveDensity;
};

/// Predicted mixture at k = 0: two hypotheses sharing N(0, Sigma0), index 0
/// (gamma_0 = 0) with weight p and index 1 with weight 1 - p.
MixtureEstimate init_mixture(const LinearGaussianModel& model, double p);

/// Propagates each posterior hypothesis through the dynamics and branches it
/// on the next channel bit: the drop child keeps the index with weight p*a,
/// the receive child gets index + 2^index_bits with weight (1-p)*a. Both
/// children share the propagated moments.
MixtureEstimate time_update(const MixtureEstimate& posterior,
                            const LinearGaussianModel& model, double p,
                            const MixtureOptions& options = {});

/// Bayes step. gamma_k = 0 hypotheses keep their moments and are weighted by
/// 1 - arrived; gamma_k = 1 hypotheses go through update_receive_branch and
/// are weighted per options.weight_rule. Weights are renormalized.
///
/// For the closed-loop scheduler `feedback` is the output prediction the
/// sensor triggered on; when absent it is C times the mixture predicted mean.
MixtureEstimate measurement_update(const MixtureEstimate& predicted,
                                   const PacketObservation& obs,
                                   const LinearGaussianModel& model,
                                   const TriggerParams& trigger,
                                   const std::optional<Vector>& feedback = {},
                                   const MixtureOptions& options = {});

/// Mixture mean and covariance (symmetrized).
EstimateSummary mixture_moments(const MixtureEstimate& mix);

/// Keeps only the newest `depth` channel bits of every index, moment-matching
/// hypotheses that agree on them. Groups with zero total weight collapse to
/// their unweighted moment match with weight zero.
MixtureEstimate merge_recent_bits(const MixtureEstimate& mix, int depth);

/// Greedy pairwise reduction to at most `max_components` components using
/// merge_cost. Ties break towards the lowest pair of positions. A reduced
/// mixture is re-indexed 0..size-1.
MixtureEstimate reduce_mixture(const MixtureEstimate& mix,
                               std::size_t max_components);

struct StepResult {
  MixtureEstimate state;
  EstimateSummary predicted;
  EstimateSummary posterior;
};

/// One exact MMSE step: init (when `previous` is empty) or time update, then
/// the measurement update and mixture moments. The closed-loop feedback
/// defaults to C times the predicted summary mean.
StepResult exact_step(const std::optional<MixtureEstimate>& previous,
                      const PacketObservation& obs,
                      const LinearGaussianModel& model,
                      const TriggerParams& trigger, double p,
                      const std::optional<Vector>& feedback = {},
                      const MixtureOptions& options = {});

/// exact_step followed by merge_recent_bits(depth).
StepResult gpb_step(const std::optional<MixtureEstimate>& previous,
                    const PacketObservation& obs,
                    const LinearGaussianModel& model,
                    const TriggerParams& trigger, double p, int depth,
                    const std::optional<Vector>& feedback = {},
                    const MixtureOptions& options = {});

/// exact_step followed by reduce_mixture(max_components).
StepResult reduce_step(const std::optional<MixtureEstimate>& previous,
                       const PacketObservation& obs,
                       const LinearGaussianModel& model,
                       const TriggerParams& trigger, double p,
                       std::size_t max_components,
                       const std::optional<Vector>& feedback = {},
                       const MixtureOptions& options = {});

}  // namespace etse
