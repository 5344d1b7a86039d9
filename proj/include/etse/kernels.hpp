#pragma once

// Single-Gaussian building blocks shared by every estimator.

#include <span>

#include "etse/channel.hpp"
#include "etse/hypotheses.hpp"
#include "etse/model.hpp"
#include "etse/trigger.hpp"

namespace etse {

struct EstimateSummary {
  Vector x_hat;
  Matrix P;
  Stage stage = Stage::kPosterior;
  int time = 0;
};

struct WeightedGaussian {
  double weight = 0.0;
  Gaussian gaussian;
};

/// N(A m, A P A' + Q).
Gaussian predict(const Gaussian& g, const LinearGaussianModel& model);

/// Result of conditioning one Gaussian hypothesis with gamma_k = 1 on the
/// step's observation.
struct ReceiveBranch {
  Gaussian posterior;
  /// log Pr(hold | hypothesis) for a missing packet; log of the predictive
  /// density of y for an arrived packet.
  double log_evidence = 0.0;
  /// Pr(s*gamma = arrived | hypothesis), integrated over y.
  double outcome_probability = 0.0;
};

/// Measurement update of a gamma_k = 1 hypothesis.
///
/// A missing packet is a pseudo-measurement of y at the trigger centre c with
/// noise W^-1 (c = 0 open-loop, c = y_ref closed-loop); an arrived packet is an
/// ordinary measurement of y. Either way
///
///   S = C P C' + R + (1 - arrived) W^-1,   K = P C' S^-1,
///   m <- m + K (target - C m),             P <- P - K C P,
///
/// with target = y or c. `output_reference` is y_ref and is ignored for the
/// open-loop scheduler.
ReceiveBranch update_receive_branch(const Gaussian& prior,
                                    const PacketObservation& obs,
                                    const LinearGaussianModel& model,
                                    const TriggerParams& trigger,
                                    const Vector& output_reference);

/// Probability of observing s*gamma = s_gamma under a hypothesis whose newest
/// channel bit is `branch_bit`, marginalised over y ~ N(C m, C P C' + R):
///
///   branch 0: 1 - s_gamma
///   branch 1: s_gamma + (1 - 2 s_gamma) E[phi(y)]
///
/// `x_hat_pred` is the mixture predicted mean; the closed-loop trigger is
/// centred on C x_hat_pred. It is ignored for the open-loop scheduler.
double hypothesis_likelihood(int s_gamma, const Vector& m_pred,
                             const Matrix& P_pred,
                             const LinearGaussianModel& model,
                             const TriggerParams& trigger,
                             const Vector& x_hat_pred, int branch_bit);

/// As above with the closed-loop trigger centre given directly as an output
/// vector.
double outcome_probability(int s_gamma, int branch_bit, const Vector& m_pred,
                           const Matrix& P_pred,
                           const LinearGaussianModel& model,
                           const TriggerParams& trigger,
                           const Vector& output_reference);

/// Estimator that is told gamma_k: gamma = 0 leaves the prediction alone,
/// gamma = 1 applies update_receive_branch.
Gaussian oracle_step(const Gaussian& predicted, const PacketObservation& obs,
                     int gamma, const LinearGaussianModel& model,
                     const TriggerParams& trigger,
                     const Vector& output_reference);

/// Estimator that ignores the channel: every missing packet is treated as a
/// trigger hold.
Gaussian olset_step(const Gaussian& predicted, const PacketObservation& obs,
                    const LinearGaussianModel& model,
                    const TriggerParams& trigger,
                    const Vector& output_reference);

/// Moment match: weight w = sum w_i, mean = sum (w_i / w) m_i,
/// cov = sum (w_i / w) (P_i + (m_i - mean)(m_i - mean)'). Throws on an empty
/// list or a nonpositive total weight.
WeightedGaussian merge_moment_match(std::span<const WeightedGaussian> parts);

/// Cost of merging two components: weight-scaled trace growth,
/// tr((w_a + w_b) P_merged) - tr(w_a P_a + w_b P_b). Zero when both weights
/// are zero.
double merge_cost(const WeightedGaussian& a, const WeightedGaussian& b);

}  // namespace etse
