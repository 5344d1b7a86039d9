#pragma once

#include "etse/linalg.hpp"
#include "etse/random.hpp"

namespace etse {

enum class SchedulerKind { kOpenLoop, kClosedLoop };

const char* to_string(SchedulerKind kind) noexcept;

/// Stochastic event trigger. The sensor holds (s = 0) with probability
///
///   phi = exp(-1/2 q' W q),
///
/// where q = y for the open-loop scheduler (W = Y) and q = y - y_pred for the
/// closed-loop scheduler (W = Z), y_pred being the estimator's fed-back output
/// prediction. The weight must be symmetric positive definite.
class TriggerParams {
 public:
  TriggerParams(SchedulerKind kind, Matrix weight);

  SchedulerKind kind() const { return kind_; }
  const Matrix& weight() const { return weight_; }
  const Matrix& weight_inverse() const { return weight_inverse_; }
  Eigen::Index output_dim() const { return weight_.rows(); }
  double weight_determinant() const { return weight_det_; }

 private:
  SchedulerKind kind_;
  Matrix weight_;
  Matrix weight_inverse_;
  double weight_det_;
};

struct TriggerDecision {
  int s = 0;
  double phi = 1.0;
  double zeta = 0.0;
};

/// Hold probability phi. `y_pred` is ignored for the open-loop scheduler.
double trigger_probability(const TriggerParams& params, const Vector& y,
                           const Vector& y_pred);

/// Open-loop shorthand.
double trigger_probability(const TriggerParams& params, const Vector& y);

/// s = 0 iff zeta <= phi. Both arguments must lie in [0, 1].
int decide_transmit(double phi, double zeta);

TriggerDecision sample_trigger(const TriggerParams& params, const Vector& y,
                               const Vector& y_pred, RandomSource& rng);

/// Closed form of E[phi] when the triggering quantity q is N(mean, cov):
///
///   exp(-1/2 mean' (W^-1 + cov)^-1 mean) / sqrt(|cov W + I|).
double expected_hold_probability(const TriggerParams& params,
                                 const Vector& mean, const Matrix& cov);

}  // namespace etse
