#include "etse/trigger.hpp"

#include <cmath>
#include <string>

#include "etse/errors.hpp"

namespace etse {

const char* to_string(SchedulerKind kind) noexcept {
  return kind == SchedulerKind::kOpenLoop ? "open-loop" : "closed-loop";
}

TriggerParams::TriggerParams(SchedulerKind kind, Matrix weight)
    : kind_(kind), weight_(std::move(weight)) {
  require_pd(weight_, kind_ == SchedulerKind::kOpenLoop ? "trigger weight Y"
                                                        : "trigger weight Z");
  const Eigen::LLT<Matrix> llt = factor_spd(weight_, "trigger weight");
  weight_inverse_ = symmetrize(llt.solve(Matrix::Identity(
      weight_.rows(), weight_.cols())));
  weight_det_ = weight_.determinant();
}

double trigger_probability(const TriggerParams& params, const Vector& y,
                           const Vector& y_pred) {
  const Eigen::Index m = params.output_dim();
  if (y.size() != m) {
    throw Error(ErrorCode::kDimensionMismatch,
                "measurement size does not match trigger weight");
  }
  if (params.kind() == SchedulerKind::kOpenLoop) {
    return std::exp(-0.5 * y.dot(params.weight() * y));
  }
  if (y_pred.size() != m) {
    throw Error(ErrorCode::kDimensionMismatch,
                "closed-loop trigger needs an output prediction of size " +
                    std::to_string(m));
  }
  const Vector z = y - y_pred;
  return std::exp(-0.5 * z.dot(params.weight() * z));
}

double trigger_probability(const TriggerParams& params, const Vector& y) {
  return trigger_probability(params, y, Vector());
}

int decide_transmit(double phi, double zeta) {
  if (!(phi >= 0.0 && phi <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "trigger probability outside [0,1]");
  }
  if (!(zeta >= 0.0 && zeta <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "uniform draw outside [0,1]");
  }
  return zeta <= phi ? 0 : 1;
}

TriggerDecision sample_trigger(const TriggerParams& params, const Vector& y,
                               const Vector& y_pred, RandomSource& rng) {
  TriggerDecision d;
  d.phi = trigger_probability(params, y, y_pred);
  d.zeta = rng.uniform();
  d.s = decide_transmit(d.phi, d.zeta);
  return d;
}

double expected_hold_probability(const TriggerParams& params,
                                 const Vector& mean, const Matrix& cov) {
  const Eigen::Index m = params.output_dim();
  if (mean.size() != m || cov.rows() != m || cov.cols() != m) {
    throw Error(ErrorCode::kDimensionMismatch,
                "hold probability arguments do not match trigger weight");
  }
  // |cov W + I| = |cov + W^-1| |W|, reusing one Cholesky factor.
  const Matrix spread = symmetrize(cov + params.weight_inverse());
  const Eigen::LLT<Matrix> llt = factor_spd(spread, "W^-1 + cov");
  const double quad = mean.dot(llt.solve(mean));
  const Matrix& L = llt.matrixLLT();
  double log_det_spread = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) log_det_spread += 2.0 * std::log(L(i, i));
  const double log_det = log_det_spread + std::log(params.weight_determinant());
  return std::exp(-0.5 * quad - 0.5 * log_det);
}

}  // namespace etse
