#include "etse/kernels.hpp"

#include <cmath>
#include <numbers>

#include "etse/errors.hpp"

namespace etse {

namespace {

double log_det_from_llt(const Eigen::LLT<Matrix>& llt) {
  const Matrix& L = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
  return 2.0 * s;
}

void require_observation(const PacketObservation& obs, Eigen::Index m) {
  if (!obs.consistent()) {
    throw Error(ErrorCode::kInvalidArgument,
                "packet observation payload does not match arrival flag");
  }
  if (obs.payload && obs.payload->size() != m) {
    throw Error(ErrorCode::kDimensionMismatch,
                "packet payload has the wrong dimension");
  }
}

Vector trigger_centre(const TriggerParams& trigger,
                      const Vector& output_reference, Eigen::Index m) {
  if (trigger.kind() == SchedulerKind::kOpenLoop) return Vector::Zero(m);
  if (output_reference.size() != m) {
    throw Error(ErrorCode::kDimensionMismatch,
                "closed-loop update needs an output reference of size " +
                    std::to_string(m));
  }
  return output_reference;
}

}  // namespace

Gaussian predict(const Gaussian& g, const LinearGaussianModel& model) {
  return {model.A * g.mean,
          symmetrize(model.A * g.covariance * model.A.transpose() + model.Q)};
}

ReceiveBranch update_receive_branch(const Gaussian& prior,
                                    const PacketObservation& obs,
                                    const LinearGaussianModel& model,
                                    const TriggerParams& trigger,
                                    const Vector& output_reference) {
  const Eigen::Index m = model.output_dim();
  require_observation(obs, m);
  if (trigger.output_dim() != m) {
    throw Error(ErrorCode::kDimensionMismatch,
                "trigger weight does not match the model output");
  }
  const Matrix& C = model.C;
  const Matrix CP = C * prior.covariance;
  const Matrix M = symmetrize(CP * C.transpose() + model.R);
  const Vector predicted_output = C * prior.mean;

  ReceiveBranch out;
  if (obs.arrived == 1) {
    const Eigen::LLT<Matrix> llt = factor_spd(M, "innovation covariance");
    const Matrix gain = llt.solve(CP).transpose();
    const Vector innovation = *obs.payload - predicted_output;
    out.posterior.mean = prior.mean + gain * innovation;
    out.posterior.covariance = symmetrize(prior.covariance - gain * CP);
    out.log_evidence = -0.5 * innovation.dot(llt.solve(innovation)) -
                       0.5 * log_det_from_llt(llt) -
                       0.5 * static_cast<double>(m) *
                           std::log(2.0 * std::numbers::pi);
    const Vector centre = trigger_centre(trigger, output_reference, m);
    out.outcome_probability =
        1.0 - expected_hold_probability(trigger, predicted_output - centre, M);
    return out;
  }

  const Vector centre = trigger_centre(trigger, output_reference, m);
  const Matrix S = symmetrize(M + trigger.weight_inverse());
  const Eigen::LLT<Matrix> llt = factor_spd(S, "held-measurement covariance");
  const Matrix gain = llt.solve(CP).transpose();
  const Vector offset = predicted_output - centre;
  out.posterior.mean = prior.mean - gain * offset;
  out.posterior.covariance = symmetrize(prior.covariance - gain * CP);
  out.log_evidence = -0.5 * offset.dot(llt.solve(offset)) -
                     0.5 * (log_det_from_llt(llt) +
                            std::log(trigger.weight_determinant()));
  out.outcome_probability = std::exp(out.log_evidence);
  return out;
}

double outcome_probability(int s_gamma, int branch_bit, const Vector& m_pred,
                           const Matrix& P_pred,
                           const LinearGaussianModel& model,
                           const TriggerParams& trigger,
                           const Vector& output_reference) {
  if ((s_gamma != 0 && s_gamma != 1) || (branch_bit != 0 && branch_bit != 1)) {
    throw Error(ErrorCode::kInvalidArgument,
                "s_gamma and branch bit must be 0 or 1");
  }
  if (branch_bit == 0) return 1.0 - s_gamma;
  const Eigen::Index m = model.output_dim();
  if (m_pred.size() != model.state_dim() || P_pred.rows() != model.state_dim() ||
      P_pred.cols() != model.state_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "hypothesis moments do not match the model state");
  }
  const Matrix M = symmetrize(model.C * P_pred * model.C.transpose() + model.R);
  const Vector centre = trigger_centre(trigger, output_reference, m);
  const double hold =
      expected_hold_probability(trigger, model.C * m_pred - centre, M);
  return s_gamma + (1.0 - 2.0 * s_gamma) * hold;
}

double hypothesis_likelihood(int s_gamma, const Vector& m_pred,
                             const Matrix& P_pred,
                             const LinearGaussianModel& model,
                             const TriggerParams& trigger,
                             const Vector& x_hat_pred, int branch_bit) {
  Vector reference;
  if (trigger.kind() == SchedulerKind::kClosedLoop) {
    if (x_hat_pred.size() != model.state_dim()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "closed-loop likelihood needs the predicted state estimate");
    }
    reference = model.C * x_hat_pred;
  }
  return outcome_probability(s_gamma, branch_bit, m_pred, P_pred, model,
                             trigger, reference);
}

Gaussian oracle_step(const Gaussian& predicted, const PacketObservation& obs,
                     int gamma, const LinearGaussianModel& model,
                     const TriggerParams& trigger,
                     const Vector& output_reference) {
  if (gamma != 0 && gamma != 1) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must be 0 or 1");
  }
  if (gamma == 0) {
    if (obs.arrived != 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "a packet cannot arrive over a dropped channel");
    }
    return predicted;
  }
  return update_receive_branch(predicted, obs, model, trigger, output_reference)
      .posterior;
}

Gaussian olset_step(const Gaussian& predicted, const PacketObservation& obs,
                    const LinearGaussianModel& model,
                    const TriggerParams& trigger,
                    const Vector& output_reference) {
  return update_receive_branch(predicted, obs, model, trigger, output_reference)
      .posterior;
}

WeightedGaussian merge_moment_match(std::span<const WeightedGaussian> parts) {
  if (parts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot merge an empty mixture");
  }
  if (parts.size() == 1) return parts.front();
  double total = 0.0;
  for (const auto& p : parts) {
    if (!(p.weight >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "negative mixture weight");
    }
    total += p.weight;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot merge components with zero total weight");
  }
  const Eigen::Index n = parts.front().gaussian.mean.size();
  WeightedGaussian merged;
  merged.weight = total;
  merged.gaussian.mean = Vector::Zero(n);
  for (const auto& p : parts) {
    if (p.weight == 0.0) continue;
    merged.gaussian.mean += (p.weight / total) * p.gaussian.mean;
  }
  merged.gaussian.covariance = Matrix::Zero(n, n);
  for (const auto& p : parts) {
    if (p.weight == 0.0) continue;
    const Vector d = p.gaussian.mean - merged.gaussian.mean;
    merged.gaussian.covariance +=
        (p.weight / total) * (p.gaussian.covariance + d * d.transpose());
  }
  merged.gaussian.covariance = symmetrize(merged.gaussian.covariance);
  return merged;
}

double merge_cost(const WeightedGaussian& a, const WeightedGaussian& b) {
  const double total = a.weight + b.weight;
  if (!(total > 0.0)) return 0.0;
  const WeightedGaussian pair[] = {a, b};
  const WeightedGaussian merged = merge_moment_match(pair);
  return (total * merged.gaussian.covariance).trace() -
         (a.weight * a.gaussian.covariance + b.weight * b.gaussian.covariance)
             .trace();
}

}  // namespace etse
