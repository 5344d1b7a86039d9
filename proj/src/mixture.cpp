#include "etse/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "etse/errors.hpp"

namespace etse {

namespace {

void require_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "drop probability outside [0,1]");
  }
}

void normalize(MixtureEstimate& mix, double guard) {
  const double total = mix.total_weight();
  if (!(total > guard) || !std::isfinite(total)) {
    throw Error(ErrorCode::kWeightUnderflow,
                "total hypothesis weight underflowed at time " +
                    std::to_string(mix.time) +
                    "; the observation is impossible under the model");
  }
  for (auto& h : mix.hypotheses) h.weight /= total;
}

int bits_for(std::size_t count) {
  int bits = 0;
  while ((std::size_t{1} << bits) < count) ++bits;
  return bits;
}

WeightedGaussian as_weighted(const Hypothesis& h) {
  return {h.weight, {h.mean, h.covariance}};
}

/// Moment match of every component. A mixture whose weights are all zero
/// (only transiently possible) merges unweighted and keeps weight 0.
WeightedGaussian merge_all(const MixtureEstimate& mix) {
  std::vector<WeightedGaussian> parts;
  parts.reserve(mix.size());
  for (const auto& h : mix.hypotheses) parts.push_back(as_weighted(h));
  if (mix.total_weight() > 0.0) return merge_moment_match(parts);
  for (auto& part : parts) part.weight = 1.0;
  WeightedGaussian merged = merge_moment_match(parts);
  merged.weight = 0.0;
  return merged;
}

}  // namespace

MixtureEstimate init_mixture(const LinearGaussianModel& model, double p) {
  validate_model(model);
  require_probability(p);
  const Eigen::Index n = model.state_dim();
  MixtureEstimate mix;
  mix.time = 0;
  mix.stage = Stage::kPredicted;
  mix.index_bits = 1;
  mix.hypotheses = {{0, Vector::Zero(n), model.Sigma0, p},
                    {1, Vector::Zero(n), model.Sigma0, 1.0 - p}};
  return mix;
}

MixtureEstimate time_update(const MixtureEstimate& posterior,
                            const LinearGaussianModel& model, double p,
                            const MixtureOptions& options) {
  require_probability(p);
  if (posterior.stage != Stage::kPosterior) {
    throw Error(ErrorCode::kInvalidState,
                "time update needs a posterior mixture");
  }
  if (!is_normalized(posterior, 1e-9)) {
    throw Error(ErrorCode::kInvalidArgument,
                "time update needs a normalized mixture");
  }
  const int bits = posterior.index_bits + 1;
  if (bits > options.horizon_cap + 1 || bits > kMaxIndexTime + 1) {
    throw Error(ErrorCode::kHorizonCap,
                "mixture would need " + std::to_string(bits) +
                    " channel bits; horizon cap is " +
                    std::to_string(options.horizon_cap));
  }

  const std::size_t count = posterior.size();
  MixtureEstimate next;
  next.time = posterior.time + 1;
  next.stage = Stage::kPredicted;
  next.index_bits = bits;
  next.hypotheses.resize(2 * count);
  const HypothesisIndex offset = HypothesisIndex{1} << posterior.index_bits;
  for (std::size_t j = 0; j < count; ++j) {
    const Hypothesis& h = posterior.hypotheses[j];
    Gaussian g = predict({h.mean, h.covariance}, model);
    Hypothesis& drop = next.hypotheses[j];
    Hypothesis& receive = next.hypotheses[count + j];
    drop.index = h.index;
    drop.weight = p * h.weight;
    receive.index = h.index + offset;
    receive.weight = (1.0 - p) * h.weight;
    drop.mean = g.mean;
    drop.covariance = g.covariance;
    receive.mean = std::move(g.mean);
    receive.covariance = std::move(g.covariance);
  }
  normalize(next, options.underflow_guard);
  return next;
}

MixtureEstimate measurement_update(const MixtureEstimate& predicted,
                                   const PacketObservation& obs,
                                   const LinearGaussianModel& model,
                                   const TriggerParams& trigger,
                                   const std::optional<Vector>& feedback,
                                   const MixtureOptions& options) {
  if (predicted.stage != Stage::kPredicted) {
    throw Error(ErrorCode::kInvalidState,
                "measurement update needs a predicted mixture");
  }
  if (predicted.hypotheses.empty() || predicted.index_bits < 1) {
    throw Error(ErrorCode::kInvalidArgument, "empty predicted mixture");
  }
  if (!obs.consistent()) {
    throw Error(ErrorCode::kInvalidArgument,
                "packet observation payload does not match arrival flag");
  }

  Vector reference;
  if (trigger.kind() == SchedulerKind::kClosedLoop) {
    reference = feedback ? *feedback
                         : Vector(model.C * mixture_moments(predicted).x_hat);
  }

  const int newest = predicted.index_bits - 1;
  const double minus_inf = -std::numeric_limits<double>::infinity();
  MixtureEstimate post = predicted;
  post.stage = Stage::kPosterior;
  std::vector<double> log_factor(post.size(), 0.0);
  double max_log = minus_inf;

  for (std::size_t j = 0; j < post.size(); ++j) {
    Hypothesis& h = post.hypotheses[j];
    const bool received = ((h.index >> newest) & 1U) != 0;
    if (!received) {
      log_factor[j] = obs.arrived == 1 ? minus_inf : 0.0;
    } else {
      ReceiveBranch branch = update_receive_branch(
          {h.mean, h.covariance}, obs, model, trigger, reference);
      h.mean = std::move(branch.posterior.mean);
      h.covariance = std::move(branch.posterior.covariance);
      if (obs.arrived == 1 &&
          options.weight_rule == WeightRule::kTransmitProbability) {
        log_factor[j] = std::log(branch.outcome_probability);
      } else {
        log_factor[j] = branch.log_evidence;
      }
    }
    if (h.weight > 0.0) max_log = std::max(max_log, log_factor[j]);
  }

  if (max_log == minus_inf) {
    throw Error(ErrorCode::kWeightUnderflow,
                "no hypothesis with positive weight can explain the "
                "observation at time " +
                    std::to_string(post.time));
  }
  for (std::size_t j = 0; j < post.size(); ++j) {
    Hypothesis& h = post.hypotheses[j];
    h.weight = h.weight > 0.0 ? h.weight * std::exp(log_factor[j] - max_log)
                              : 0.0;
  }
  normalize(post, options.underflow_guard);
  return post;
}

EstimateSummary mixture_moments(const MixtureEstimate& mix) {
  if (mix.hypotheses.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty mixture has no moments");
  }
  const WeightedGaussian merged = merge_all(mix);
  EstimateSummary s;
  s.stage = mix.stage;
  s.time = mix.time;
  s.x_hat = merged.gaussian.mean;
  s.P = merged.gaussian.covariance;
  return s;
}

MixtureEstimate merge_recent_bits(const MixtureEstimate& mix, int depth) {
  if (depth < 1) {
    throw Error(ErrorCode::kInvalidArgument, "merge depth must be at least 1");
  }
  if (mix.index_bits <= depth) return mix;

  const int shift = mix.index_bits - depth;
  MixtureEstimate out;
  out.time = mix.time;
  out.stage = mix.stage;
  out.index_bits = depth;

  // Sorted indices imply sorted keys, so each group is a contiguous run.
  std::vector<WeightedGaussian> group;
  std::size_t j = 0;
  while (j < mix.size()) {
    const HypothesisIndex key = mix.hypotheses[j].index >> shift;
    group.clear();
    double total = 0.0;
    for (; j < mix.size() && (mix.hypotheses[j].index >> shift) == key; ++j) {
      group.push_back(as_weighted(mix.hypotheses[j]));
      total += mix.hypotheses[j].weight;
    }
    WeightedGaussian merged;
    if (total > 0.0) {
      merged = merge_moment_match(group);
    } else {
      for (auto& g : group) g.weight = 1.0;
      merged = merge_moment_match(group);
      merged.weight = 0.0;
    }
    out.hypotheses.push_back({key, std::move(merged.gaussian.mean),
                              std::move(merged.gaussian.covariance),
                              merged.weight});
  }
  return out;
}

MixtureEstimate reduce_mixture(const MixtureEstimate& mix,
                               std::size_t max_components) {
  if (max_components < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "reduction needs at least one component");
  }
  if (mix.size() <= max_components) return mix;
  if (max_components == 1) {
    WeightedGaussian merged = merge_all(mix);
    MixtureEstimate out;
    out.time = mix.time;
    out.stage = mix.stage;
    out.index_bits = 0;
    out.hypotheses.push_back({0, std::move(merged.gaussian.mean),
                              std::move(merged.gaussian.covariance),
                              merged.weight});
    return out;
  }

  std::vector<WeightedGaussian> parts;
  parts.reserve(mix.size());
  for (const auto& h : mix.hypotheses) parts.push_back(as_weighted(h));

  // Pairwise cost table, refreshed only for the row/column that changed.
  const std::size_t count = parts.size();
  std::vector<double> cost(count * count, 0.0);
  std::vector<bool> alive(count, true);
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = a + 1; b < count; ++b) {
      cost[a * count + b] = merge_cost(parts[a], parts[b]);
    }
  }

  std::size_t remaining = count;
  while (remaining > max_components) {
    std::size_t best_a = 0;
    std::size_t best_b = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < count; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < count; ++b) {
        if (alive[b] && cost[a * count + b] < best) {
          best = cost[a * count + b];
          best_a = a;
          best_b = b;
        }
      }
    }
    const double total = parts[best_a].weight + parts[best_b].weight;
    if (total > 0.0) {
      const WeightedGaussian pair[] = {parts[best_a], parts[best_b]};
      parts[best_a] = merge_moment_match(pair);
    } else {
      WeightedGaussian pair[] = {parts[best_a], parts[best_b]};
      pair[0].weight = pair[1].weight = 1.0;
      parts[best_a] = merge_moment_match(pair);
      parts[best_a].weight = 0.0;
    }
    alive[best_b] = false;
    --remaining;
    for (std::size_t c = 0; c < count; ++c) {
      if (!alive[c] || c == best_a) continue;
      const std::size_t lo = std::min(c, best_a);
      const std::size_t hi = std::max(c, best_a);
      cost[lo * count + hi] = merge_cost(parts[lo], parts[hi]);
    }
  }

  MixtureEstimate out;
  out.time = mix.time;
  out.stage = mix.stage;
  out.index_bits = bits_for(remaining);
  HypothesisIndex next = 0;
  for (std::size_t a = 0; a < count; ++a) {
    if (!alive[a]) continue;
    out.hypotheses.push_back({next++, std::move(parts[a].gaussian.mean),
                              std::move(parts[a].gaussian.covariance),
                              parts[a].weight});
  }
  return out;
}

StepResult exact_step(const std::optional<MixtureEstimate>& previous,
                      const PacketObservation& obs,
                      const LinearGaussianModel& model,
                      const TriggerParams& trigger, double p,
                      const std::optional<Vector>& feedback,
                      const MixtureOptions& options) {
  MixtureEstimate predicted = previous
                                  ? time_update(*previous, model, p, options)
                                  : init_mixture(model, p);
  StepResult result;
  result.predicted = mixture_moments(predicted);
  std::optional<Vector> reference = feedback;
  if (trigger.kind() == SchedulerKind::kClosedLoop && !reference) {
    reference = model.C * result.predicted.x_hat;
  }
  result.state =
      measurement_update(predicted, obs, model, trigger, reference, options);
  result.posterior = mixture_moments(result.state);
  return result;
}

StepResult gpb_step(const std::optional<MixtureEstimate>& previous,
                    const PacketObservation& obs,
                    const LinearGaussianModel& model,
                    const TriggerParams& trigger, double p, int depth,
                    const std::optional<Vector>& feedback,
                    const MixtureOptions& options) {
  if (depth < 1) {
    throw Error(ErrorCode::kInvalidArgument, "GPB depth must be at least 1");
  }
  StepResult r =
      exact_step(previous, obs, model, trigger, p, feedback, options);
  r.state = merge_recent_bits(r.state, depth);
  return r;
}

StepResult reduce_step(const std::optional<MixtureEstimate>& previous,
                       const PacketObservation& obs,
                       const LinearGaussianModel& model,
                       const TriggerParams& trigger, double p,
                       std::size_t max_components,
                       const std::optional<Vector>& feedback,
                       const MixtureOptions& options) {
  StepResult r =
      exact_step(previous, obs, model, trigger, p, feedback, options);
  r.state = reduce_mixture(r.state, max_components);
  return r;
}

}  // namespace etse
