#include "etse/estimators.hpp"

#include <charconv>
#include <utility>

#include "etse/errors.hpp"

namespace etse {

namespace {

constexpr int kMaxGpbDepth = 20;
constexpr int kMaxReduceBudget = 1 << 16;

std::optional<int> parse_order(std::string_view rest) {
  if (rest.empty()) return std::nullopt;
  if (rest.front() == ':' || rest.front() == '-') {
    rest.remove_prefix(1);
  } else if (rest.front() == '(' && rest.back() == ')') {
    rest = rest.substr(1, rest.size() - 2);
  } else {
    return std::nullopt;
  }
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(rest.data(), rest.data() + rest.size(), value);
  if (ec != std::errc() || ptr != rest.data() + rest.size()) {
    return std::nullopt;
  }
  return value;
}

/// Shared predict/update sequencing.
class SteppedEstimator : public Estimator {
 protected:
  using Estimator::Estimator;

  void begin_predict() {
    if (predicted_) {
      throw Error(ErrorCode::kInvalidState,
                  "predict() called twice without update()");
    }
    predicted_ = true;
  }
  void begin_update() {
    if (!predicted_) {
      throw Error(ErrorCode::kInvalidState, "update() called before predict()");
    }
    predicted_ = false;
  }
  int next_time() const { return time_ + 1; }
  void advance() { ++time_; }
  int time() const { return time_; }

 private:
  bool predicted_ = false;
  int time_ = -1;
};

class SingleGaussianEstimator final : public SteppedEstimator {
 public:
  SingleGaussianEstimator(EstimatorKind kind, LinearGaussianModel model,
                          TriggerParams trigger)
      : SteppedEstimator(kind),
        model_(std::move(model)),
        trigger_(std::move(trigger)) {}

  EstimateSummary predict() override {
    begin_predict();
    if (time() < 0) {
      state_ = {Vector::Zero(model_.state_dim()), model_.Sigma0};
    } else {
      state_ = etse::predict(state_, model_);
    }
    advance();
    return {state_.mean, state_.covariance, Stage::kPredicted, time()};
  }

  EstimateSummary update(const PacketObservation& obs,
                         const StepSideInfo& side) override {
    begin_update();
    Vector reference;
    if (trigger_.kind() == SchedulerKind::kClosedLoop) {
      reference = side.feedback ? *side.feedback
                                : Vector(model_.C * state_.mean);
    }
    if (kind().family == EstimatorKind::Family::kOracle) {
      if (!side.gamma) {
        throw Error(ErrorCode::kInvalidArgument,
                    "oracle estimator needs the true channel state");
      }
      state_ = oracle_step(state_, obs, *side.gamma, model_, trigger_,
                           reference);
    } else {
      state_ = olset_step(state_, obs, model_, trigger_, reference);
    }
    return {state_.mean, state_.covariance, Stage::kPosterior, time()};
  }

  std::size_t component_count() const override { return 1; }

 private:
  LinearGaussianModel model_;
  TriggerParams trigger_;
  Gaussian state_;
};

class MixtureEstimator final : public SteppedEstimator {
 public:
  MixtureEstimator(EstimatorKind kind, LinearGaussianModel model,
                   TriggerParams trigger, double p, MixtureOptions options)
      : SteppedEstimator(kind),
        model_(std::move(model)),
        trigger_(std::move(trigger)),
        p_(p),
        options_(options) {}

  EstimateSummary predict() override {
    begin_predict();
    predicted_ = posterior_ ? time_update(*posterior_, model_, p_, options_)
                            : init_mixture(model_, p_);
    advance();
    return mixture_moments(predicted_);
  }

  EstimateSummary update(const PacketObservation& obs,
                         const StepSideInfo& side) override {
    begin_update();
    MixtureEstimate post = measurement_update(predicted_, obs, model_,
                                              trigger_, side.feedback,
                                              options_);
    EstimateSummary summary = mixture_moments(post);
    switch (kind().family) {
      case EstimatorKind::Family::kGpb:
        post = merge_recent_bits(post, kind().order);
        break;
      case EstimatorKind::Family::kMixtureReduce:
        post = reduce_mixture(post, static_cast<std::size_t>(kind().order));
        break;
      default:
        break;
    }
    posterior_ = std::move(post);
    return summary;
  }

  std::size_t component_count() const override {
    return posterior_ ? posterior_->size() : predicted_.size();
  }

 private:
  LinearGaussianModel model_;
  TriggerParams trigger_;
  double p_;
  MixtureOptions options_;
  MixtureEstimate predicted_;
  std::optional<MixtureEstimate> posterior_;
};

}  // namespace

std::string EstimatorKind::label() const {
  switch (family) {
    case Family::kExact: return "exact";
    case Family::kOracle: return "oracle";
    case Family::kOlset: return "olset-kf";
    case Family::kGpb: return "gpb-" + std::to_string(order);
    case Family::kMixtureReduce: return "reduce-" + std::to_string(order);
  }
  return "unknown";
}

EstimatorKind EstimatorKind::parse(std::string_view text) {
  if (text == "exact" || text == "exact-open" || text == "exact-closed") {
    return exact();
  }
  if (text == "oracle") return oracle();
  if (text == "olset-kf" || text == "olset") return olset();
  for (std::string_view prefix : {"mixture-reduce", "reduce", "gpb"}) {
    if (text.substr(0, prefix.size()) != prefix) continue;
    const auto order = parse_order(text.substr(prefix.size()));
    if (!order) break;
    EstimatorKind kind = prefix == "gpb" ? gpb(*order) : mixture_reduce(*order);
    kind.validate();
    return kind;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown estimator '" + std::string(text) + "'");
}

void EstimatorKind::validate() const {
  if (family == Family::kGpb && (order < 1 || order > kMaxGpbDepth)) {
    throw Error(ErrorCode::kInvalidArgument,
                "GPB depth must be in [1, " + std::to_string(kMaxGpbDepth) +
                    "]");
  }
  if (family == Family::kMixtureReduce &&
      (order < 1 || order > kMaxReduceBudget)) {
    throw Error(ErrorCode::kInvalidArgument,
                "mixture reduction budget must be in [1, " +
                    std::to_string(kMaxReduceBudget) + "]");
  }
}

std::unique_ptr<Estimator> make_estimator(const EstimatorKind& kind,
                                          const LinearGaussianModel& model,
                                          const TriggerParams& trigger,
                                          double drop_probability,
                                          const MixtureOptions& options) {
  validate_model(model);
  kind.validate();
  if (trigger.output_dim() != model.output_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "trigger weight does not match the model output");
  }
  if (!(drop_probability >= 0.0 && drop_probability <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "drop probability outside [0,1]");
  }
  switch (kind.family) {
    case EstimatorKind::Family::kOracle:
    case EstimatorKind::Family::kOlset:
      return std::make_unique<SingleGaussianEstimator>(kind, model, trigger);
    default:
      return std::make_unique<MixtureEstimator>(kind, model, trigger,
                                                drop_probability, options);
  }
}

}  // namespace etse
