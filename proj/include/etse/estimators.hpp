#pragma once

// Stateful estimator objects driven one step at a time by the harness and the
// C API. Each step is predict() then update(); predict() at the first step
// returns the prior N(0, Sigma0).

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "etse/mixture.hpp"

namespace etse {

struct EstimatorKind {
  enum class Family { kExact, kOracle, kOlset, kGpb, kMixtureReduce };

  Family family = Family::kExact;
  /// GPB depth N or reduction budget M; unused otherwise.
  int order = 0;

  static EstimatorKind exact() { return {Family::kExact, 0}; }
  static EstimatorKind oracle() { return {Family::kOracle, 0}; }
  static EstimatorKind olset() { return {Family::kOlset, 0}; }
  static EstimatorKind gpb(int depth) { return {Family::kGpb, depth}; }
  static EstimatorKind mixture_reduce(int budget) {
    return {Family::kMixtureReduce, budget};
  }

  /// "exact", "oracle", "olset-kf", "gpb-N", "reduce-M".
  std::string label() const;

  /// Accepts the labels above plus "gpb:N", "gpb(N)", "mixture-reduce:M",
  /// "exact-open" and "exact-closed". Throws kInvalidArgument.
  static EstimatorKind parse(std::string_view text);

  /// kInvalidArgument when order is out of range for the family.
  void validate() const;

  bool operator==(const EstimatorKind&) const = default;
};

/// Side information a step may use beyond the packet observation.
struct StepSideInfo {
  /// True channel state; required by the oracle, ignored by everyone else.
  std::optional<int> gamma;
  /// Output prediction the closed-loop sensor triggered on. When absent each
  /// estimator uses C times its own predicted mean.
  std::optional<Vector> feedback;
};

class Estimator {
 public:
  virtual ~Estimator() = default;

  virtual EstimateSummary predict() = 0;
  virtual EstimateSummary update(const PacketObservation& obs,
                                 const StepSideInfo& side = {}) = 0;

  /// Number of Gaussian components currently carried.
  virtual std::size_t component_count() const = 0;

  const EstimatorKind& kind() const { return kind_; }

 protected:
  explicit Estimator(EstimatorKind kind) : kind_(kind) {}

 private:
  EstimatorKind kind_;
};

std::unique_ptr<Estimator> make_estimator(const EstimatorKind& kind,
                                          const LinearGaussianModel& model,
                                          const TriggerParams& trigger,
                                          double drop_probability,
                                          const MixtureOptions& options = {});

}  // namespace etse
