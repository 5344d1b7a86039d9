#pragma once

// Monte Carlo comparison of estimators on common random numbers.
//
// Replica r at drop-rate index d owns three streams derived from the master
// seed: derive_seed(seed, {d, r, 0}) drives the plant, {d, r, 1} the trigger
// draws zeta_k and {d, r, 2} the channel draws gamma_k. Every estimator of a
// replica sees the same trajectory, decisions and packet losses.

#include <cstdint>
#include <string>
#include <vector>

#include "etse/estimators.hpp"

namespace etse {

struct ExperimentConfig {
  LinearGaussianModel model;
  TriggerParams trigger{SchedulerKind::kOpenLoop, Matrix::Identity(1, 1)};
  std::vector<double> drop_rates;
  /// Steps k = 0..horizon.
  int horizon = 9;
  int runs = 1000;
  std::vector<EstimatorKind> estimators;
  std::uint64_t master_seed = 0;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
  MixtureOptions mixture;
  std::string output_path;
};

/// Drop rates 0, 0.1, ..., 1 on the reference plant with Y = 1, horizon 9,
/// 1000 runs and estimators oracle, exact, gpb-2, olset-kf.
ExperimentConfig default_experiment();

/// Checks the model, drop rates, horizon, runs and estimator list, and puts
/// the oracle first when it is missing. Throws kInvalidConfig.
void validate_config(ExperimentConfig& config);

struct ResultRow {
  double p = 0.0;
  std::string estimator;
  /// sum_{k=0}^{K} of the replica-averaged ||x_k - xhat_{k|k}||^2.
  double sum_mse = 0.0;
  /// Monte Carlo standard error of sum_mse.
  double std_error = 0.0;
  double rel_sum_mse = 0.0;
  int runs = 0;
  std::uint64_t seed = 0;
  /// Per-replica sums, in replica order.
  std::vector<double> replica_sums;
  /// Replica-averaged squared error at each k.
  std::vector<double> mse_by_step;
};

struct ResultsTable {
  std::vector<ResultRow> rows;

  const ResultRow* find(double p, const std::string& estimator) const;
};

/// Feedback for the closed-loop sensor comes from the exact estimator when it
/// is configured, otherwise from the first non-oracle estimator.
ResultsTable run_monte_carlo(const ExperimentConfig& config);

/// Fills rel_sum_mse = sum_mse / oracle sum_mse at the same p. Throws
/// kInvalidConfig when a drop rate has no oracle row.
ResultsTable relative_mse(ResultsTable table);

/// Header p,estimator,sum_mse,stderr,rel_sum_mse,runs,seed; 17 significant
/// digits.
std::string to_csv(const ResultsTable& table);

/// Long form p,estimator,k,mse for external plotting.
std::string to_plot_csv(const ResultsTable& table);

}  // namespace etse
