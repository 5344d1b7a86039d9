#include "etse/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "etse/errors.hpp"

namespace etse {

namespace {

constexpr std::uint64_t kPlantStream = 0;
constexpr std::uint64_t kTriggerStream = 1;
constexpr std::uint64_t kChannelStream = 2;

/// Squared errors [estimator][k] of one replica.
using ReplicaErrors = std::vector<std::vector<double>>;

std::size_t feedback_provider(const std::vector<EstimatorKind>& kinds) {
  for (std::size_t e = 0; e < kinds.size(); ++e) {
    if (kinds[e].family == EstimatorKind::Family::kExact) return e;
  }
  for (std::size_t e = 0; e < kinds.size(); ++e) {
    if (kinds[e].family != EstimatorKind::Family::kOracle) return e;
  }
  return 0;
}

ReplicaErrors run_replica(const ExperimentConfig& config, std::size_t d,
                          std::size_t r) {
  const double p = config.drop_rates[d];
  RandomSource plant_rng(derive_seed(config.master_seed, {d, r, kPlantStream}));
  RandomSource trigger_rng(
      derive_seed(config.master_seed, {d, r, kTriggerStream}));
  RandomSource channel_rng(
      derive_seed(config.master_seed, {d, r, kChannelStream}));
  const ChannelParams channel(p);
  const Trajectory traj =
      simulate_trajectory(config.model, config.horizon, plant_rng);

  std::vector<std::unique_ptr<Estimator>> estimators;
  for (const auto& kind : config.estimators) {
    estimators.push_back(make_estimator(kind, config.model, config.trigger, p,
                                        config.mixture));
  }
  const bool closed_loop = config.trigger.kind() == SchedulerKind::kClosedLoop;
  const std::size_t provider = feedback_provider(config.estimators);

  ReplicaErrors errors(estimators.size(),
                       std::vector<double>(traj.size(), 0.0));
  std::vector<EstimateSummary> predicted(estimators.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      predicted[e] = estimators[e]->predict();
    }
    StepSideInfo side;
    Vector y_pred;
    if (closed_loop) {
      y_pred = config.model.C * predicted[provider].x_hat;
      side.feedback = y_pred;
    }
    const Vector& y = traj.measurements[k];
    const TriggerDecision decision =
        sample_trigger(config.trigger, y, y_pred, trigger_rng);
    const Transmission tx = transmit(decision.s, y, channel, channel_rng);
    side.gamma = tx.gamma;
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      const EstimateSummary post = estimators[e]->update(tx.observation, side);
      errors[e][k] = (traj.states[k] - post.x_hat).squaredNorm();
    }
  }
  return errors;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

ExperimentConfig default_experiment() {
  ExperimentConfig config;
  config.model = reference_model();
  config.trigger = TriggerParams(SchedulerKind::kOpenLoop, Matrix::Identity(1, 1));
  for (int i = 0; i <= 10; ++i) config.drop_rates.push_back(i / 10.0);
  config.horizon = 9;
  config.runs = 1000;
  config.estimators = {EstimatorKind::oracle(), EstimatorKind::exact(),
                       EstimatorKind::gpb(2), EstimatorKind::olset()};
  config.master_seed = 1;
  return config;
}

void validate_config(ExperimentConfig& config) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidConfig, what);
  };
  try {
    validate_model(config.model);
  } catch (const Error& e) {
    fail(std::string("model: ") + e.what());
  }
  if (config.trigger.output_dim() != config.model.output_dim()) {
    fail("trigger weight must be " + std::to_string(config.model.output_dim()) +
         "x" + std::to_string(config.model.output_dim()));
  }
  if (config.drop_rates.empty()) fail("drop_rates must not be empty");
  for (double p : config.drop_rates) {
    if (!(p >= 0.0 && p <= 1.0)) fail("drop rates must lie in [0,1]");
  }
  for (std::size_t a = 0; a < config.drop_rates.size(); ++a) {
    for (std::size_t b = a + 1; b < config.drop_rates.size(); ++b) {
      if (config.drop_rates[a] == config.drop_rates[b]) {
        fail("drop rates must be distinct");
      }
    }
  }
  if (config.horizon < 0) fail("horizon must be nonnegative");
  if (config.runs < 1) fail("runs must be positive");
  if (config.estimators.empty()) fail("estimators must not be empty");
  for (const auto& kind : config.estimators) {
    try {
      kind.validate();
    } catch (const Error& e) {
      fail(e.what());
    }
    if (kind.family == EstimatorKind::Family::kExact &&
        config.horizon > config.mixture.horizon_cap) {
      fail("exact estimator horizon " + std::to_string(config.horizon) +
           " exceeds the cap " + std::to_string(config.mixture.horizon_cap));
    }
  }
  for (std::size_t a = 0; a < config.estimators.size(); ++a) {
    for (std::size_t b = a + 1; b < config.estimators.size(); ++b) {
      if (config.estimators[a] == config.estimators[b]) {
        fail("estimator '" + config.estimators[a].label() + "' listed twice");
      }
    }
  }
  const bool has_oracle =
      std::any_of(config.estimators.begin(), config.estimators.end(),
                  [](const EstimatorKind& k) {
                    return k.family == EstimatorKind::Family::kOracle;
                  });
  if (!has_oracle) {
    config.estimators.insert(config.estimators.begin(), EstimatorKind::oracle());
  }
}

const ResultRow* ResultsTable::find(double p,
                                    const std::string& estimator) const {
  for (const auto& row : rows) {
    if (row.p == p && row.estimator == estimator) return &row;
  }
  return nullptr;
}

ResultsTable run_monte_carlo(const ExperimentConfig& input) {
  ExperimentConfig config = input;
  validate_config(config);

  const std::size_t n_rates = config.drop_rates.size();
  const std::size_t runs = static_cast<std::size_t>(config.runs);
  std::vector<ReplicaErrors> outcomes(n_rates * runs);
  parallel_for(outcomes.size(), config.threads, [&](std::size_t task) {
    outcomes[task] = run_replica(config, task / runs, task % runs);
  });

  // Reduce in replica order so the result does not depend on scheduling.
  ResultsTable table;
  const std::size_t steps = static_cast<std::size_t>(config.horizon) + 1;
  for (std::size_t d = 0; d < n_rates; ++d) {
    for (std::size_t e = 0; e < config.estimators.size(); ++e) {
      ResultRow row;
      row.p = config.drop_rates[d];
      row.estimator = config.estimators[e].label();
      row.runs = config.runs;
      row.seed = config.master_seed;
      row.mse_by_step.assign(steps, 0.0);
      row.replica_sums.reserve(runs);
      for (std::size_t r = 0; r < runs; ++r) {
        const auto& err = outcomes[d * runs + r][e];
        double sum = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
          sum += err[k];
          row.mse_by_step[k] += err[k];
        }
        row.replica_sums.push_back(sum);
      }
      for (double& v : row.mse_by_step) v /= static_cast<double>(runs);
      double total = 0.0;
      for (double s : row.replica_sums) total += s;
      row.sum_mse = total / static_cast<double>(runs);
      if (runs > 1) {
        double ss = 0.0;
        for (double s : row.replica_sums) ss += (s - row.sum_mse) * (s - row.sum_mse);
        row.std_error = std::sqrt(ss / static_cast<double>(runs - 1) /
                                  static_cast<double>(runs));
      }
      table.rows.push_back(std::move(row));
    }
  }
  return relative_mse(std::move(table));
}

ResultsTable relative_mse(ResultsTable table) {
  const std::string oracle = EstimatorKind::oracle().label();
  for (auto& row : table.rows) {
    const ResultRow* ref = table.find(row.p, oracle);
    if (ref == nullptr) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", row.p);
      throw Error(ErrorCode::kInvalidConfig,
                  std::string("no oracle row for p = ") + buf);
    }
    if (&row == ref) {
      row.rel_sum_mse = 1.0;
    } else if (ref->sum_mse > 0.0) {
      row.rel_sum_mse = row.sum_mse / ref->sum_mse;
    } else {
      row.rel_sum_mse = row.sum_mse == 0.0 ? 1.0 : INFINITY;
    }
  }
  return table;
}

std::string to_csv(const ResultsTable& table) {
  std::string out = "p,estimator,sum_mse,stderr,rel_sum_mse,runs,seed\n";
  for (const auto& row : table.rows) {
    append_number(out, row.p);
    out += ',' + row.estimator + ',';
    append_number(out, row.sum_mse);
    out += ',';
    append_number(out, row.std_error);
    out += ',';
    append_number(out, row.rel_sum_mse);
    out += ',' + std::to_string(row.runs) + ',' + std::to_string(row.seed) + '\n';
  }
  return out;
}

std::string to_plot_csv(const ResultsTable& table) {
  std::string out = "p,estimator,k,mse\n";
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.mse_by_step.size(); ++k) {
      append_number(out, row.p);
      out += ',' + row.estimator + ',' + std::to_string(k) + ',';
      append_number(out, row.mse_by_step[k]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace etse
