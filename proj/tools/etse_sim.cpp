// etse-sim: Monte Carlo comparison of remote estimators under a stochastic
// event trigger and a lossy channel. Writes one CSV row per (drop rate,
// estimator).

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "etse/etse.h"

namespace {

int report(etse_status status, const char* what) {
  std::fprintf(stderr, "etse-sim: %s: %s (%s)\n", what, etse_last_error(),
               etse_status_string(status));
  return 1;
}

std::optional<std::vector<double>> parse_rates(const std::string& text) {
  std::vector<double> rates;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      rates.push_back(std::stod(item, &used));
      if (used != item.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (rates.empty()) return std::nullopt;
  return rates;
}

struct ConfigHandle {
  etse_config* ptr = nullptr;
  ~ConfigHandle() { etse_config_destroy(ptr); }
};

struct ResultsHandle {
  etse_results* ptr = nullptr;
  ~ResultsHandle() { etse_results_destroy(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-triggered remote estimation over a lossy channel"};
  std::string config_path;
  std::string out_path;
  std::string drop_rates;
  std::string estimators;
  std::string plot_path;
  std::optional<int> runs;
  std::optional<int> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  app.add_option("--config", config_path, "JSON experiment description");
  app.add_option("--out", out_path,
                 "CSV output path (default: config \"output\" or stdout)");
  app.add_option("--drop-rates", drop_rates, "comma-separated drop rates");
  app.add_option("--runs", runs, "Monte Carlo replicas per drop rate");
  app.add_option("--horizon", horizon, "last time index K (steps 0..K)");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--estimators", estimators,
                 "comma-separated kinds, e.g. oracle,exact,gpb:2,olset-kf");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_option("--emit-plot-data", plot_path,
                 "also write long-form per-step MSE CSV to this path");
  CLI11_PARSE(app, argc, argv);

  ConfigHandle config;
  etse_status st = config_path.empty()
                       ? etse_config_default(&config.ptr)
                       : etse_config_load_file(config_path.c_str(), &config.ptr);
  if (st != ETSE_OK) return report(st, "loading config");

  if (!drop_rates.empty()) {
    const auto rates = parse_rates(drop_rates);
    if (!rates) {
      std::fprintf(stderr, "etse-sim: bad --drop-rates '%s'\n",
                   drop_rates.c_str());
      return 2;
    }
    st = etse_config_set_drop_rates(config.ptr, rates->data(), rates->size());
    if (st != ETSE_OK) return report(st, "--drop-rates");
  }
  if (runs && (st = etse_config_set_runs(config.ptr, *runs)) != ETSE_OK) {
    return report(st, "--runs");
  }
  if (horizon &&
      (st = etse_config_set_horizon(config.ptr, *horizon)) != ETSE_OK) {
    return report(st, "--horizon");
  }
  if (seed && (st = etse_config_set_seed(config.ptr, *seed)) != ETSE_OK) {
    return report(st, "--seed");
  }
  if (threads &&
      (st = etse_config_set_threads(config.ptr, *threads)) != ETSE_OK) {
    return report(st, "--threads");
  }
  if (!estimators.empty() &&
      (st = etse_config_set_estimators(config.ptr, estimators.c_str())) !=
          ETSE_OK) {
    return report(st, "--estimators");
  }

  ResultsHandle results;
  st = etse_experiment_run(config.ptr, &results.ptr);
  if (st != ETSE_OK) return report(st, "running experiment");

  if (out_path.empty()) out_path = etse_config_output_path(config.ptr);
  if (out_path.empty()) out_path = "-";
  st = etse_results_write_csv(results.ptr, out_path.c_str());
  if (st != ETSE_OK) return report(st, "writing results");
  if (!plot_path.empty()) {
    st = etse_results_write_plot_data(results.ptr, plot_path.c_str());
    if (st != ETSE_OK) return report(st, "writing plot data");
  }
  return 0;
}
