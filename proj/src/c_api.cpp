#include "etse/etse.h"

#include <cstdio>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "etse/config.hpp"
#include "etse/errors.hpp"
#include "etse/estimators.hpp"
#include "etse/harness.hpp"

struct etse_model {
  etse::LinearGaussianModel model;
};

struct etse_trigger {
  etse::TriggerParams params;
};

struct etse_estimator {
  std::unique_ptr<etse::Estimator> impl;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
};

struct etse_config {
  etse::ExperimentConfig config;
};

struct etse_results {
  etse::ResultsTable table;
};

namespace {

thread_local std::string g_last_error;

etse_status to_status(etse::ErrorCode code) {
  switch (code) {
    case etse::ErrorCode::kInvalidArgument: return ETSE_ERR_INVALID_ARGUMENT;
    case etse::ErrorCode::kDimensionMismatch: return ETSE_ERR_DIMENSION_MISMATCH;
    case etse::ErrorCode::kNotPositiveDefinite:
      return ETSE_ERR_NOT_POSITIVE_DEFINITE;
    case etse::ErrorCode::kNotPositiveSemidefinite:
      return ETSE_ERR_NOT_POSITIVE_SEMIDEFINITE;
    case etse::ErrorCode::kOutOfRange: return ETSE_ERR_OUT_OF_RANGE;
    case etse::ErrorCode::kHorizonCap: return ETSE_ERR_HORIZON_CAP;
    case etse::ErrorCode::kWeightUnderflow: return ETSE_ERR_WEIGHT_UNDERFLOW;
    case etse::ErrorCode::kInvalidConfig: return ETSE_ERR_INVALID_CONFIG;
    case etse::ErrorCode::kIo: return ETSE_ERR_IO;
    case etse::ErrorCode::kInvalidState: return ETSE_ERR_INVALID_STATE;
    case etse::ErrorCode::kInternal: return ETSE_ERR_INTERNAL;
  }
  return ETSE_ERR_INTERNAL;
}

etse_status fail(etse_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

/// Runs `fn`, translating exceptions into a status and the thread's last
/// error message.
template <typename Fn>
etse_status guarded(Fn&& fn) {
  try {
    fn();
    return ETSE_OK;
  } catch (const etse::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ETSE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ETSE_ERR_INTERNAL, e.what());
  }
}

etse::Matrix read_matrix(const double* data, std::size_t rows,
                         std::size_t cols, const char* name) {
  if (data == nullptr) {
    throw etse::Error(etse::ErrorCode::kInvalidArgument,
                      std::string(name) + " is NULL");
  }
  etse::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = data[r * cols + c];
  }
  return m;
}

void write_summary(const etse::EstimateSummary& s, double* x_hat, double* P) {
  const Eigen::Index n = s.x_hat.size();
  if (x_hat != nullptr) {
    for (Eigen::Index i = 0; i < n; ++i) x_hat[i] = s.x_hat[i];
  }
  if (P != nullptr) {
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) P[r * n + c] = s.P(r, c);
    }
  }
}

void require(const void* ptr, const char* name) {
  if (ptr == nullptr) {
    throw etse::Error(etse::ErrorCode::kInvalidArgument,
                      std::string(name) + " is NULL");
  }
}

void write_text(const std::string& text, const char* path) {
  require(path, "path");
  if (std::string(path) == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw etse::Error(etse::ErrorCode::kIo,
                      std::string("cannot open '") + path + "' for writing");
  }
  out << text;
  if (!out) {
    throw etse::Error(etse::ErrorCode::kIo,
                      std::string("failed writing '") + path + "'");
  }
}

}  // namespace

extern "C" {

const char* etse_version(void) { return "1.0.0"; }

const char* etse_status_string(etse_status status) {
  switch (status) {
    case ETSE_OK: return "ok";
    case ETSE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ETSE_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case ETSE_ERR_NOT_POSITIVE_DEFINITE: return "not positive definite";
    case ETSE_ERR_NOT_POSITIVE_SEMIDEFINITE: return "not positive semidefinite";
    case ETSE_ERR_OUT_OF_RANGE: return "out of range";
    case ETSE_ERR_HORIZON_CAP: return "horizon cap exceeded";
    case ETSE_ERR_WEIGHT_UNDERFLOW: return "hypothesis weight underflow";
    case ETSE_ERR_INVALID_CONFIG: return "invalid configuration";
    case ETSE_ERR_IO: return "i/o error";
    case ETSE_ERR_INVALID_STATE: return "invalid estimator state";
    case ETSE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* etse_last_error(void) { return g_last_error.c_str(); }

etse_status etse_model_create(size_t n, size_t m, const double* A,
                              const double* C, const double* Q,
                              const double* R, const double* sigma0,
                              etse_model** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    if (n == 0 || m == 0) {
      throw etse::Error(etse::ErrorCode::kDimensionMismatch,
                        "model dimensions must be positive");
    }
    auto handle = std::make_unique<etse_model>();
    handle->model.A = read_matrix(A, n, n, "A");
    handle->model.C = read_matrix(C, m, n, "C");
    handle->model.Q = read_matrix(Q, n, n, "Q");
    handle->model.R = read_matrix(R, m, m, "R");
    handle->model.Sigma0 = read_matrix(sigma0, n, n, "Sigma0");
    etse::validate_model(handle->model);
    *out = handle.release();
  });
}

etse_status etse_model_create_reference(etse_model** out) {
  return guarded([&] {
    require(out, "out");
    *out = new etse_model{etse::reference_model()};
  });
}

void etse_model_destroy(etse_model* model) { delete model; }

size_t etse_model_state_dim(const etse_model* model) {
  return model ? static_cast<size_t>(model->model.state_dim()) : 0;
}

size_t etse_model_output_dim(const etse_model* model) {
  return model ? static_cast<size_t>(model->model.output_dim()) : 0;
}

etse_status etse_trigger_create(etse_scheduler kind, size_t m,
                                const double* weight, etse_trigger** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    if (kind != ETSE_SCHEDULER_OPEN_LOOP && kind != ETSE_SCHEDULER_CLOSED_LOOP) {
      throw etse::Error(etse::ErrorCode::kInvalidArgument,
                        "unknown scheduler kind");
    }
    if (m == 0) {
      throw etse::Error(etse::ErrorCode::kDimensionMismatch,
                        "trigger dimension must be positive");
    }
    const auto scheduler = kind == ETSE_SCHEDULER_OPEN_LOOP
                               ? etse::SchedulerKind::kOpenLoop
                               : etse::SchedulerKind::kClosedLoop;
    *out = new etse_trigger{
        etse::TriggerParams(scheduler, read_matrix(weight, m, m, "weight"))};
  });
}

void etse_trigger_destroy(etse_trigger* trigger) { delete trigger; }

etse_status etse_trigger_probability(const etse_trigger* trigger,
                                     const double* y, const double* y_pred,
                                     double* phi) {
  return guarded([&] {
    require(trigger, "trigger");
    require(phi, "phi");
    const Eigen::Index m = trigger->params.output_dim();
    const etse::Vector yv = read_matrix(y, m, 1, "y");
    etse::Vector pred;
    if (trigger->params.kind() == etse::SchedulerKind::kClosedLoop) {
      pred = read_matrix(y_pred, m, 1, "y_pred");
    }
    *phi = etse::trigger_probability(trigger->params, yv, pred);
  });
}

etse_status etse_estimator_create(const etse_model* model,
                                  const etse_trigger* trigger, const char* kind,
                                  double drop_probability,
                                  etse_estimator** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(model, "model");
    require(trigger, "trigger");
    require(kind, "kind");
    auto handle = std::make_unique<etse_estimator>();
    handle->impl =
        etse::make_estimator(etse::EstimatorKind::parse(kind), model->model,
                             trigger->params, drop_probability);
    handle->n = model->model.state_dim();
    handle->m = model->model.output_dim();
    *out = handle.release();
  });
}

void etse_estimator_destroy(etse_estimator* estimator) { delete estimator; }

etse_status etse_estimator_predict(etse_estimator* estimator, double* x_hat,
                                   double* P) {
  return guarded([&] {
    require(estimator, "estimator");
    write_summary(estimator->impl->predict(), x_hat, P);
  });
}

etse_status etse_estimator_update(etse_estimator* estimator, int arrived,
                                  const double* y, int gamma,
                                  const double* feedback, double* x_hat,
                                  double* P) {
  return guarded([&] {
    require(estimator, "estimator");
    if (arrived != 0 && arrived != 1) {
      throw etse::Error(etse::ErrorCode::kInvalidArgument,
                        "arrived must be 0 or 1");
    }
    if (gamma != 0 && gamma != 1 && gamma != ETSE_GAMMA_UNKNOWN) {
      throw etse::Error(etse::ErrorCode::kInvalidArgument,
                        "gamma must be 0, 1 or ETSE_GAMMA_UNKNOWN");
    }
    etse::PacketObservation obs;
    if (arrived == 1) {
      obs = etse::PacketObservation::received(
          read_matrix(y, estimator->m, 1, "y"));
    }
    etse::StepSideInfo side;
    if (gamma != ETSE_GAMMA_UNKNOWN) side.gamma = gamma;
    if (feedback != nullptr) {
      side.feedback = read_matrix(feedback, estimator->m, 1, "feedback");
    }
    write_summary(estimator->impl->update(obs, side), x_hat, P);
  });
}

etse_status etse_estimator_component_count(const etse_estimator* estimator,
                                           size_t* count) {
  return guarded([&] {
    require(estimator, "estimator");
    require(count, "count");
    *count = estimator->impl->component_count();
  });
}

etse_status etse_config_default(etse_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new etse_config{etse::default_experiment()};
  });
}

etse_status etse_config_load_file(const char* path, etse_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(path, "path");
    *out = new etse_config{etse::load_config(path)};
  });
}

etse_status etse_config_load_string(const char* json, etse_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(json, "json");
    *out = new etse_config{etse::parse_config(json)};
  });
}

void etse_config_destroy(etse_config* config) { delete config; }

etse_status etse_config_set_drop_rates(etse_config* config,
                                       const double* rates, size_t count) {
  return guarded([&] {
    require(config, "config");
    require(rates, "rates");
    config->config.drop_rates.assign(rates, rates + count);
  });
}

etse_status etse_config_set_runs(etse_config* config, int runs) {
  return guarded([&] {
    require(config, "config");
    config->config.runs = runs;
  });
}

etse_status etse_config_set_horizon(etse_config* config, int horizon) {
  return guarded([&] {
    require(config, "config");
    config->config.horizon = horizon;
  });
}

etse_status etse_config_set_seed(etse_config* config, uint64_t seed) {
  return guarded([&] {
    require(config, "config");
    config->config.master_seed = seed;
  });
}

etse_status etse_config_set_threads(etse_config* config, unsigned threads) {
  return guarded([&] {
    require(config, "config");
    config->config.threads = threads;
  });
}

etse_status etse_config_set_estimators(etse_config* config,
                                       const char* kinds) {
  return guarded([&] {
    require(config, "config");
    require(kinds, "kinds");
    config->config.estimators = etse::parse_estimator_list(kinds);
  });
}

const char* etse_config_output_path(const etse_config* config) {
  return config ? config->config.output_path.c_str() : "";
}

etse_status etse_experiment_run(const etse_config* config,
                                etse_results** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(config, "config");
    *out = new etse_results{etse::run_monte_carlo(config->config)};
  });
}

void etse_results_destroy(etse_results* results) { delete results; }

size_t etse_results_row_count(const etse_results* results) {
  return results ? results->table.rows.size() : 0;
}

etse_status etse_results_get_row(const etse_results* results, size_t index,
                                 etse_result_row* row) {
  return guarded([&] {
    require(results, "results");
    require(row, "row");
    if (index >= results->table.rows.size()) {
      throw etse::Error(etse::ErrorCode::kOutOfRange, "row index out of range");
    }
    const etse::ResultRow& r = results->table.rows[index];
    row->p = r.p;
    row->estimator = r.estimator.c_str();
    row->sum_mse = r.sum_mse;
    row->std_error = r.std_error;
    row->rel_sum_mse = r.rel_sum_mse;
    row->runs = r.runs;
    row->seed = r.seed;
  });
}

etse_status etse_results_write_csv(const etse_results* results,
                                   const char* path) {
  return guarded([&] {
    require(results, "results");
    write_text(etse::to_csv(results->table), path);
  });
}

etse_status etse_results_write_plot_data(const etse_results* results,
                                         const char* path) {
  return guarded([&] {
    require(results, "results");
    write_text(etse::to_plot_csv(results->table), path);
  });
}

}  // extern "C"
