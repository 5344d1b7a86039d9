#ifndef ETSE_ETSE_H_
#define ETSE_ETSE_H_

/*
 * C interface to the event-triggered remote state estimation library.
 *
 * All objects are opaque handles created by *_create / *_load functions and
 * released by the matching *_destroy. Every fallible call returns an
 * etse_status; on failure etse_last_error() describes the problem for the
 * calling thread until its next failing call. Matrices are dense row-major
 * arrays of double.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(ETSE_BUILDING_LIBRARY)
#define ETSE_API __attribute__((visibility("default")))
#else
#define ETSE_API
#endif

typedef enum etse_status {
  ETSE_OK = 0,
  ETSE_ERR_INVALID_ARGUMENT = 1,
  ETSE_ERR_DIMENSION_MISMATCH = 2,
  ETSE_ERR_NOT_POSITIVE_DEFINITE = 3,
  ETSE_ERR_NOT_POSITIVE_SEMIDEFINITE = 4,
  ETSE_ERR_OUT_OF_RANGE = 5,
  ETSE_ERR_HORIZON_CAP = 6,
  ETSE_ERR_WEIGHT_UNDERFLOW = 7,
  ETSE_ERR_INVALID_CONFIG = 8,
  ETSE_ERR_IO = 9,
  ETSE_ERR_INVALID_STATE = 10,
  ETSE_ERR_INTERNAL = 11
} etse_status;

typedef enum etse_scheduler {
  ETSE_SCHEDULER_OPEN_LOOP = 0,
  ETSE_SCHEDULER_CLOSED_LOOP = 1
} etse_scheduler;

typedef struct etse_model etse_model;
typedef struct etse_trigger etse_trigger;
typedef struct etse_estimator etse_estimator;
typedef struct etse_config etse_config;
typedef struct etse_results etse_results;

/* Pass as `gamma` when the channel state is unknown to the caller. */
#define ETSE_GAMMA_UNKNOWN (-1)

ETSE_API const char* etse_version(void);
ETSE_API const char* etse_status_string(etse_status status);
/* Message of the calling thread's most recent failure; never NULL. */
ETSE_API const char* etse_last_error(void);

/* ---- model ------------------------------------------------------------ */

/* A: n*n, C: m*n, Q: n*n, R: m*m, sigma0: n*n. */
ETSE_API etse_status etse_model_create(size_t n, size_t m, const double* A,
                                       const double* C, const double* Q,
                                       const double* R, const double* sigma0,
                                       etse_model** out);
/* The two-state plant A = diag(0.8, 0.95), C = [1 1], Q = Sigma0 = I, R = 1. */
ETSE_API etse_status etse_model_create_reference(etse_model** out);
ETSE_API void etse_model_destroy(etse_model* model);
ETSE_API size_t etse_model_state_dim(const etse_model* model);
ETSE_API size_t etse_model_output_dim(const etse_model* model);

/* ---- trigger ---------------------------------------------------------- */

ETSE_API etse_status etse_trigger_create(etse_scheduler kind, size_t m,
                                         const double* weight,
                                         etse_trigger** out);
ETSE_API void etse_trigger_destroy(etse_trigger* trigger);

/* Hold probability phi. y_pred may be NULL for the open-loop scheduler. */
ETSE_API etse_status etse_trigger_probability(const etse_trigger* trigger,
                                              const double* y,
                                              const double* y_pred,
                                              double* phi);

/* ---- estimators ------------------------------------------------------- */

/*
 * kind: "exact", "oracle", "olset-kf", "gpb:N" or "mixture-reduce:M".
 * The estimator copies the model and trigger; both may be destroyed after.
 */
ETSE_API etse_status etse_estimator_create(const etse_model* model,
                                           const etse_trigger* trigger,
                                           const char* kind,
                                           double drop_probability,
                                           etse_estimator** out);
ETSE_API void etse_estimator_destroy(etse_estimator* estimator);

/* Time update (the prior at the first step). x_hat: n, P: n*n; either may be
 * NULL. */
ETSE_API etse_status etse_estimator_predict(etse_estimator* estimator,
                                            double* x_hat, double* P);

/*
 * Measurement update. y (length m) is read only when arrived is 1. gamma is
 * the true channel state (required by the oracle) or ETSE_GAMMA_UNKNOWN.
 * feedback (length m, may be NULL) is the output prediction the closed-loop
 * sensor triggered on.
 */
ETSE_API etse_status etse_estimator_update(etse_estimator* estimator,
                                           int arrived, const double* y,
                                           int gamma, const double* feedback,
                                           double* x_hat, double* P);

ETSE_API etse_status etse_estimator_component_count(
    const etse_estimator* estimator, size_t* count);

/* ---- experiments ------------------------------------------------------ */

ETSE_API etse_status etse_config_default(etse_config** out);
ETSE_API etse_status etse_config_load_file(const char* path, etse_config** out);
ETSE_API etse_status etse_config_load_string(const char* json,
                                             etse_config** out);
ETSE_API void etse_config_destroy(etse_config* config);

ETSE_API etse_status etse_config_set_drop_rates(etse_config* config,
                                                const double* rates,
                                                size_t count);
ETSE_API etse_status etse_config_set_runs(etse_config* config, int runs);
ETSE_API etse_status etse_config_set_horizon(etse_config* config, int horizon);
ETSE_API etse_status etse_config_set_seed(etse_config* config, uint64_t seed);
ETSE_API etse_status etse_config_set_threads(etse_config* config,
                                             unsigned threads);
/* Comma-separated estimator kinds, e.g. "oracle,exact,gpb:2,olset-kf". */
ETSE_API etse_status etse_config_set_estimators(etse_config* config,
                                                const char* kinds);
/* Path from the config's "output" key, or "" when unset. */
ETSE_API const char* etse_config_output_path(const etse_config* config);

ETSE_API etse_status etse_experiment_run(const etse_config* config,
                                         etse_results** out);
ETSE_API void etse_results_destroy(etse_results* results);

typedef struct etse_result_row {
  double p;
  const char* estimator; /* owned by the results handle */
  double sum_mse;
  double std_error;
  double rel_sum_mse;
  int runs;
  uint64_t seed;
} etse_result_row;

ETSE_API size_t etse_results_row_count(const etse_results* results);
ETSE_API etse_status etse_results_get_row(const etse_results* results,
                                          size_t index, etse_result_row* row);

/* Writes p,estimator,sum_mse,stderr,rel_sum_mse,runs,seed. Path "-" is
 * stdout. */
ETSE_API etse_status etse_results_write_csv(const etse_results* results,
                                            const char* path);
/* Long-form p,estimator,k,mse. */
ETSE_API etse_status etse_results_write_plot_data(const etse_results* results,
                                                  const char* path);

#ifdef __cplusplus
}
#endif

#endif /* ETSE_ETSE_H_ */
