/* Copyright 2026 The tpeas Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the tpeas optimizer: a Tree-structured Parzen Estimator whose
 * objective trades the black-box score off against the variance of recent,
 * importance-weighted scores on a cosine schedule.
 *
 * Conventions:
 *  - Every fallible call returns tpeas_status. On failure the out-parameters
 *    are left untouched and tpeas_last_error_message() describes the problem.
 *  - Handles are opaque and owned by the caller; release them with the
 *    matching *_free function. Passing NULL to a *_free function is a no-op.
 *  - Configurations cross the boundary as JSON objects keyed by parameter
 *    name, with categorical values written as their labels.
 *  - Handles may be used from several threads as long as no thread frees a
 *    handle another thread is using. The error message is per thread.
 */

#ifndef TPEAS_TPEAS_H
#define TPEAS_TPEAS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TPEAS_BUILDING_LIBRARY)
#    define TPEAS_API __declspec(dllexport)
#  else
#    define TPEAS_API __declspec(dllimport)
#  endif
#else
#  define TPEAS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tpeas_status {
  TPEAS_OK = 0,
  TPEAS_ERR_INVALID_ARGUMENT = 1,
  TPEAS_ERR_OUT_OF_DOMAIN = 2,
  TPEAS_ERR_INSUFFICIENT_HISTORY = 3,
  TPEAS_ERR_CONFIG = 4,
  TPEAS_ERR_PARSE = 5,
  TPEAS_ERR_IO = 6,
  TPEAS_ERR_BLACKBOX = 7,
  TPEAS_ERR_RUN_FAILED = 8, /* an experiment finished but some runs failed */
  TPEAS_ERR_INTERNAL = 99
} tpeas_status;

typedef enum tpeas_mode {
  TPEAS_MODE_CONVENTIONAL = 0,
  TPEAS_MODE_ADAPTIVE = 1
} tpeas_mode;

typedef enum tpeas_method {
  TPEAS_METHOD_TPE_AS = 0,
  TPEAS_METHOD_TPE_CONVENTIONAL = 1,
  TPEAS_METHOD_RANDOM_SEARCH = 2
} tpeas_method;

/* Trial flag bits. */
#define TPEAS_FLAG_FAILED 1u
#define TPEAS_FLAG_DEGENERATE 2u

TPEAS_API const char* tpeas_version(void);
TPEAS_API const char* tpeas_status_string(tpeas_status status);
/* Message of the last failed call on this thread; "" if none. */
TPEAS_API const char* tpeas_last_error_message(void);

/* ---- owned strings ------------------------------------------------------ */

typedef struct tpeas_string tpeas_string;

TPEAS_API const char* tpeas_string_data(const tpeas_string* s);
TPEAS_API size_t tpeas_string_size(const tpeas_string* s);
TPEAS_API void tpeas_string_free(tpeas_string* s);

/* ---- objective building blocks ------------------------------------------ */

/* (1 - cos(min(t*pi/eta, pi))) / 2; requires t >= 1 and eta >= 1. */
TPEAS_API tpeas_status tpeas_lambda_schedule(int64_t t, int64_t eta, double* out);
/* clip(g/q, 1 - epsilon, 1 + epsilon); densities must be positive. */
TPEAS_API tpeas_status tpeas_importance_weight(double g_density, double q_density, double epsilon,
                                               double* out);
/* f - lambda * variance. */
TPEAS_API tpeas_status tpeas_lagrangian_score(double f_value, double variance, double lambda_t,
                                              double* out);
/* sqrt(252) * mean / sample stddev; degenerate_out (nullable) is set to 1 and
 * the value to 0 when the stddev is below 1e-12. */
TPEAS_API tpeas_status tpeas_sharpe_annualized(const double* returns, size_t n, double* out,
                                               int* degenerate_out);

/* ---- parameter spaces --------------------------------------------------- */

typedef struct tpeas_space tpeas_space;

/* JSON list of {"name", "kind": continuous|integer|categorical,
 * "bounds": [lo, hi] | "choices": [...]}. */
TPEAS_API tpeas_status tpeas_space_from_json(const char* json, tpeas_space** out);
/* Schema of a strategy preset ("trend_following", "M1", ...). */
TPEAS_API tpeas_status tpeas_space_from_strategy(const char* strategy, int64_t n_groups,
                                                 tpeas_space** out);
TPEAS_API tpeas_status tpeas_space_to_json(const tpeas_space* space, tpeas_string** out);
TPEAS_API size_t tpeas_space_dimension(const tpeas_space* space);
/* TPEAS_OK if the config is inside the space, TPEAS_ERR_OUT_OF_DOMAIN with a
 * violation list in *violations_out (nullable) otherwise. */
TPEAS_API tpeas_status tpeas_space_validate(const tpeas_space* space, const char* config_json,
                                            tpeas_string** violations_out);
TPEAS_API tpeas_status tpeas_space_sample(const tpeas_space* space, uint64_t seed,
                                          tpeas_string** config_json_out);
TPEAS_API void tpeas_space_free(tpeas_space* space);

/* ---- optimization ------------------------------------------------------- */

typedef struct tpeas_optimizer_options {
  int64_t budget;
  tpeas_mode mode;
  double k;
  double epsilon;
  int64_t window;
  int64_t n_init;
  int64_t n_candidates;
  uint64_t seed;
  double floor_weight;
  int zero_schedule; /* adaptive machinery with the penalty pinned at 0 */
} tpeas_optimizer_options;

/* budget 500, adaptive, k 0.15, epsilon 0.2, window 20, n_init 20,
 * n_candidates 64, seed 0, floor_weight 0.1, cosine schedule. */
TPEAS_API void tpeas_optimizer_options_init(tpeas_optimizer_options* options);

/* Black-box callback. Return 0 and write *f_out on success; *degenerate_out
 * may be set to flag a degenerate observation. A nonzero return marks the
 * trial failed (recorded as f = 0) and the run continues. */
typedef int (*tpeas_objective_fn)(void* user_data, const char* config_json, double* f_out,
                                  int* degenerate_out);

typedef struct tpeas_history tpeas_history;

typedef struct tpeas_trial {
  int64_t step;
  double f_value;
  double j_score;
  double lambda_used;
  double log_proposal_density;
  uint32_t flags;
} tpeas_trial;

typedef struct tpeas_summary {
  double max_f;
  double mean_f;
  double variance_f;
  int64_t best_step;
} tpeas_summary;

TPEAS_API tpeas_status tpeas_optimize(const tpeas_space* space,
                                      const tpeas_optimizer_options* options,
                                      tpeas_objective_fn objective, void* user_data,
                                      tpeas_history** out);
/* Runs a method against the synthetic portfolio evaluator. The scenario is
 * generated from scenario_seed; options->seed drives the optimizer. The method
 * decides the mode, so options->mode is ignored here. */
TPEAS_API tpeas_status tpeas_optimize_portfolio(tpeas_method method, const char* strategy,
                                                int64_t n_groups, const char* scenario,
                                                uint64_t scenario_seed,
                                                const tpeas_optimizer_options* options,
                                                tpeas_history** out);
TPEAS_API size_t tpeas_history_size(const tpeas_history* history);
TPEAS_API tpeas_status tpeas_history_trial(const tpeas_history* history, size_t index,
                                           tpeas_trial* out);
TPEAS_API tpeas_status tpeas_history_trial_config(const tpeas_history* history, size_t index,
                                                  tpeas_string** config_json_out);
/* Trial log: one JSON object per line. */
TPEAS_API tpeas_status tpeas_history_to_jsonl(const tpeas_history* history, tpeas_string** out);
TPEAS_API tpeas_status tpeas_history_summarize(const tpeas_history* history,
                                               tpeas_summary* out);
TPEAS_API void tpeas_history_free(tpeas_history* history);

/* ---- synthetic portfolio evaluator -------------------------------------- */

TPEAS_API tpeas_status tpeas_portfolio_evaluate(const char* strategy, int64_t n_groups,
                                                const char* scenario, uint64_t scenario_seed,
                                                const char* config_json, double* f_out,
                                                int* degenerate_out);
/* Price paths of a scenario preset, one row per day and one column per asset. */
TPEAS_API tpeas_status tpeas_scenario_prices_csv(const char* scenario, uint64_t seed,
                                                 tpeas_string** out);

/* ---- experiments -------------------------------------------------------- */

typedef struct tpeas_experiment tpeas_experiment;

typedef struct tpeas_run_options {
  const char* output_dir; /* NULL keeps the config's output_dir */
  size_t parallelism;     /* 0 or 1 runs cells one at a time */
  int overwrite;
} tpeas_run_options;

TPEAS_API tpeas_status tpeas_experiment_load_file(const char* path, tpeas_experiment** out);
TPEAS_API tpeas_status tpeas_experiment_load_json(const char* json, tpeas_experiment** out);
/* Returns TPEAS_ERR_RUN_FAILED when every run was attempted but some failed;
 * n_runs_out and n_failed_out (both nullable) are filled in either case. */
TPEAS_API tpeas_status tpeas_experiment_run(const tpeas_experiment* experiment,
                                            const tpeas_run_options* options, size_t* n_runs_out,
                                            size_t* n_failed_out);
TPEAS_API void tpeas_experiment_free(tpeas_experiment* experiment);

/* Per method/strategy/scenario medians and IQRs of a summary CSV. */
TPEAS_API tpeas_status tpeas_report(const char* summary_csv_path, tpeas_string** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TPEAS_TPEAS_H */
