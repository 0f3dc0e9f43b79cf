// Copyright 2026 The tpeas Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include "tpeas/tpeas.h"

#include <exception>
#include <new>
#include <string>

#include "error.hpp"
#include "harness.hpp"
#include "objective.hpp"
#include "optimizer.hpp"
#include "portfolio.hpp"

struct tpeas_string {
  std::string value;
};

struct tpeas_space {
  tpeas::ParamSpace space;
};

struct tpeas_history {
  tpeas::ParamSpace space;
  tpeas::History history;
};

struct tpeas_experiment {
  tpeas::ExperimentConfig config;
};

namespace {

thread_local std::string g_last_error;

tpeas_status to_status(tpeas::ErrorCode code) {
  switch (code) {
    case tpeas::ErrorCode::kInvalidArgument: return TPEAS_ERR_INVALID_ARGUMENT;
    case tpeas::ErrorCode::kOutOfDomain: return TPEAS_ERR_OUT_OF_DOMAIN;
    case tpeas::ErrorCode::kInsufficientHistory: return TPEAS_ERR_INSUFFICIENT_HISTORY;
    case tpeas::ErrorCode::kConfig: return TPEAS_ERR_CONFIG;
    case tpeas::ErrorCode::kParse: return TPEAS_ERR_PARSE;
    case tpeas::ErrorCode::kIo: return TPEAS_ERR_IO;
    case tpeas::ErrorCode::kBlackbox: return TPEAS_ERR_BLACKBOX;
  }
  return TPEAS_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes and the thread's message.
template <class Fn>
tpeas_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const tpeas::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return TPEAS_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TPEAS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TPEAS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return TPEAS_ERR_INTERNAL;
  }
}

tpeas_status null_argument(const char* what) {
  g_last_error = std::string(what) + " must not be NULL";
  return TPEAS_ERR_INVALID_ARGUMENT;
}

tpeas_string* make_string(std::string value) { return new tpeas_string{std::move(value)}; }

tpeas::OptimizerConfig to_config(const tpeas_optimizer_options& o) {
  tpeas::OptimizerConfig c;
  c.budget = o.budget;
  c.mode = o.mode == TPEAS_MODE_CONVENTIONAL ? tpeas::Mode::kConventional : tpeas::Mode::kAdaptive;
  c.k = o.k;
  c.epsilon = o.epsilon;
  c.window = o.window;
  c.n_init = o.n_init;
  c.n_candidates = o.n_candidates;
  c.seed = o.seed;
  c.floor_weight = o.floor_weight;
  c.schedule = o.zero_schedule ? tpeas::Schedule::kZero : tpeas::Schedule::kCosine;
  return c;
}

}  // namespace

extern "C" {

const char* tpeas_version(void) { return "0.1.0"; }

const char* tpeas_status_string(tpeas_status status) {
  switch (status) {
    case TPEAS_OK: return "ok";
    case TPEAS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TPEAS_ERR_OUT_OF_DOMAIN: return "value outside the parameter space";
    case TPEAS_ERR_INSUFFICIENT_HISTORY: return "insufficient history";
    case TPEAS_ERR_CONFIG: return "configuration error";
    case TPEAS_ERR_PARSE: return "parse error";
    case TPEAS_ERR_IO: return "i/o error";
    case TPEAS_ERR_BLACKBOX: return "black-box failure";
    case TPEAS_ERR_RUN_FAILED: return "one or more runs failed";
    case TPEAS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* tpeas_last_error_message(void) { return g_last_error.c_str(); }

const char* tpeas_string_data(const tpeas_string* s) { return s ? s->value.c_str() : ""; }
size_t tpeas_string_size(const tpeas_string* s) { return s ? s->value.size() : 0; }
void tpeas_string_free(tpeas_string* s) { delete s; }

tpeas_status tpeas_lambda_schedule(int64_t t, int64_t eta, double* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = tpeas::lambda_schedule(t, eta);
    return TPEAS_OK;
  });
}

tpeas_status tpeas_importance_weight(double g_density, double q_density, double epsilon,
                                     double* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = tpeas::importance_weight(g_density, q_density, epsilon);
    return TPEAS_OK;
  });
}

tpeas_status tpeas_lagrangian_score(double f_value, double variance, double lambda_t,
                                    double* out) {
  if (!out) return null_argument("out");
  if (!(variance >= 0.0) || !(lambda_t >= 0.0 && lambda_t <= 1.0)) {
    g_last_error = "variance must be >= 0 and lambda in [0, 1]";
    return TPEAS_ERR_INVALID_ARGUMENT;
  }
  *out = tpeas::lagrangian_score(f_value, variance, lambda_t);
  g_last_error.clear();
  return TPEAS_OK;
}

tpeas_status tpeas_sharpe_annualized(const double* returns, size_t n, double* out,
                                     int* degenerate_out) {
  if (!out) return null_argument("out");
  if (!returns && n > 0) return null_argument("returns");
  return guarded([&] {
    const auto r = tpeas::sharpe_annualized(std::span<const double>(returns, n));
    *out = r.value;
    if (degenerate_out) *degenerate_out = r.degenerate ? 1 : 0;
    return TPEAS_OK;
  });
}

tpeas_status tpeas_space_from_json(const char* json, tpeas_space** out) {
  if (!json) return null_argument("json");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto space = tpeas::space_from_json(nlohmann::json::parse(json));
    *out = new tpeas_space{std::move(space)};
    return TPEAS_OK;
  });
}

tpeas_status tpeas_space_from_strategy(const char* strategy, int64_t n_groups, tpeas_space** out) {
  if (!strategy) return null_argument("strategy");
  if (!out) return null_argument("out");
  return guarded([&] {
    const tpeas::StrategyKind kind{tpeas::strategy_preset(strategy), n_groups};
    *out = new tpeas_space{kind.param_space()};
    return TPEAS_OK;
  });
}

tpeas_status tpeas_space_to_json(const tpeas_space* space, tpeas_string** out) {
  if (!space) return null_argument("space");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = make_string(tpeas::space_to_json(space->space).dump(2));
    return TPEAS_OK;
  });
}

size_t tpeas_space_dimension(const tpeas_space* space) {
  return space ? space->space.dimension() : 0;
}

tpeas_status tpeas_space_validate(const tpeas_space* space, const char* config_json,
                                  tpeas_string** violations_out) {
  if (!space) return null_argument("space");
  if (!config_json) return null_argument("config_json");
  const tpeas_status status = guarded([&] {
    tpeas::config_from_json(space->space, nlohmann::json::parse(config_json));
    return TPEAS_OK;
  });
  if (status == TPEAS_ERR_OUT_OF_DOMAIN && violations_out)
    *violations_out = make_string(g_last_error);
  return status;
}

tpeas_status tpeas_space_sample(const tpeas_space* space, uint64_t seed,
                                tpeas_string** config_json_out) {
  if (!space) return null_argument("space");
  if (!config_json_out) return null_argument("config_json_out");
  return guarded([&] {
    tpeas::Rng rng(seed);
    const auto config = tpeas::sample_uniform(space->space, rng);
    *config_json_out = make_string(tpeas::config_to_json(space->space, config).dump());
    return TPEAS_OK;
  });
}

void tpeas_space_free(tpeas_space* space) { delete space; }

void tpeas_optimizer_options_init(tpeas_optimizer_options* options) {
  if (!options) return;
  const tpeas::OptimizerConfig d;
  options->budget = d.budget;
  options->mode = TPEAS_MODE_ADAPTIVE;
  options->k = d.k;
  options->epsilon = d.epsilon;
  options->window = d.window;
  options->n_init = d.n_init;
  options->n_candidates = d.n_candidates;
  options->seed = d.seed;
  options->floor_weight = d.floor_weight;
  options->zero_schedule = 0;
}

tpeas_status tpeas_optimize(const tpeas_space* space, const tpeas_optimizer_options* options,
                            tpeas_objective_fn objective, void* user_data, tpeas_history** out) {
  if (!space) return null_argument("space");
  if (!options) return null_argument("options");
  if (!objective) return null_argument("objective");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto& ps = space->space;
    const tpeas::Blackbox blackbox = [&](const tpeas::Config& config) {
      const std::string json = tpeas::config_to_json(ps, config).dump();
      double f = 0.0;
      int degenerate = 0;
      if (objective(user_data, json.c_str(), &f, &degenerate) != 0)
        tpeas::Fail(tpeas::ErrorCode::kBlackbox, "objective callback reported failure");
      return tpeas::Evaluation(f, degenerate != 0);
    };
    auto history = tpeas::run(to_config(*options), ps, blackbox);
    *out = new tpeas_history{ps, std::move(history)};
    return TPEAS_OK;
  });
}

tpeas_status tpeas_optimize_portfolio(tpeas_method method, const char* strategy, int64_t n_groups,
                                      const char* scenario, uint64_t scenario_seed,
                                      const tpeas_optimizer_options* options,
                                      tpeas_history** out) {
  if (!strategy) return null_argument("strategy");
  if (!scenario) return null_argument("scenario");
  if (!options) return null_argument("options");
  if (!out) return null_argument("out");
  return guarded([&] {
    const tpeas::StrategyKind kind{tpeas::strategy_preset(strategy), n_groups};
    const tpeas::PortfolioBlackbox portfolio(
        kind, tpeas::scenario_preset(tpeas::scenario_preset_kind(scenario), scenario_seed));
    const tpeas::Blackbox blackbox = [&](const tpeas::Config& c) { return portfolio(c); };
    auto config = to_config(*options);
    tpeas::History history;
    switch (method) {
      case TPEAS_METHOD_TPE_AS:
        config.mode = tpeas::Mode::kAdaptive;
        history = tpeas::run(config, portfolio.space(), blackbox);
        break;
      case TPEAS_METHOD_TPE_CONVENTIONAL:
        history = tpeas::run_baseline(tpeas::BaselineKind::kTpeConventional, config,
                                      portfolio.space(), blackbox);
        break;
      case TPEAS_METHOD_RANDOM_SEARCH:
        history = tpeas::run_baseline(tpeas::BaselineKind::kRandomSearch, config,
                                      portfolio.space(), blackbox);
        break;
      default:
        tpeas::Fail(tpeas::ErrorCode::kInvalidArgument, "unknown method");
    }
    *out = new tpeas_history{portfolio.space(), std::move(history)};
    return TPEAS_OK;
  });
}

size_t tpeas_history_size(const tpeas_history* history) {
  return history ? history->history.size() : 0;
}

tpeas_status tpeas_history_trial(const tpeas_history* history, size_t index, tpeas_trial* out) {
  if (!history) return null_argument("history");
  if (!out) return null_argument("out");
  if (index >= history->history.size()) {
    g_last_error = "trial index out of range";
    return TPEAS_ERR_INVALID_ARGUMENT;
  }
  const auto& t = history->history[index];
  *out = tpeas_trial{t.step, t.f_value, t.j_score, t.lambda_used, t.log_proposal_density, t.flags};
  g_last_error.clear();
  return TPEAS_OK;
}

tpeas_status tpeas_history_trial_config(const tpeas_history* history, size_t index,
                                        tpeas_string** config_json_out) {
  if (!history) return null_argument("history");
  if (!config_json_out) return null_argument("config_json_out");
  return guarded([&] {
    if (index >= history->history.size())
      tpeas::Fail(tpeas::ErrorCode::kInvalidArgument, "trial index out of range");
    *config_json_out =
        make_string(tpeas::config_to_json(history->space, history->history[index].config).dump());
    return TPEAS_OK;
  });
}

tpeas_status tpeas_history_to_jsonl(const tpeas_history* history, tpeas_string** out) {
  if (!history) return null_argument("history");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = make_string(tpeas::trial_log(history->space, history->history));
    return TPEAS_OK;
  });
}

tpeas_status tpeas_history_summarize(const tpeas_history* history, tpeas_summary* out) {
  if (!history) return null_argument("history");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto s = tpeas::summarize(history->history);
    *out = tpeas_summary{s.max_f, s.mean_f, s.variance_f, s.best_step};
    return TPEAS_OK;
  });
}

void tpeas_history_free(tpeas_history* history) { delete history; }

tpeas_status tpeas_portfolio_evaluate(const char* strategy, int64_t n_groups, const char* scenario,
                                      uint64_t scenario_seed, const char* config_json,
                                      double* f_out, int* degenerate_out) {
  if (!strategy) return null_argument("strategy");
  if (!scenario) return null_argument("scenario");
  if (!config_json) return null_argument("config_json");
  if (!f_out) return null_argument("f_out");
  return guarded([&] {
    const tpeas::StrategyKind kind{tpeas::strategy_preset(strategy), n_groups};
    const auto config = tpeas::config_from_json(kind.param_space(), nlohmann::json::parse(config_json));
    const auto e = tpeas::evaluate(
        kind, tpeas::scenario_preset(tpeas::scenario_preset_kind(scenario), scenario_seed), config);
    *f_out = e.f;
    if (degenerate_out) *degenerate_out = e.degenerate ? 1 : 0;
    return TPEAS_OK;
  });
}

tpeas_status tpeas_scenario_prices_csv(const char* scenario, uint64_t seed, tpeas_string** out) {
  if (!scenario) return null_argument("scenario");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto prices = tpeas::generate_scenario(
        tpeas::scenario_preset(tpeas::scenario_preset_kind(scenario), seed));
    *out = make_string(prices.to_csv());
    return TPEAS_OK;
  });
}

tpeas_status tpeas_experiment_load_file(const char* path, tpeas_experiment** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new tpeas_experiment{tpeas::load_experiment(path)};
    return TPEAS_OK;
  });
}

tpeas_status tpeas_experiment_load_json(const char* json, tpeas_experiment** out) {
  if (!json) return null_argument("json");
  if (!out) return null_argument("out");
  return guarded([&] {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
      tpeas::Fail(tpeas::ErrorCode::kParse, e.what());
    }
    *out = new tpeas_experiment{tpeas::experiment_from_json(doc)};
    return TPEAS_OK;
  });
}

tpeas_status tpeas_experiment_run(const tpeas_experiment* experiment,
                                  const tpeas_run_options* options, size_t* n_runs_out,
                                  size_t* n_failed_out) {
  if (!experiment) return null_argument("experiment");
  return guarded([&] {
    tpeas::RunOptions run_options;
    if (options) {
      if (options->output_dir) run_options.output_dir = options->output_dir;
      run_options.parallelism = options->parallelism == 0 ? 1 : options->parallelism;
      run_options.overwrite = options->overwrite != 0;
    }
    const auto result = tpeas::run_experiment(experiment->config, run_options);
    if (n_runs_out) *n_runs_out = result.rows.size();
    if (n_failed_out) *n_failed_out = result.failed;
    if (result.failed > 0) {
      g_last_error = std::to_string(result.failed) + " of " + std::to_string(result.rows.size()) +
                     " runs failed";
      return TPEAS_ERR_RUN_FAILED;
    }
    return TPEAS_OK;
  });
}

void tpeas_experiment_free(tpeas_experiment* experiment) { delete experiment; }

tpeas_status tpeas_report(const char* summary_csv_path, tpeas_string** out) {
  if (!summary_csv_path) return null_argument("summary_csv_path");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto rows = tpeas::read_summary_csv(summary_csv_path);
    *out = make_string(tpeas::render_report(tpeas::aggregate(rows)));
    return TPEAS_OK;
  });
}

}  // extern "C"
