// Exercises the public C interface through the shared library only.
#include <tpeas/tpeas.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace {

std::string take(tpeas_string* s) {
  std::string out(tpeas_string_data(s), tpeas_string_size(s));
  tpeas_string_free(s);
  return out;
}

struct QuadraticState {
  int calls = 0;
  int fail_at = -1;
};

// Parses {"x1": a, "x2": b} without a JSON library.
double field(const char* json, const char* key) {
  const std::string text(json);
  const auto pos = text.find(std::string("\"") + key + "\":");
  return std::stod(text.substr(pos + std::char_traits<char>::length(key) + 3));
}

int quadratic(void* user, const char* config_json, double* f_out, int* degenerate_out) {
  auto* state = static_cast<QuadraticState*>(user);
  if (++state->calls == state->fail_at) return 1;
  const double x1 = field(config_json, "x1");
  const double x2 = field(config_json, "x2");
  *f_out = -(x1 - 0.3) * (x1 - 0.3) - (x2 - 0.7) * (x2 - 0.7);
  *degenerate_out = 0;
  return 0;
}

const char* kSquare =
    R"([{"name":"x1","kind":"continuous","bounds":[0,1]},)"
    R"({"name":"x2","kind":"continuous","bounds":[0,1]}])";

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(tpeas_version()) == "0.1.0");
  CHECK(std::string(tpeas_status_string(TPEAS_OK)) == "ok");
  CHECK(std::string(tpeas_status_string(TPEAS_ERR_CONFIG)).size() > 0);
}

TEST_CASE("scalar functions") {
  double out = 0.0;
  CHECK(tpeas_lambda_schedule(500, 500, &out) == TPEAS_OK);
  CHECK(out == 1.0);
  CHECK(tpeas_lambda_schedule(0, 500, &out) == TPEAS_ERR_INVALID_ARGUMENT);
  CHECK(std::string(tpeas_last_error_message()).size() > 0);
  CHECK(tpeas_importance_weight(5.0, 1.0, 0.2, &out) == TPEAS_OK);
  CHECK(out == doctest::Approx(1.2));
  CHECK(tpeas_importance_weight(0.0, 1.0, 0.2, &out) == TPEAS_ERR_INVALID_ARGUMENT);
  CHECK(tpeas_lagrangian_score(2.0, 1.0, 1.0, &out) == TPEAS_OK);
  CHECK(out == 1.0);
  const double r[] = {0.01, -0.01, 0.02};
  int degenerate = -1;
  CHECK(tpeas_sharpe_annualized(r, 3, &out, &degenerate) == TPEAS_OK);
  CHECK(out == doctest::Approx(6.93).epsilon(1e-3));
  CHECK(degenerate == 0);
  CHECK(tpeas_sharpe_annualized(r, 1, &out, nullptr) == TPEAS_ERR_INVALID_ARGUMENT);
  CHECK(tpeas_lambda_schedule(1, 1, nullptr) == TPEAS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("spaces") {
  tpeas_space* space = nullptr;
  REQUIRE(tpeas_space_from_json(kSquare, &space) == TPEAS_OK);
  CHECK(tpeas_space_dimension(space) == 2);

  tpeas_string* violations = nullptr;
  CHECK(tpeas_space_validate(space, R"({"x1":0.5,"x2":0.5})", &violations) == TPEAS_OK);
  CHECK(tpeas_space_validate(space, R"({"x1":1.5,"x2":0.5})", &violations) ==
        TPEAS_ERR_OUT_OF_DOMAIN);
  REQUIRE(violations != nullptr);
  CHECK(take(violations).find("x1") != std::string::npos);

  tpeas_string* sample = nullptr;
  REQUIRE(tpeas_space_sample(space, 3, &sample) == TPEAS_OK);
  const auto config = take(sample);
  CHECK(tpeas_space_validate(space, config.c_str(), nullptr) == TPEAS_OK);

  tpeas_string* json = nullptr;
  REQUIRE(tpeas_space_to_json(space, &json) == TPEAS_OK);
  tpeas_space* again = nullptr;
  CHECK(tpeas_space_from_json(take(json).c_str(), &again) == TPEAS_OK);
  tpeas_space_free(again);
  tpeas_space_free(space);

  CHECK(tpeas_space_from_json("[{]", &space) == TPEAS_ERR_PARSE);
  CHECK(tpeas_space_from_strategy("M3", 5, &space) == TPEAS_OK);
  CHECK(tpeas_space_dimension(space) == 32);
  tpeas_space_free(space);
  CHECK(tpeas_space_from_strategy("M7", 5, &space) == TPEAS_ERR_CONFIG);
  tpeas_space_free(nullptr);
}

TEST_CASE("optimize through a callback") {
  tpeas_space* space = nullptr;
  REQUIRE(tpeas_space_from_json(kSquare, &space) == TPEAS_OK);
  tpeas_optimizer_options opt;
  tpeas_optimizer_options_init(&opt);
  CHECK(opt.budget == 500);
  CHECK(opt.k == 0.15);
  opt.budget = 60;
  opt.seed = 4;
  QuadraticState state;
  state.fail_at = 25;
  tpeas_history* history = nullptr;
  REQUIRE(tpeas_optimize(space, &opt, quadratic, &state, &history) == TPEAS_OK);
  CHECK(state.calls == 60);
  REQUIRE(tpeas_history_size(history) == 60);

  tpeas_trial trial;
  REQUIRE(tpeas_history_trial(history, 24, &trial) == TPEAS_OK);
  CHECK(trial.step == 25);
  CHECK(trial.f_value == 0.0);
  CHECK((trial.flags & TPEAS_FLAG_FAILED) != 0);
  CHECK(tpeas_history_trial(history, 60, &trial) == TPEAS_ERR_INVALID_ARGUMENT);

  tpeas_summary summary;
  REQUIRE(tpeas_history_summarize(history, &summary) == TPEAS_OK);
  CHECK(summary.max_f <= 0.0);
  CHECK(summary.max_f > -0.05);

  tpeas_string* config = nullptr;
  REQUIRE(tpeas_history_trial_config(history, static_cast<size_t>(summary.best_step - 1), &config) ==
          TPEAS_OK);
  CHECK(take(config).find("\"x1\"") != std::string::npos);

  tpeas_string* log = nullptr;
  REQUIRE(tpeas_history_to_jsonl(history, &log) == TPEAS_OK);
  const auto text = take(log);
  CHECK(std::count(text.begin(), text.end(), '\n') == 60);
  tpeas_history_free(history);

  opt.n_init = 1;
  CHECK(tpeas_optimize(space, &opt, quadratic, &state, &history) == TPEAS_ERR_CONFIG);
  CHECK(tpeas_optimize(space, &opt, nullptr, nullptr, &history) == TPEAS_ERR_INVALID_ARGUMENT);
  tpeas_space_free(space);
}

TEST_CASE("zero schedule reproduces conventional mode through the C API") {
  tpeas_optimizer_options opt;
  tpeas_optimizer_options_init(&opt);
  opt.budget = 40;
  opt.n_init = 10;
  opt.seed = 2;
  tpeas_history* conventional = nullptr;
  tpeas_history* zero = nullptr;
  REQUIRE(tpeas_optimize_portfolio(TPEAS_METHOD_TPE_CONVENTIONAL, "M3", 2, "S1", 2, &opt,
                                   &conventional) == TPEAS_OK);
  opt.zero_schedule = 1;
  REQUIRE(tpeas_optimize_portfolio(TPEAS_METHOD_TPE_AS, "M3", 2, "S1", 2, &opt, &zero) == TPEAS_OK);
  tpeas_string* a = nullptr;
  tpeas_string* b = nullptr;
  tpeas_history_to_jsonl(conventional, &a);
  tpeas_history_to_jsonl(zero, &b);
  CHECK(take(a) == take(b));
  tpeas_history_free(conventional);
  tpeas_history_free(zero);
}

TEST_CASE("portfolio evaluation") {
  tpeas_space* space = nullptr;
  REQUIRE(tpeas_space_from_strategy("trend_following", 2, &space) == TPEAS_OK);
  tpeas_string* sample = nullptr;
  REQUIRE(tpeas_space_sample(space, 1, &sample) == TPEAS_OK);
  const auto config = take(sample);
  double f1 = 0.0, f2 = 1.0;
  int deg = 0;
  CHECK(tpeas_portfolio_evaluate("M1", 2, "S2", 5, config.c_str(), &f1, &deg) == TPEAS_OK);
  CHECK(tpeas_portfolio_evaluate("M1", 2, "S2", 5, config.c_str(), &f2, &deg) == TPEAS_OK);
  CHECK(f1 == f2);
  CHECK(std::isfinite(f1));
  CHECK(tpeas_portfolio_evaluate("M1", 2, "S2", 5, "{}", &f1, &deg) != TPEAS_OK);
  tpeas_space_free(space);

  tpeas_string* csv = nullptr;
  REQUIRE(tpeas_scenario_prices_csv("S1", 0, &csv) == TPEAS_OK);
  const auto text = take(csv);
  CHECK(std::count(text.begin(), text.end(), '\n') == 253);
}

TEST_CASE("experiments and reports") {
  const auto dir = std::filesystem::temp_directory_path() / "tpeas_capi_experiment";
  std::filesystem::remove_all(dir);
  const std::string json = R"({"method":["tpe_as","random_search"],"strategy":"M2","scenario":"S4",)"
                           R"("n_groups":2,"optimizer":{"budget":20,"n_init":8},"seeds":[1,2],)"
                           R"("output_dir":")" + dir.string() + R"("})";
  tpeas_experiment* exp = nullptr;
  REQUIRE(tpeas_experiment_load_json(json.c_str(), &exp) == TPEAS_OK);
  tpeas_run_options options{nullptr, 2, 0};
  size_t runs = 0, failed = 0;
  CHECK(tpeas_experiment_run(exp, &options, &runs, &failed) == TPEAS_OK);
  CHECK(runs == 4);
  CHECK(failed == 0);
  CHECK(tpeas_experiment_run(exp, &options, &runs, &failed) == TPEAS_ERR_IO);
  options.overwrite = 1;
  CHECK(tpeas_experiment_run(exp, &options, &runs, &failed) == TPEAS_OK);
  tpeas_experiment_free(exp);

  tpeas_string* report = nullptr;
  REQUIRE(tpeas_report((dir / "summary.csv").string().c_str(), &report) == TPEAS_OK);
  const auto text = take(report);
  CHECK(text.find("tpe_as") != std::string::npos);
  CHECK(text.find("random_search") != std::string::npos);

  CHECK(tpeas_report((dir / "missing.csv").string().c_str(), &report) == TPEAS_ERR_IO);
  CHECK(tpeas_experiment_load_json(R"({"method":"tpe_as"})", &exp) == TPEAS_ERR_CONFIG);
  CHECK(tpeas_experiment_load_file((dir / "nope.json").string().c_str(), &exp) == TPEAS_ERR_IO);
}
