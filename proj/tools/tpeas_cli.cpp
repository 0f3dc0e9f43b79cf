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

// Command-line driver. Talks to the optimizer exclusively through the C API.

#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "tpeas/tpeas.h"

namespace {

struct StringDeleter {
  void operator()(tpeas_string* s) const { tpeas_string_free(s); }
};
using OwnedString = std::unique_ptr<tpeas_string, StringDeleter>;

int report_error(tpeas_status status) {
  std::fprintf(stderr, "tpeas: %s: %s\n", tpeas_status_string(status), tpeas_last_error_message());
  return status == TPEAS_ERR_RUN_FAILED ? 1 : 2;
}

int print_string(tpeas_status status, tpeas_string* raw) {
  OwnedString s(raw);
  if (status != TPEAS_OK) return report_error(status);
  std::fwrite(tpeas_string_data(s.get()), 1, tpeas_string_size(s.get()), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TPE search with an adaptive variance-penalized objective"};
  app.set_version_flag("--version", std::string(tpeas_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::size_t parallelism = 1;
  bool overwrite = false;
  auto* run = app.add_subcommand("run", "Run every cell of an experiment config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--output-dir", output_dir, "Override the config's output_dir");
  run->add_option("--parallelism", parallelism, "Grid cells to run concurrently")
      ->check(CLI::PositiveNumber);
  run->add_flag("--overwrite", overwrite, "Replace an existing summary.csv");

  std::string summary_path;
  auto* report = app.add_subcommand("report", "Aggregate a summary CSV across seeds");
  report->add_option("summary", summary_path, "summary.csv written by run")->required();

  std::string strategy;
  std::int64_t n_groups = 5;
  auto* show_space = app.add_subcommand("show-space", "Print a strategy's parameter space");
  show_space->add_option("strategy", strategy, "Strategy preset (trend_following, M1, ...)")
      ->required();
  show_space->add_option("--groups", n_groups, "Asset groups")->check(CLI::PositiveNumber);

  std::string scenario;
  std::uint64_t seed = 0;
  auto* prices = app.add_subcommand("export-prices", "Print a scenario's price paths as CSV");
  prices->add_option("scenario", scenario, "Scenario preset (high_volatility, S1, ...)")
      ->required();
  prices->add_option("--seed", seed, "Scenario seed");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    tpeas_experiment* experiment = nullptr;
    if (auto st = tpeas_experiment_load_file(config_path.c_str(), &experiment); st != TPEAS_OK)
      return report_error(st);
    std::unique_ptr<tpeas_experiment, void (*)(tpeas_experiment*)> owned(experiment,
                                                                         tpeas_experiment_free);
    tpeas_run_options options{output_dir.empty() ? nullptr : output_dir.c_str(), parallelism,
                              overwrite ? 1 : 0};
    std::size_t n_runs = 0;
    std::size_t n_failed = 0;
    const auto st = tpeas_experiment_run(experiment, &options, &n_runs, &n_failed);
    if (st != TPEAS_OK && st != TPEAS_ERR_RUN_FAILED) return report_error(st);
    std::printf("%zu runs, %zu failed\n", n_runs, n_failed);
    return st == TPEAS_OK ? 0 : report_error(st);
  }
  if (*report) {
    tpeas_string* out = nullptr;
    const auto st = tpeas_report(summary_path.c_str(), &out);
    return print_string(st, out);
  }
  if (*show_space) {
    tpeas_space* space = nullptr;
    if (auto st = tpeas_space_from_strategy(strategy.c_str(), n_groups, &space); st != TPEAS_OK)
      return report_error(st);
    std::unique_ptr<tpeas_space, void (*)(tpeas_space*)> owned(space, tpeas_space_free);
    tpeas_string* out = nullptr;
    const auto st = tpeas_space_to_json(space, &out);
    const int rc = print_string(st, out);
    if (rc == 0) std::printf("\n");
    return rc;
  }
  if (*prices) {
    tpeas_string* out = nullptr;
    const auto st = tpeas_scenario_prices_csv(scenario.c_str(), seed, &out);
    return print_string(st, out);
  }
  return 0;
}
