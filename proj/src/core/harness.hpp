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

#ifndef TPEAS_CORE_HARNESS_HPP
#define TPEAS_CORE_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "optimizer.hpp"
#include "portfolio.hpp"

namespace tpeas {

enum class Method { kTpeAs, kTpeConventional, kRandomSearch };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

/// Accepts family names and the M1/M2/M3 shorthands.
StrategyFamily strategy_preset(std::string_view name);
/// Accepts kind names and the S1..S4 shorthands.
ScenarioKind scenario_preset_kind(std::string_view name);

/// A method x strategy x scenario x seed grid. The single-valued fields of the
/// file format ("method", "strategy", "scenario") may also be lists.
struct ExperimentConfig {
  std::vector<Method> methods;
  std::vector<StrategyFamily> strategies;
  std::vector<ScenarioKind> scenarios;
  OptimizerConfig optimizer;  // seed and mode are set per grid cell
  std::int64_t n_groups = 5;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir = "tpeas_out";

  /// Throws Error(kConfig) on an empty grid axis or repeated seeds.
  void validate() const;
};

ExperimentConfig experiment_from_json(const nlohmann::json& doc);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// 16 hex digits identifying the optimizer settings shared by all cells.
std::string optimizer_hash(const OptimizerConfig& opt);

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;  // overrides the config
  std::size_t parallelism = 1;
  bool overwrite = false;
};

struct CellKey {
  Method method;
  StrategyFamily strategy;
  ScenarioKind scenario;
  std::uint64_t seed;

  /// method__strategy__scenario__opt<hash>__seed<seed>
  std::string stem(const std::string& opt_hash) const;
};

struct SummaryRow {
  std::string method;
  std::string strategy;
  std::string scenario;
  std::uint64_t seed = 0;
  double max_f = 0.0;
  double variance_f = 0.0;
  double mean_step_time = 0.0;  // seconds
  std::string status = "ok";
};

struct ExperimentResult {
  std::vector<SummaryRow> rows;  // grid order
  std::filesystem::path summary_csv;
  std::size_t failed = 0;
};

/// Writes trials/<stem>.jsonl, trajectories/<stem>.csv and summary.csv under
/// the output directory. Refuses to touch an existing summary.csv unless
/// options.overwrite is set.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Trial log: one JSON object per line.
std::string trial_log_line(const ParamSpace& space, const TrialRecord& record);
std::string trial_log(const ParamSpace& space, const History& history);
History read_trial_log(const std::filesystem::path& path, const ParamSpace& space);

std::string trajectory_csv(const History& history);

inline constexpr std::string_view kSummaryHeader =
    "method,strategy,scenario,seed,max_f,variance_f,mean_step_time,status";

std::string summary_csv_line(const SummaryRow& row);
/// Throws Error(kParse) naming the offending line.
std::vector<SummaryRow> parse_summary_csv(std::string_view text);
std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);

struct Spread {
  double median = 0.0;
  double iqr = 0.0;
};

/// Median and interquartile range with linear interpolation between order
/// statistics.
Spread spread_of(std::vector<double> values);

struct ReportRow {
  std::string method;
  std::string strategy;
  std::string scenario;
  std::size_t n_seeds = 0;
  Spread max_f;
  Spread variance_f;
  bool best_max_f = false;       // highest median max_f for its strategy/scenario
  bool best_variance_f = false;  // lowest median variance_f for its strategy/scenario
};

/// Groups successful rows by (method, strategy, scenario) in first-seen order.
std::vector<ReportRow> aggregate(const std::vector<SummaryRow>& rows);
std::string render_report(const std::vector<ReportRow>& rows);

}  // namespace tpeas

#endif  // TPEAS_CORE_HARNESS_HPP
