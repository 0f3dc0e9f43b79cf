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

#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "error.hpp"

namespace tpeas {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) Fail(ErrorCode::kInvalidArgument, "cannot format number");
  return std::string(buf, end);
}

double parse_double(std::string_view s, std::size_t line, std::string_view field) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size())
    Fail(ErrorCode::kParse, "line " + std::to_string(line) + ": bad " + std::string(field) +
                                " value '" + std::string(s) + "'");
  return x;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) Fail(ErrorCode::kIo, "failed writing '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <class T, class Parse>
std::vector<T> one_or_many(const nlohmann::json& doc, const char* key, Parse parse) {
  auto it = doc.find(key);
  if (it == doc.end()) Fail(ErrorCode::kConfig, std::string("experiment config needs '") + key + "'");
  std::vector<T> out;
  if (it->is_string()) {
    out.push_back(parse(it->get<std::string>()));
  } else if (it->is_array()) {
    for (const auto& item : *it) {
      if (!item.is_string()) Fail(ErrorCode::kConfig, std::string("'") + key + "' entries must be strings");
      out.push_back(parse(item.get<std::string>()));
    }
  } else {
    Fail(ErrorCode::kConfig, std::string("'") + key + "' must be a string or a list of strings");
  }
  return out;
}

const std::vector<std::pair<TrialFlag, const char*>> kFlagNames = {
    {kFlagFailed, "failed"},
    {kFlagDegenerate, "degenerate"},
};

double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kTpeAs: return "tpe_as";
    case Method::kTpeConventional: return "tpe_conventional";
    case Method::kRandomSearch: return "random_search";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (auto m : {Method::kTpeAs, Method::kTpeConventional, Method::kRandomSearch})
    if (to_string(m) == name) return m;
  Fail(ErrorCode::kConfig, "unknown method '" + std::string(name) + "'");
}

StrategyFamily strategy_preset(std::string_view name) {
  if (name == "M1") return StrategyFamily::kTrendFollowing;
  if (name == "M2") return StrategyFamily::kMeanReversion;
  if (name == "M3") return StrategyFamily::kThresholdHybrid;
  return strategy_family_from_string(name);
}

ScenarioKind scenario_preset_kind(std::string_view name) {
  if (name == "S1") return ScenarioKind::kHighVolatility;
  if (name == "S2") return ScenarioKind::kStableBull;
  if (name == "S3") return ScenarioKind::kRangeBoundLong;
  if (name == "S4") return ScenarioKind::kRangeBoundShort;
  return scenario_kind_from_string(name);
}

void ExperimentConfig::validate() const {
  if (methods.empty() || strategies.empty() || scenarios.empty())
    Fail(ErrorCode::kConfig, "method, strategy and scenario must be non-empty");
  if (seeds.empty()) Fail(ErrorCode::kConfig, "seeds must be non-empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    Fail(ErrorCode::kConfig, "seeds must be distinct");
  if (n_groups < 1) Fail(ErrorCode::kConfig, "n_groups must be >= 1");
  optimizer.validate();
}

ExperimentConfig experiment_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) Fail(ErrorCode::kConfig, "experiment config must be a JSON object");
  static const std::set<std::string> known = {"method", "strategy", "scenario", "optimizer",
                                              "seeds",  "output_dir", "n_groups"};
  for (const auto& [key, _] : doc.items())
    if (!known.count(key)) Fail(ErrorCode::kConfig, "unknown experiment field '" + key + "'");

  ExperimentConfig cfg;
  try {
    cfg.methods = one_or_many<Method>(doc, "method", method_from_string);
    cfg.strategies = one_or_many<StrategyFamily>(doc, "strategy", strategy_preset);
    cfg.scenarios = one_or_many<ScenarioKind>(doc, "scenario", scenario_preset_kind);

    if (auto it = doc.find("optimizer"); it != doc.end()) {
      if (!it->is_object()) Fail(ErrorCode::kConfig, "'optimizer' must be an object");
      static const std::set<std::string> known_opt = {
          "budget", "k", "epsilon", "window", "n_init", "n_candidates", "floor_weight"};
      for (const auto& [key, _] : it->items())
        if (!known_opt.count(key)) Fail(ErrorCode::kConfig, "unknown optimizer field '" + key + "'");
      auto& o = cfg.optimizer;
      o.budget = it->value("budget", o.budget);
      o.k = it->value("k", o.k);
      o.epsilon = it->value("epsilon", o.epsilon);
      o.window = it->value("window", o.window);
      o.n_init = it->value("n_init", o.n_init);
      o.n_candidates = it->value("n_candidates", o.n_candidates);
      o.floor_weight = it->value("floor_weight", o.floor_weight);
    }
    cfg.n_groups = doc.value("n_groups", cfg.n_groups);
    auto seeds = doc.find("seeds");
    if (seeds == doc.end() || !seeds->is_array())
      Fail(ErrorCode::kConfig, "experiment config needs a 'seeds' list");
    for (const auto& s : *seeds) {
      if (!s.is_number_unsigned()) Fail(ErrorCode::kConfig, "seeds must be non-negative integers");
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
    if (auto it = doc.find("output_dir"); it != doc.end())
      cfg.output_dir = it->get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kConfig, std::string("malformed experiment config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment(const fs::path& path) {
  const std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    Fail(ErrorCode::kParse, "'" + path.string() + "': " + e.what());
  }
  return experiment_from_json(doc);
}

std::string optimizer_hash(const OptimizerConfig& opt) {
  ordered_json doc;
  doc["budget"] = opt.budget;
  doc["k"] = opt.k;
  doc["epsilon"] = opt.epsilon;
  doc["window"] = opt.window;
  doc["n_init"] = opt.n_init;
  doc["n_candidates"] = opt.n_candidates;
  doc["floor_weight"] = opt.floor_weight;
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string CellKey::stem(const std::string& opt_hash) const {
  return std::string(to_string(method)) + "__" + std::string(to_string(strategy)) + "__" +
         std::string(to_string(scenario)) + "__opt" + opt_hash + "__seed" + std::to_string(seed);
}

std::string trial_log_line(const ParamSpace& space, const TrialRecord& record) {
  ordered_json config;
  const auto plain = config_to_json(space, record.config);
  for (const auto& d : space.domains()) config[d.name] = plain.at(d.name);

  ordered_json line;
  line["step"] = record.step;
  line["config"] = std::move(config);
  line["f"] = record.f_value;
  line["j_score"] = record.j_score;
  line["lambda"] = record.lambda_used;
  line["proposal_density"] = record.proposal_density();
  line["log_proposal_density"] = record.log_proposal_density;
  auto flags = ordered_json::array();
  for (const auto& [bit, name] : kFlagNames)
    if (record.flags & bit) flags.push_back(name);
  line["flags"] = std::move(flags);
  return line.dump();
}

std::string trial_log(const ParamSpace& space, const History& history) {
  std::string out;
  for (const auto& t : history.trials()) {
    out += trial_log_line(space, t);
    out += '\n';
  }
  return out;
}

History read_trial_log(const fs::path& path, const ParamSpace& space) {
  std::istringstream in(read_file(path));
  History history;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      TrialRecord r;
      r.step = doc.at("step").get<std::int64_t>();
      r.config = config_from_json(space, doc.at("config"));
      r.f_value = doc.at("f").get<double>();
      r.j_score = doc.at("j_score").get<double>();
      r.lambda_used = doc.at("lambda").get<double>();
      r.log_proposal_density = doc.at("log_proposal_density").get<double>();
      for (const auto& name : doc.at("flags")) {
        for (const auto& [bit, known] : kFlagNames)
          if (name.get<std::string>() == known) r.flags |= bit;
      }
      history.append(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      Fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return history;
}

std::string trajectory_csv(const History& history) {
  std::string out = "step,f,j_score\n";
  for (const auto& t : history.trials()) {
    out += std::to_string(t.step) + ',' + format_double(t.f_value) + ',' +
           format_double(t.j_score) + '\n';
  }
  return out;
}

std::string summary_csv_line(const SummaryRow& row) {
  const bool ok = row.status == "ok";
  return row.method + ',' + row.strategy + ',' + row.scenario + ',' + std::to_string(row.seed) +
         ',' + (ok ? format_double(row.max_f) : "") + ',' +
         (ok ? format_double(row.variance_f) : "") + ',' + format_double(row.mean_step_time) +
         ',' + row.status;
}

std::vector<SummaryRow> parse_summary_csv(std::string_view text) {
  std::vector<SummaryRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != kSummaryHeader)
        Fail(ErrorCode::kParse, "line 1: expected header '" + std::string(kSummaryHeader) + "'");
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 8)
      Fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected 8 fields, got " +
                                  std::to_string(fields.size()));
    SummaryRow row;
    row.method = fields[0];
    row.strategy = fields[1];
    row.scenario = fields[2];
    {
      auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), row.seed);
      if (ec != std::errc() || ptr != fields[3].data() + fields[3].size())
        Fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": bad seed '" +
                                    std::string(fields[3]) + "'");
    }
    row.status = fields[7];
    if (row.status == "ok") {
      row.max_f = parse_double(fields[4], line_no, "max_f");
      row.variance_f = parse_double(fields[5], line_no, "variance_f");
    }
    row.mean_step_time = parse_double(fields[6], line_no, "mean_step_time");
    rows.push_back(std::move(row));
  }
  if (!saw_header) Fail(ErrorCode::kParse, "line 1: summary is empty");
  return rows;
}

std::vector<SummaryRow> read_summary_csv(const fs::path& path) {
  return parse_summary_csv(read_file(path));
}

Spread spread_of(std::vector<double> values) {
  if (values.empty()) Fail(ErrorCode::kInvalidArgument, "spread of an empty set");
  std::sort(values.begin(), values.end());
  return {quantile(values, 0.5), quantile(values, 0.75) - quantile(values, 0.25)};
}

std::vector<ReportRow> aggregate(const std::vector<SummaryRow>& rows) {
  struct Acc {
    std::vector<double> max_f, variance_f;
  };
  std::vector<std::tuple<std::string, std::string, std::string>> order;
  std::map<std::tuple<std::string, std::string, std::string>, Acc> groups;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    auto key = std::make_tuple(r.method, r.strategy, r.scenario);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.max_f.push_back(r.max_f);
    it->second.variance_f.push_back(r.variance_f);
  }

  std::vector<ReportRow> out;
  for (const auto& key : order) {
    const auto& acc = groups.at(key);
    ReportRow row;
    std::tie(row.method, row.strategy, row.scenario) = key;
    row.n_seeds = acc.max_f.size();
    row.max_f = spread_of(acc.max_f);
    row.variance_f = spread_of(acc.variance_f);
    out.push_back(std::move(row));
  }
  // Winners among methods sharing a strategy/scenario column.
  for (auto& row : out) {
    row.best_max_f = true;
    row.best_variance_f = true;
    for (const auto& other : out) {
      if (&other == &row || other.strategy != row.strategy || other.scenario != row.scenario)
        continue;
      if (other.max_f.median > row.max_f.median) row.best_max_f = false;
      if (other.variance_f.median < row.variance_f.median) row.best_variance_f = false;
    }
  }
  return out;
}

std::string render_report(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-18s %-18s %-18s %5s  %-22s %-22s\n", "method", "strategy",
                "scenario", "seeds", "max_f median [IQR]", "variance_f median [IQR]");
  out << buf;
  for (const auto& r : rows) {
    char max_col[64], var_col[64];
    std::snprintf(max_col, sizeof(max_col), "%.4f [%.4f]%s", r.max_f.median, r.max_f.iqr,
                  r.best_max_f ? " *" : "");
    std::snprintf(var_col, sizeof(var_col), "%.4f [%.4f]%s", r.variance_f.median,
                  r.variance_f.iqr, r.best_variance_f ? " *" : "");
    std::snprintf(buf, sizeof(buf), "%-18s %-18s %-18s %5zu  %-22s %-22s\n", r.method.c_str(),
                  r.strategy.c_str(), r.scenario.c_str(), r.n_seeds, max_col, var_col);
    out << buf;
  }
  out << "* best median per strategy/scenario (highest max_f, lowest variance_f)\n";
  return out.str();
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const fs::path out_dir = options.output_dir.value_or(config.output_dir);
  const fs::path summary_path = out_dir / "summary.csv";
  if (fs::exists(summary_path) && !options.overwrite)
    Fail(ErrorCode::kIo, "'" + summary_path.string() + "' exists; pass --overwrite to replace it");
  std::error_code ec;
  fs::create_directories(out_dir / "trials", ec);
  if (!ec) fs::create_directories(out_dir / "trajectories", ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create '" + out_dir.string() + "': " + ec.message());

  std::vector<CellKey> cells;
  for (auto m : config.methods)
    for (auto s : config.strategies)
      for (auto sc : config.scenarios)
        for (auto seed : config.seeds) cells.push_back({m, s, sc, seed});

  const std::string opt_hash = optimizer_hash(config.optimizer);
  std::vector<SummaryRow> rows(cells.size());
  std::mutex log_mutex;

  auto run_cell = [&](std::size_t index) {
    const CellKey& cell = cells[index];
    SummaryRow& row = rows[index];
    row.method = to_string(cell.method);
    row.strategy = to_string(cell.strategy);
    row.scenario = to_string(cell.scenario);
    row.seed = cell.seed;
    try {
      const StrategyKind kind{cell.strategy, config.n_groups};
      const PortfolioBlackbox blackbox(kind, scenario_preset(cell.scenario, cell.seed));
      const Blackbox f = [&blackbox](const Config& c) { return blackbox(c); };
      OptimizerConfig opt = config.optimizer;
      opt.seed = cell.seed;
      opt.mode = Mode::kAdaptive;

      const auto start = std::chrono::steady_clock::now();
      History history;
      switch (cell.method) {
        case Method::kTpeAs: history = run(opt, blackbox.space(), f); break;
        case Method::kTpeConventional:
          history = run_baseline(BaselineKind::kTpeConventional, opt, blackbox.space(), f);
          break;
        case Method::kRandomSearch:
          history = run_baseline(BaselineKind::kRandomSearch, opt, blackbox.space(), f);
          break;
      }
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

      const std::string stem = cell.stem(opt_hash);
      write_file(out_dir / "trials" / (stem + ".jsonl"), trial_log(blackbox.space(), history));
      write_file(out_dir / "trajectories" / (stem + ".csv"), trajectory_csv(history));

      const auto summary = summarize(history);
      row.max_f = summary.max_f;
      row.variance_f = summary.variance_f;
      row.mean_step_time = elapsed.count() / static_cast<double>(history.size());
      row.status = "ok";
    } catch (const std::exception& e) {
      row.status = "failed";
      std::lock_guard lock(log_mutex);
      std::cerr << "run " << cell.stem(opt_hash) << " failed: " << e.what() << '\n';
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.parallelism, 1, cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::string csv(kSummaryHeader);
  csv += '\n';
  ExperimentResult result;
  for (const auto& row : rows) {
    csv += summary_csv_line(row) + '\n';
    if (row.status != "ok") ++result.failed;
  }
  write_file(summary_path, csv);
  result.rows = std::move(rows);
  result.summary_csv = summary_path;
  return result;
}

}  // namespace tpeas
