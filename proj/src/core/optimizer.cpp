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

#include "optimizer.hpp"

#include <cmath>
#include <optional>

#include "error.hpp"

namespace tpeas {

namespace {

struct Observed {
  double f = 0.0;
  std::uint32_t flags = kFlagNone;
};

Observed observe(const Blackbox& blackbox, const Config& config) {
  try {
    const Evaluation e = blackbox(config);
    if (!std::isfinite(e.f)) return {0.0, kFlagFailed};
    return {e.f, e.degenerate ? kFlagDegenerate : kFlagNone};
  } catch (const std::exception&) {
    return {0.0, kFlagFailed};
  }
}

}  // namespace

void OptimizerConfig::validate() const {
  auto bad = [](const std::string& what) { Fail(ErrorCode::kConfig, what); };
  if (budget < 1) bad("budget must be >= 1");
  if (n_init < 2) bad("n_init must be >= 2");
  if (n_init >= budget) bad("n_init must be smaller than the budget");
  if (!(k > 0.0 && k < 1.0)) bad("k must lie in (0, 1)");
  if (!(epsilon >= 0.0)) bad("epsilon must be >= 0");
  if (window < 2) bad("window must be >= 2");
  if (n_candidates < 1) bad("n_candidates must be >= 1");
  if (!(floor_weight > 0.0 && floor_weight <= 1.0)) bad("floor_weight must lie in (0, 1]");
}

History run(const OptimizerConfig& opt, const ParamSpace& space, const Blackbox& blackbox) {
  opt.validate();
  Rng rng(opt.seed);
  const double log_uniform = space.log_uniform_density();
  const ProposalOptions proposal_options{opt.k, static_cast<std::size_t>(opt.n_candidates),
                                         opt.floor_weight};
  const ScheduleState base_state{opt.budget, 1, opt.epsilon, opt.window};

  History history;
  for (std::int64_t t = 1; t <= opt.budget; ++t) {
    TrialRecord record;
    record.step = t;
    if (t <= opt.n_init) {
      record.config = sample_uniform(space, rng);
      record.log_proposal_density = log_uniform;
    } else {
      auto proposal = propose_next(history, space, proposal_options, rng);
      record.config = std::move(proposal.config);
      record.log_proposal_density = proposal.log_density;
    }

    const Observed obs = observe(blackbox, record.config);
    record.f_value = obs.f;
    record.flags = obs.flags;

    double variance = 0.0;
    if (opt.mode == Mode::kAdaptive) {
      record.lambda_used =
          opt.schedule == Schedule::kCosine ? lambda_schedule(t, opt.budget) : 0.0;
      std::optional<KdeModel> g_model;
      if (history.size() >= 2) g_model = build_g_model(history, opt.k, space, opt.floor_weight);
      ScheduleState state = base_state;
      state.step = t;
      variance = windowed_variance(history, g_model ? &*g_model : nullptr, state,
                                   {record.config, record.f_value, record.log_proposal_density})
                     .variance;
    }
    record.j_score = lagrangian_score(record.f_value, variance, record.lambda_used);
    history.append(std::move(record));
  }
  return history;
}

RunSummary summarize(const History& history) {
  if (history.empty()) Fail(ErrorCode::kInvalidArgument, "cannot summarize an empty history");
  RunSummary s;
  std::vector<double> fs;
  fs.reserve(history.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& t = history[i];
    fs.push_back(t.f_value);
    if (t.f_value > history[best].f_value) best = i;
    s.trajectory.push_back({t.step, t.f_value, t.j_score, t.lambda_used});
  }
  s.max_f = history[best].f_value;
  s.best_step = history[best].step;
  s.best_config = history[best].config;
  double sum = 0.0;
  for (double f : fs) sum += f;
  s.mean_f = sum / static_cast<double>(fs.size());
  s.variance_f = population_variance(fs);
  return s;
}

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kRandomSearch: return "random_search";
    case BaselineKind::kTpeConventional: return "tpe_conventional";
  }
  return "unknown";
}

History run_baseline(BaselineKind kind, const OptimizerConfig& opt, const ParamSpace& space,
                     const Blackbox& blackbox) {
  if (kind == BaselineKind::kTpeConventional) {
    OptimizerConfig conventional = opt;
    conventional.mode = Mode::kConventional;
    return run(conventional, space, blackbox);
  }
  opt.validate();
  Rng rng(opt.seed);
  const double log_uniform = space.log_uniform_density();
  History history;
  for (std::int64_t t = 1; t <= opt.budget; ++t) {
    TrialRecord record;
    record.step = t;
    record.config = sample_uniform(space, rng);
    record.log_proposal_density = log_uniform;
    const Observed obs = observe(blackbox, record.config);
    record.f_value = obs.f;
    record.flags = obs.flags;
    record.j_score = obs.f;
    history.append(std::move(record));
  }
  return history;
}

}  // namespace tpeas
