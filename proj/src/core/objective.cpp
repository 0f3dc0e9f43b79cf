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

#include "objective.hpp"

#include <algorithm>
#include <numbers>

#include "error.hpp"

namespace tpeas {

double lambda_schedule(std::int64_t t, std::int64_t eta) {
  if (t < 1 || eta < 1) Fail(ErrorCode::kInvalidArgument, "schedule needs t >= 1 and eta >= 1");
  const double phase =
      std::min(static_cast<double>(t) / static_cast<double>(eta) * std::numbers::pi,
               std::numbers::pi);
  return (1.0 - std::cos(phase)) / 2.0;
}

double importance_weight(double g_density, double q_density, double epsilon) {
  if (!(g_density > 0.0) || !(q_density > 0.0))
    Fail(ErrorCode::kInvalidArgument, "importance weight needs positive densities");
  if (!(epsilon >= 0.0)) Fail(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
  return std::clamp(g_density / q_density, 1.0 - epsilon, 1.0 + epsilon);
}

double importance_weight_log(double log_g, double log_q, double epsilon) {
  if (std::isnan(log_g) || std::isnan(log_q))
    Fail(ErrorCode::kInvalidArgument, "importance weight needs finite log densities");
  if (!(epsilon >= 0.0)) Fail(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
  const double log_ratio = log_g - log_q;
  if (log_ratio == 0.0) return 1.0;
  return std::clamp(std::exp(log_ratio), 1.0 - epsilon, 1.0 + epsilon);
}

double population_variance(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size());
}

WindowStats windowed_variance(const History& history, const KdeModel* g_model,
                              const ScheduleState& state, const CurrentTrial& current) {
  if (state.window < 2) Fail(ErrorCode::kInvalidArgument, "window must be >= 2");
  const auto window = static_cast<std::size_t>(state.window);
  const std::size_t from_history = std::min(window - 1, history.size());

  auto weight = [&](const Config& config, double log_q) {
    if (!g_model) return 1.0;
    return importance_weight_log(g_model->log_density(config), log_q, state.epsilon);
  };

  WindowStats stats;
  stats.weighted_values.reserve(from_history + 1);
  for (std::size_t i = history.size() - from_history; i < history.size(); ++i) {
    const auto& t = history[i];
    stats.weighted_values.push_back(weight(t.config, t.log_proposal_density) * t.f_value);
  }
  stats.weighted_values.push_back(weight(current.config, current.log_proposal_density) *
                                  current.f_value);
  stats.variance = population_variance(stats.weighted_values);
  return stats;
}

double lagrangian_score(double f_value, double variance, double lambda_t) {
  return f_value - lambda_t * variance;
}

KdeModel build_g_model(const History& history, double k, const ParamSpace& space,
                       double floor_weight) {
  if (history.size() < 2) Fail(ErrorCode::kInsufficientHistory, "g model needs at least 2 trials");
  std::vector<const TrialRecord*> ranked;
  ranked.reserve(history.size());
  for (const auto& t : history.trials()) ranked.push_back(&t);
  std::stable_sort(ranked.begin(), ranked.end(), [](const TrialRecord* a, const TrialRecord* b) {
    if (a->f_value != b->f_value) return a->f_value > b->f_value;
    return a->step < b->step;
  });
  const std::size_t n_top = top_group_size(history.size(), k);
  std::vector<Config> members;
  members.reserve(n_top);
  for (std::size_t i = 0; i < n_top; ++i) members.push_back(ranked[i]->config);
  return fit_kde(members, space, floor_weight, search_bandwidth_floor(members.size()));
}

}  // namespace tpeas
