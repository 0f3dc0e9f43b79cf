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

#ifndef TPEAS_CORE_OBJECTIVE_HPP
#define TPEAS_CORE_OBJECTIVE_HPP

#include <cstdint>
#include <vector>

#include "tpe.hpp"

namespace tpeas {

struct ScheduleState {
  std::int64_t budget = 500;
  std::int64_t step = 1;
  double epsilon = 0.2;
  std::int64_t window = 20;
};

struct WindowStats {
  std::vector<double> weighted_values;  // oldest first, current trial last
  double variance = 0.0;
};

/// Cosine ramp (1 - cos(min(t*pi/eta, pi))) / 2. Exactly 1 for t >= eta.
double lambda_schedule(std::int64_t t, std::int64_t eta);

/// clip(g/q, 1 - eps, 1 + eps).
double importance_weight(double g_density, double q_density, double epsilon);

/// Same clip, from log densities, so tail densities do not underflow.
double importance_weight_log(double log_g, double log_q, double epsilon);

/// Population variance; zero for fewer than two values.
double population_variance(std::span<const double> values);

struct CurrentTrial {
  const Config& config;
  double f_value;
  double log_proposal_density;
};

/// Trailing window of at most state.window trials ending with `current`
/// (which is not yet in `history`). Each f is multiplied by its clipped
/// importance weight g(x)/q(x); a null g_model means unit weights.
WindowStats windowed_variance(const History& history, const KdeModel* g_model,
                              const ScheduleState& state, const CurrentTrial& current);

/// f - lambda * variance.
double lagrangian_score(double f_value, double variance, double lambda_t);

/// KDE over the configs of the top-ranked trials by raw f (ties by step),
/// with the same bandwidth floor as the proposal models.
KdeModel build_g_model(const History& history, double k, const ParamSpace& space,
                       double floor_weight = 0.1);

}  // namespace tpeas

#endif  // TPEAS_CORE_OBJECTIVE_HPP
