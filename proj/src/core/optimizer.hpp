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

#ifndef TPEAS_CORE_OPTIMIZER_HPP
#define TPEAS_CORE_OPTIMIZER_HPP

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "objective.hpp"
#include "portfolio.hpp"
#include "tpe.hpp"

namespace tpeas {

enum class Mode {
  kConventional,  // maximize f alone: lambda is always 0
  kAdaptive,      // f minus the scheduled penalty on windowed weighted variance
};

enum class Schedule {
  kCosine,
  kZero,  // adaptive machinery with the penalty pinned at 0
};

struct OptimizerConfig {
  std::int64_t budget = 500;
  Mode mode = Mode::kAdaptive;
  double k = 0.15;
  double epsilon = 0.2;
  std::int64_t window = 20;
  std::int64_t n_init = 20;
  std::int64_t n_candidates = 64;
  std::uint64_t seed = 0;
  double floor_weight = 0.1;
  Schedule schedule = Schedule::kCosine;

  /// Throws Error(kConfig) when a field is out of range.
  void validate() const;
};

/// Failures may be reported by throwing or by returning a non-finite f.
using Blackbox = std::function<Evaluation(const Config&)>;

/// The sequential loop: n_init uniform warm-up trials, then TPE proposals on
/// the j_score split. Produces exactly `budget` trials.
History run(const OptimizerConfig& opt, const ParamSpace& space, const Blackbox& blackbox);

struct TrajectoryPoint {
  std::int64_t step;
  double f;
  double j_score;
  double lambda;
};

struct RunSummary {
  double max_f = 0.0;
  double mean_f = 0.0;
  double variance_f = 0.0;  // population variance over the whole run
  std::int64_t best_step = 0;
  Config best_config;
  std::vector<TrajectoryPoint> trajectory;
};

RunSummary summarize(const History& history);

enum class BaselineKind { kRandomSearch, kTpeConventional };

std::string_view to_string(BaselineKind kind);

History run_baseline(BaselineKind kind, const OptimizerConfig& opt, const ParamSpace& space,
                     const Blackbox& blackbox);

}  // namespace tpeas

#endif  // TPEAS_CORE_OPTIMIZER_HPP
