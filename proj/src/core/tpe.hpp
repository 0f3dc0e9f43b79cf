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

#ifndef TPEAS_CORE_TPE_HPP
#define TPEAS_CORE_TPE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "param_space.hpp"

namespace tpeas {

enum TrialFlag : std::uint32_t {
  kFlagNone = 0,
  kFlagFailed = 1u << 0,      // blackbox threw or returned a non-finite value
  kFlagDegenerate = 1u << 1,  // zero-volatility return series
};

struct TrialRecord {
  std::int64_t step = 0;
  Config config;
  double f_value = 0.0;
  double j_score = 0.0;
  // log q(x) of the model that generated the config, frozen at proposal time.
  double log_proposal_density = 0.0;
  double lambda_used = 0.0;
  std::uint32_t flags = kFlagNone;

  double proposal_density() const { return std::exp(log_proposal_density); }
};

/// Append-only trial sequence with steps 1, 2, 3, ...
class History {
 public:
  void append(TrialRecord record);
  std::size_t size() const { return trials_.size(); }
  bool empty() const { return trials_.empty(); }
  const TrialRecord& operator[](std::size_t i) const { return trials_[i]; }
  const std::vector<TrialRecord>& trials() const { return trials_; }

 private:
  std::vector<TrialRecord> trials_;
};

/// Size of the top group for a history of n trials: max(2, ceil(k*n)),
/// capped at n.
std::size_t top_group_size(std::size_t n, double k);

struct HistorySplit {
  std::vector<const TrialRecord*> good;
  std::vector<const TrialRecord*> bad;
  double threshold = 0.0;  // lowest j_score in good
};

/// Ranks by j_score descending, lower step first on ties. The returned
/// pointers refer into `history`.
HistorySplit split_history(const History& history, double k);

/// Product-kernel Parzen estimator over a mixed space with uniform mixture
/// weights. Continuous coordinates use a Gaussian truncated to the bounds,
/// integer coordinates a Gaussian restricted to the integer lattice inside the
/// bounds, categorical coordinates keep (1 - w) on the member's label and
/// spread w uniformly over all labels.
class KdeModel {
 public:
  const ParamSpace& space() const { return space_; }
  std::size_t size() const { return n_components_; }
  double floor_weight() const { return floor_weight_; }

  /// One entry per coordinate; zero for categorical coordinates.
  std::span<const double> bandwidths() const { return bandwidth_; }

  /// Marginal label probabilities of a categorical coordinate.
  std::vector<double> categorical_table(std::size_t dim) const;

  double log_density(const Config& config) const;

  /// exp(log_density), floored at the smallest normal double so that far-tail
  /// evaluations stay strictly positive.
  double density(const Config& config) const;

  Config sample(Rng& rng) const;

 private:
  friend KdeModel fit_kde(std::span<const Config>, const ParamSpace&, double, double);

  double log_density_unchecked(const Config& config) const;
  double log_kernel(std::size_t component, std::size_t dim, const ParamValue& v) const;

  ParamSpace space_;
  std::size_t n_components_ = 0;
  double floor_weight_ = 0.1;
  std::vector<double> bandwidth_;
  // Row-major [component][dim]. Categorical centers hold the label index.
  std::vector<double> centers_;
  // Row-major [component][dim] log normalizer of the kernel (numeric dims).
  std::vector<double> log_norm_;
  std::vector<double> log_match_;     // per dim, categorical only
  std::vector<double> log_mismatch_;  // per dim, categorical only
};

inline constexpr double kMinBandwidthFraction = 1e-3;

/// floor_weight must lie in (0, 1]. Numeric bandwidths never drop below
/// bandwidth_floor times the domain width. Throws on an empty member list or
/// a member outside the space.
KdeModel fit_kde(std::span<const Config> members, const ParamSpace& space,
                 double floor_weight = 0.1, double bandwidth_floor = kMinBandwidthFraction);

/// Bandwidth floor, as a fraction of the domain width, for the models fitted
/// during search: 1 / min(100, n + 1). Keeps a group of near-duplicate
/// members from shrinking its kernels to a point.
double search_bandwidth_floor(std::size_t n_members);

/// gamma(x) / Omega(x), computed from log densities.
double acquisition(const KdeModel& good_model, const KdeModel& bad_model, const Config& config);
double log_acquisition(const KdeModel& good_model, const KdeModel& bad_model,
                       const Config& config);

struct Proposal {
  Config config;
  double log_density = 0.0;  // under the good model
};

struct ProposalOptions {
  double k = 0.15;
  std::size_t n_candidates = 64;
  double floor_weight = 0.1;
};

/// Draws n_candidates configs from the good-group KDE and returns the one with
/// the largest density ratio. With an empty bad group the uniform density over
/// the space stands in for the bad model.
Proposal propose_next(const History& history, const ParamSpace& space,
                      const ProposalOptions& options, Rng& rng);

}  // namespace tpeas

#endif  // TPEAS_CORE_TPE_HPP
