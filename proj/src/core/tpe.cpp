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

#include "tpe.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>

#include "error.hpp"

namespace tpeas {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kLatticeWindowSigmas = 10.0;

double as_number(const ParamValue& v) {
  if (const double* x = std::get_if<double>(&v)) return *x;
  if (const std::int64_t* x = std::get_if<std::int64_t>(&v)) return static_cast<double>(*x);
  return static_cast<double>(std::get<Choice>(v).index);
}

double domain_width(const ParamDomain& d) {
  if (const auto* r = std::get_if<ContinuousRange>(&d.kind)) return r->hi - r->lo;
  const auto& r = std::get<IntegerRange>(d.kind);
  return static_cast<double>(r.hi - r.lo);
}

// log(Phi(b) - Phi(a)) for a <= b.
double log_normal_mass(double a, double b) {
  const double upper = 0.5 * std::erfc(-b / std::sqrt(2.0));
  const double lower = 0.5 * std::erfc(-a / std::sqrt(2.0));
  double mass = upper - lower;
  if (a > 0.0) mass = 0.5 * std::erfc(a / std::sqrt(2.0)) - 0.5 * std::erfc(b / std::sqrt(2.0));
  return std::log(std::max(mass, std::numeric_limits<double>::min()));
}

struct LatticeWindow {
  std::int64_t first;
  std::int64_t last;
};

LatticeWindow lattice_window(double center, double bandwidth, const IntegerRange& r) {
  const auto reach = static_cast<std::int64_t>(std::ceil(kLatticeWindowSigmas * bandwidth)) + 1;
  const auto c = static_cast<std::int64_t>(std::llround(center));
  return {std::max(r.lo, c - reach), std::min(r.hi, c + reach)};
}

double log_sum_exp(std::span<const double> xs) {
  const double hi = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

}  // namespace

void History::append(TrialRecord record) {
  const auto expected = static_cast<std::int64_t>(trials_.size()) + 1;
  if (record.step != expected)
    Fail(ErrorCode::kInvalidArgument, "history expects step " + std::to_string(expected) +
                                          ", got " + std::to_string(record.step));
  trials_.push_back(std::move(record));
}

std::size_t top_group_size(std::size_t n, double k) {
  // The epsilon keeps k*n = 15.000000000000002 from rounding up to 16.
  const auto raw = static_cast<std::size_t>(std::ceil(k * static_cast<double>(n) - 1e-9));
  return std::min(n, std::max<std::size_t>(2, raw));
}

HistorySplit split_history(const History& history, double k) {
  if (!(k > 0.0 && k < 1.0)) Fail(ErrorCode::kInvalidArgument, "k must lie in (0, 1)");
  const std::size_t n = history.size();
  if (n < 2) Fail(ErrorCode::kInsufficientHistory, "split needs at least 2 trials");

  std::vector<const TrialRecord*> ranked;
  ranked.reserve(n);
  for (const auto& t : history.trials()) ranked.push_back(&t);
  std::stable_sort(ranked.begin(), ranked.end(), [](const TrialRecord* a, const TrialRecord* b) {
    if (a->j_score != b->j_score) return a->j_score > b->j_score;
    return a->step < b->step;
  });

  const std::size_t n_good = top_group_size(n, k);
  HistorySplit split;
  split.good.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n_good));
  split.bad.assign(ranked.begin() + static_cast<std::ptrdiff_t>(n_good), ranked.end());
  split.threshold = split.good.back()->j_score;
  return split;
}

KdeModel fit_kde(std::span<const Config> members, const ParamSpace& space, double floor_weight,
                 double bandwidth_floor) {
  if (members.empty()) Fail(ErrorCode::kInvalidArgument, "KDE needs at least one member");
  if (!(floor_weight > 0.0 && floor_weight <= 1.0))
    Fail(ErrorCode::kInvalidArgument, "floor_weight must lie in (0, 1]");
  if (!(bandwidth_floor > 0.0)) Fail(ErrorCode::kInvalidArgument, "bandwidth floor must be positive");
  for (const auto& m : members) require_valid(space, m);

  const std::size_t dims = space.dimension();
  const std::size_t n = members.size();

  KdeModel model;
  model.space_ = space;
  model.n_components_ = n;
  model.floor_weight_ = floor_weight;
  model.bandwidth_.assign(dims, 0.0);
  model.centers_.resize(n * dims);
  model.log_norm_.assign(n * dims, 0.0);
  model.log_match_.assign(dims, 0.0);
  model.log_mismatch_.assign(dims, 0.0);

  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t d = 0; d < dims; ++d) model.centers_[c * dims + d] = as_number(members[c][d]);

  std::size_t numeric_dims = 0;
  for (const auto& d : space.domains()) numeric_dims += d.is_categorical() ? 0 : 1;
  const double scott_factor =
      std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(numeric_dims) + 4.0));

  for (std::size_t d = 0; d < dims; ++d) {
    const auto& domain = space[d];
    if (const auto* choices = std::get_if<Choices>(&domain.kind)) {
      const double uniform = floor_weight / static_cast<double>(choices->labels.size());
      model.log_match_[d] = std::log(1.0 - floor_weight + uniform);
      model.log_mismatch_[d] = std::log(uniform);
      continue;
    }
    double mean = 0.0;
    for (std::size_t c = 0; c < n; ++c) mean += model.centers_[c * dims + d];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double dev = model.centers_[c * dims + d] - mean;
      ss += dev * dev;
    }
    const double sigma = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    const double h = std::max(sigma * scott_factor, bandwidth_floor * domain_width(domain));
    model.bandwidth_[d] = h;

    for (std::size_t c = 0; c < n; ++c) {
      const double center = model.centers_[c * dims + d];
      double& log_norm = model.log_norm_[c * dims + d];
      if (const auto* r = std::get_if<ContinuousRange>(&domain.kind)) {
        log_norm = std::log(h) + kHalfLog2Pi + log_normal_mass((r->lo - center) / h,
                                                               (r->hi - center) / h);
      } else {
        const auto& ir = std::get<IntegerRange>(domain.kind);
        const auto w = lattice_window(center, h, ir);
        double acc = 0.0;
        for (std::int64_t u = w.first; u <= w.last; ++u) {
          const double z = (static_cast<double>(u) - center) / h;
          acc += std::exp(-0.5 * z * z);
        }
        log_norm = std::log(acc);
      }
    }
  }
  return model;
}

std::vector<double> KdeModel::categorical_table(std::size_t dim) const {
  const auto* choices = std::get_if<Choices>(&space_[dim].kind);
  if (!choices) Fail(ErrorCode::kInvalidArgument, "coordinate is not categorical");
  const std::size_t n_labels = choices->labels.size();
  std::vector<double> table(n_labels, floor_weight_ / static_cast<double>(n_labels));
  const double share = (1.0 - floor_weight_) / static_cast<double>(n_components_);
  for (std::size_t c = 0; c < n_components_; ++c)
    table[static_cast<std::size_t>(centers_[c * space_.dimension() + dim])] += share;
  return table;
}

double KdeModel::log_kernel(std::size_t component, std::size_t dim, const ParamValue& v) const {
  const std::size_t idx = component * space_.dimension() + dim;
  const double center = centers_[idx];
  if (const Choice* ch = std::get_if<Choice>(&v))
    return static_cast<double>(ch->index) == center ? log_match_[dim] : log_mismatch_[dim];
  const double z = (as_number(v) - center) / bandwidth_[dim];
  return -0.5 * z * z - log_norm_[idx];
}

double KdeModel::log_density_unchecked(const Config& config) const {
  std::vector<double> per_component(n_components_, 0.0);
  for (std::size_t c = 0; c < n_components_; ++c) {
    double acc = 0.0;
    for (std::size_t d = 0; d < config.size(); ++d) acc += log_kernel(c, d, config[d]);
    per_component[c] = acc;
  }
  return log_sum_exp(per_component) - std::log(static_cast<double>(n_components_));
}

double KdeModel::log_density(const Config& config) const {
  require_valid(space_, config);
  return log_density_unchecked(config);
}

double KdeModel::density(const Config& config) const {
  return std::max(std::exp(log_density(config)), std::numeric_limits<double>::min());
}

Config KdeModel::sample(Rng& rng) const {
  const std::size_t dims = space_.dimension();
  const std::size_t c = std::uniform_int_distribution<std::size_t>(0, n_components_ - 1)(rng);
  Config out;
  out.reserve(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const double center = centers_[c * dims + d];
    const auto& kind = space_[d].kind;
    if (const auto* r = std::get_if<ContinuousRange>(&kind)) {
      std::normal_distribution<double> kernel(center, bandwidth_[d]);
      double x = kernel(rng);
      while (!(x >= r->lo && x <= r->hi)) x = kernel(rng);
      out.emplace_back(x);
    } else if (const auto* ir = std::get_if<IntegerRange>(&kind)) {
      const auto w = lattice_window(center, bandwidth_[d], *ir);
      std::vector<double> weights;
      weights.reserve(static_cast<std::size_t>(w.last - w.first + 1));
      for (std::int64_t u = w.first; u <= w.last; ++u) {
        const double z = (static_cast<double>(u) - center) / bandwidth_[d];
        weights.push_back(std::exp(-0.5 * z * z));
      }
      std::discrete_distribution<std::int64_t> pick(weights.begin(), weights.end());
      out.emplace_back(w.first + pick(rng));
    } else {
      const auto n_labels = std::get<Choices>(kind).labels.size();
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      if (unit(rng) < floor_weight_) {
        out.emplace_back(Choice{std::uniform_int_distribution<std::size_t>(0, n_labels - 1)(rng)});
      } else {
        out.emplace_back(Choice{static_cast<std::size_t>(center)});
      }
    }
  }
  return out;
}

double log_acquisition(const KdeModel& good_model, const KdeModel& bad_model,
                       const Config& config) {
  if (!(good_model.space() == bad_model.space()))
    Fail(ErrorCode::kInvalidArgument, "good and bad models are over different spaces");
  return good_model.log_density(config) - bad_model.log_density(config);
}

double acquisition(const KdeModel& good_model, const KdeModel& bad_model, const Config& config) {
  return std::exp(log_acquisition(good_model, bad_model, config));
}

double search_bandwidth_floor(std::size_t n_members) {
  return std::max(kMinBandwidthFraction, 1.0 / std::min(100.0, static_cast<double>(n_members) + 1.0));
}

Proposal propose_next(const History& history, const ParamSpace& space,
                      const ProposalOptions& options, Rng& rng) {
  if (options.n_candidates < 1) Fail(ErrorCode::kInvalidArgument, "n_candidates must be >= 1");
  const auto split = split_history(history, options.k);

  auto configs_of = [](const std::vector<const TrialRecord*>& group) {
    std::vector<Config> out;
    out.reserve(group.size());
    for (const auto* t : group) out.push_back(t->config);
    return out;
  };
  const auto good_members = configs_of(split.good);
  const KdeModel good = fit_kde(good_members, space, options.floor_weight,
                                search_bandwidth_floor(good_members.size()));

  std::optional<KdeModel> bad;
  if (!split.bad.empty())
    bad = fit_kde(configs_of(split.bad), space, options.floor_weight,
                  search_bandwidth_floor(split.bad.size()));
  const double log_uniform = space.log_uniform_density();

  Proposal best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < options.n_candidates; ++i) {
    Config candidate = good.sample(rng);
    const double log_good = good.log_density(candidate);
    const double log_bad = bad ? bad->log_density(candidate) : log_uniform;
    const double score = log_good - log_bad;
    if (i == 0 || score > best_score) {
      best_score = score;
      best.config = std::move(candidate);
      best.log_density = log_good;
    }
  }
  return best;
}

}  // namespace tpeas
