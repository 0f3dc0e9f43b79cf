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

#include "portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace tpeas {

namespace {

constexpr double kTradingDays = 252.0;
constexpr double kInverseVolTarget = 0.01;  // daily
constexpr std::size_t kRealizedVolWindow = 20;

struct ScenarioDefaults {
  std::int64_t horizon;
  std::vector<Regime> regimes;
  double switch_intensity;
  double reversion;
  double correlation;
};

ScenarioDefaults defaults_for(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kHighVolatility:
      return {252, {{0.80, 0.30}, {-0.60, 0.45}, {0.00, 0.60}}, 6.0, 0.0, 0.4};
    case ScenarioKind::kStableBull:
      return {756, {{0.12, 0.10}, {0.09, 0.13}}, 1.0, 0.0, 0.4};
    case ScenarioKind::kRangeBoundLong:
      return {1260, {{0.0, 0.18}, {0.0, 0.25}}, 2.0, 0.02, 0.4};
    case ScenarioKind::kRangeBoundShort:
      return {1008, {{0.0, 0.18}, {0.0, 0.25}}, 2.0, 0.02, 0.4};
  }
  Fail(ErrorCode::kInvalidArgument, "unknown scenario kind");
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

std::vector<double> prefix_sums(std::span<const double> xs) {
  std::vector<double> out(xs.size() + 1, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) out[i + 1] = out[i] + xs[i];
  return out;
}

double window_sum(const std::vector<double>& prefix, std::size_t first, std::size_t last_exclusive) {
  return prefix[last_exclusive] - prefix[first];
}

struct GroupParams {
  // trend_following: fast, slow, band; mean_reversion: lookback, entry_z,
  // exit_z; threshold_hybrid: mom_lookback, mom_threshold, rsi_period,
  // rsi_threshold.
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double stop_loss = 0.0;
  double size = 0.0;
};

double numeric(const ParamValue& v) {
  if (const auto* x = std::get_if<double>(&v)) return *x;
  return static_cast<double>(std::get<std::int64_t>(v));
}

// Per-asset indicator cache over the price path.
struct AssetSeries {
  std::span<const double> p;
  std::vector<double> price_sum;
  std::vector<double> price_sq_sum;
  std::vector<double> gain_sum;  // over price changes, indexed by day
  std::vector<double> loss_sum;
  std::vector<double> ret_sum;
  std::vector<double> ret_sq_sum;

  explicit AssetSeries(std::span<const double> prices) : p(prices) {
    const std::size_t n = p.size();
    std::vector<double> sq(n), gains(n, 0.0), losses(n, 0.0), rets(n, 0.0), rets_sq(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      sq[t] = p[t] * p[t];
      if (t == 0) continue;
      const double change = p[t] - p[t - 1];
      gains[t] = std::max(change, 0.0);
      losses[t] = std::max(-change, 0.0);
      rets[t] = p[t] / p[t - 1] - 1.0;
      rets_sq[t] = rets[t] * rets[t];
    }
    price_sum = prefix_sums(p);
    price_sq_sum = prefix_sums(sq);
    gain_sum = prefix_sums(gains);
    loss_sum = prefix_sums(losses);
    ret_sum = prefix_sums(rets);
    ret_sq_sum = prefix_sums(rets_sq);
  }

  // Mean price over days [t - len, t - 1].
  double moving_average(std::size_t t, std::size_t len) const {
    return window_sum(price_sum, t - len, t) / static_cast<double>(len);
  }
};

double trend_signal(const AssetSeries& s, std::size_t t, const GroupParams& g) {
  const auto fast = static_cast<std::size_t>(g.a);
  const auto slow = static_cast<std::size_t>(g.b);
  if (t < std::max(fast, slow)) return 0.0;
  const double fast_ma = s.moving_average(t, fast);
  const double slow_ma = s.moving_average(t, slow);
  if (fast_ma > slow_ma * (1.0 + g.c)) return 1.0;
  if (fast_ma < slow_ma * (1.0 - g.c)) return -1.0;
  return 0.0;
}

double reversion_signal(const AssetSeries& s, std::size_t t, const GroupParams& g) {
  const auto len = static_cast<std::size_t>(g.a);
  if (t < len) return 0.0;
  const double mean = s.moving_average(t, len);
  const double mean_sq = window_sum(s.price_sq_sum, t - len, t) / static_cast<double>(len);
  const double sd = std::sqrt(std::max(mean_sq - mean * mean, 0.0));
  if (sd < 1e-12) return 0.0;
  const double z = (s.p[t - 1] - mean) / sd;
  if (std::abs(z) < g.c) return 0.0;
  return std::clamp(-z / g.b, -1.0, 1.0);
}

double hybrid_signal(const AssetSeries& s, std::size_t t, const GroupParams& g) {
  const auto mom_len = static_cast<std::size_t>(g.a);
  const auto rsi_len = static_cast<std::size_t>(g.c);
  if (t < mom_len + 1 || t < rsi_len + 1) return 0.0;
  const double momentum = s.p[t - 1] / s.p[t - 1 - mom_len] - 1.0;
  const double gains = window_sum(s.gain_sum, t - rsi_len, t);
  const double losses = window_sum(s.loss_sum, t - rsi_len, t);
  const double rsi = losses <= 0.0 ? 100.0 : 100.0 - 100.0 / (1.0 + gains / losses);
  if (momentum > g.b && rsi < g.d) return 1.0;
  if (momentum < -g.b && rsi > 100.0 - g.d) return -1.0;
  return 0.0;
}

double inverse_vol_scale(const AssetSeries& s, std::size_t t) {
  if (t < kRealizedVolWindow + 1) return 1.0;
  const double n = static_cast<double>(kRealizedVolWindow);
  const double mean = window_sum(s.ret_sum, t - kRealizedVolWindow, t) / n;
  const double mean_sq = window_sum(s.ret_sq_sum, t - kRealizedVolWindow, t) / n;
  const double vol = std::sqrt(std::max(mean_sq - mean * mean, 0.0));
  if (vol < 1e-12) return 1.0;
  return std::min(1.0, kInverseVolTarget / vol);
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kHighVolatility: return "high_volatility";
    case ScenarioKind::kStableBull: return "stable_bull";
    case ScenarioKind::kRangeBoundLong: return "range_bound_long";
    case ScenarioKind::kRangeBoundShort: return "range_bound_short";
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(std::string_view name) {
  for (auto kind : {ScenarioKind::kHighVolatility, ScenarioKind::kStableBull,
                    ScenarioKind::kRangeBoundLong, ScenarioKind::kRangeBoundShort})
    if (to_string(kind) == name) return kind;
  Fail(ErrorCode::kConfig, "unknown scenario preset '" + std::string(name) + "'");
}

std::int64_t nominal_horizon(ScenarioKind kind) { return defaults_for(kind).horizon; }

ScenarioSpec scenario_preset(ScenarioKind kind, std::uint64_t seed) {
  auto d = defaults_for(kind);
  ScenarioSpec spec;
  spec.kind = kind;
  spec.n_assets = 10;
  spec.n_days = d.horizon;
  spec.seed = seed;
  spec.regimes = std::move(d.regimes);
  spec.switch_intensity = d.switch_intensity;
  spec.reversion = d.reversion;
  spec.correlation = d.correlation;
  spec.drift_dispersion = 0.05;
  return spec;
}

PriceSeries::PriceSeries(std::size_t n_assets, std::size_t n_days)
    : n_assets_(n_assets), n_days_(n_days), prices_(n_assets * n_days, 0.0) {}

std::string PriceSeries::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "day";
  for (std::size_t i = 0; i < n_assets_; ++i) out << ",asset_" << i;
  out << '\n';
  for (std::size_t t = 0; t < n_days_; ++t) {
    out << t;
    for (std::size_t i = 0; i < n_assets_; ++i) out << ',' << price(i, t);
    out << '\n';
  }
  return out.str();
}

PriceSeries generate_scenario(const ScenarioSpec& spec) {
  const auto horizon = static_cast<double>(nominal_horizon(spec.kind));
  const auto days = static_cast<double>(spec.n_days);
  if (days < 0.9 * horizon || days > 1.1 * horizon)
    Fail(ErrorCode::kInvalidArgument, "n_days " + std::to_string(spec.n_days) +
                                          " is outside the +-10% horizon of " +
                                          std::string(to_string(spec.kind)));
  if (spec.n_assets < 1) Fail(ErrorCode::kInvalidArgument, "n_assets must be >= 1");
  if (spec.regimes.empty()) Fail(ErrorCode::kInvalidArgument, "scenario needs at least one regime");
  if (!(spec.start_price > 0.0)) Fail(ErrorCode::kInvalidArgument, "start price must be positive");
  if (spec.correlation < 0.0 || spec.correlation > 1.0)
    Fail(ErrorCode::kInvalidArgument, "correlation must lie in [0, 1]");

  const auto n_assets = static_cast<std::size_t>(spec.n_assets);
  const auto n_days = static_cast<std::size_t>(spec.n_days);
  Rng rng(spec.seed);
  std::normal_distribution<double> shock(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> drift_offset(n_assets);
  for (auto& o : drift_offset) o = spec.drift_dispersion * shock(rng);

  const std::size_t n_regimes = spec.regimes.size();
  std::size_t regime = std::uniform_int_distribution<std::size_t>(0, n_regimes - 1)(rng);
  const double switch_prob = 1.0 - std::exp(-spec.switch_intensity / kTradingDays);
  const double dt = 1.0 / kTradingDays;
  const double idio_loading = std::sqrt(1.0 - spec.correlation * spec.correlation);
  const double log_start = std::log(spec.start_price);

  PriceSeries out(n_assets, n_days);
  std::vector<double> log_price(n_assets, log_start);
  for (std::size_t i = 0; i < n_assets; ++i) out.price(i, 0) = spec.start_price;

  for (std::size_t t = 1; t < n_days; ++t) {
    if (n_regimes > 1 && unit(rng) < switch_prob) {
      const auto step = std::uniform_int_distribution<std::size_t>(1, n_regimes - 1)(rng);
      regime = (regime + step) % n_regimes;
    }
    const Regime& r = spec.regimes[regime];
    const double market = shock(rng);
    for (std::size_t i = 0; i < n_assets; ++i) {
      const double noise = spec.correlation * market + idio_loading * shock(rng);
      const double mu = r.drift + drift_offset[i];
      log_price[i] += (mu - 0.5 * r.volatility * r.volatility) * dt +
                      r.volatility * std::sqrt(dt) * noise +
                      spec.reversion * (log_start - log_price[i]);
      out.price(i, t) = std::exp(log_price[i]);
    }
  }
  return out;
}

std::string_view to_string(StrategyFamily family) {
  switch (family) {
    case StrategyFamily::kTrendFollowing: return "trend_following";
    case StrategyFamily::kMeanReversion: return "mean_reversion";
    case StrategyFamily::kThresholdHybrid: return "threshold_hybrid";
  }
  return "unknown";
}

StrategyFamily strategy_family_from_string(std::string_view name) {
  for (auto f : {StrategyFamily::kTrendFollowing, StrategyFamily::kMeanReversion,
                 StrategyFamily::kThresholdHybrid})
    if (to_string(f) == name) return f;
  Fail(ErrorCode::kConfig, "unknown strategy preset '" + std::string(name) + "'");
}

std::size_t StrategyKind::params_per_group() const {
  return family == StrategyFamily::kThresholdHybrid ? 6 : 5;
}

ParamSpace StrategyKind::param_space() const {
  if (n_groups < 1) Fail(ErrorCode::kInvalidArgument, "strategy needs at least one asset group");
  std::vector<ParamDomain> domains;
  for (std::int64_t g = 0; g < n_groups; ++g) {
    const std::string p = "g" + std::to_string(g) + "_";
    switch (family) {
      case StrategyFamily::kTrendFollowing:
        domains.push_back({p + "fast", IntegerRange{1, 50}});
        domains.push_back({p + "slow", IntegerRange{2, 200}});
        domains.push_back({p + "band", ContinuousRange{0.0, 0.05}});
        break;
      case StrategyFamily::kMeanReversion:
        domains.push_back({p + "lookback", IntegerRange{5, 120}});
        domains.push_back({p + "entry_z", ContinuousRange{0.5, 3.0}});
        domains.push_back({p + "exit_z", ContinuousRange{0.0, 1.5}});
        break;
      case StrategyFamily::kThresholdHybrid:
        domains.push_back({p + "mom_lookback", IntegerRange{5, 120}});
        domains.push_back({p + "mom_threshold", ContinuousRange{0.0, 0.3}});
        domains.push_back({p + "rsi_period", IntegerRange{5, 50}});
        domains.push_back({p + "rsi_threshold", ContinuousRange{50.0, 95.0}});
        break;
    }
    domains.push_back({p + "stop_loss", ContinuousRange{0.01, 0.3}});
    domains.push_back({p + "size", ContinuousRange{0.0, 1.0}});
  }
  domains.push_back({"direction", Choices{{"long_short", "long_only"}}});
  domains.push_back({"sizing", Choices{{"equal", "inverse_vol"}}});
  return ParamSpace(std::move(domains));
}

std::vector<double> run_strategy(const StrategyKind& kind, const Config& params,
                                 const PriceSeries& prices, double cost_rate) {
  require_valid(kind.param_space(), params);
  if (prices.n_days() < 2) Fail(ErrorCode::kInvalidArgument, "price series needs at least 2 days");

  const auto n_groups = static_cast<std::size_t>(kind.n_groups);
  const std::size_t per_group = kind.params_per_group();
  std::vector<GroupParams> groups(n_groups);
  for (std::size_t g = 0; g < n_groups; ++g) {
    const std::size_t base = g * per_group;
    auto& gp = groups[g];
    gp.a = numeric(params[base]);
    gp.b = numeric(params[base + 1]);
    gp.c = numeric(params[base + 2]);
    std::size_t next = base + 3;
    if (kind.family == StrategyFamily::kThresholdHybrid) gp.d = numeric(params[next++]);
    gp.stop_loss = numeric(params[next]);
    gp.size = numeric(params[next + 1]);
  }
  const bool long_only = std::get<Choice>(params[n_groups * per_group]).index == 1;
  const bool inverse_vol = std::get<Choice>(params[n_groups * per_group + 1]).index == 1;

  const std::size_t n_days = prices.n_days();
  const std::size_t n_assets = prices.n_assets();
  std::vector<double> returns(n_days - 1, 0.0);

  for (std::size_t i = 0; i < n_assets; ++i) {
    const AssetSeries series(prices.asset_prices(i));
    const GroupParams& gp = groups[i % n_groups];
    double position = 0.0;
    double entry_price = 0.0;
    int stopped_side = 0;

    for (std::size_t t = 1; t < n_days; ++t) {
      double signal = 0.0;
      switch (kind.family) {
        case StrategyFamily::kTrendFollowing: signal = trend_signal(series, t, gp); break;
        case StrategyFamily::kMeanReversion: signal = reversion_signal(series, t, gp); break;
        case StrategyFamily::kThresholdHybrid: signal = hybrid_signal(series, t, gp); break;
      }
      if (long_only) signal = std::max(signal, 0.0);

      const int side = sign_of(signal);
      const int held = sign_of(position);
      const double last = series.p[t - 1];
      if (side != stopped_side) stopped_side = 0;
      if (stopped_side != 0) {
        signal = 0.0;
      } else if (side != 0 && side == held) {
        const bool hit = side > 0 ? last <= entry_price * (1.0 - gp.stop_loss)
                                  : last >= entry_price * (1.0 + gp.stop_loss);
        if (hit) {
          stopped_side = side;
          signal = 0.0;
        }
      } else if (side != 0) {
        entry_price = last;
      }

      double next_position = signal * gp.size;
      if (inverse_vol) next_position *= inverse_vol_scale(series, t);
      returns[t - 1] += next_position * prices.asset_return(i, t) -
                        cost_rate * std::abs(next_position - position);
      position = next_position;
    }
  }
  for (auto& r : returns) r /= static_cast<double>(n_assets);
  return returns;
}

SharpeResult sharpe_annualized(std::span<const double> returns) {
  if (returns.size() < 2) Fail(ErrorCode::kInvalidArgument, "Sharpe needs at least 2 returns");
  const double n = static_cast<double>(returns.size());
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= n;
  double ss = 0.0;
  for (double r : returns) ss += (r - mean) * (r - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (sd < 1e-12) return {0.0, true};
  return {std::sqrt(kTradingDays) * mean / sd, false};
}

Evaluation evaluate(const StrategyKind& kind, const ScenarioSpec& scenario, const Config& params) {
  const auto prices = generate_scenario(scenario);
  const auto returns = run_strategy(kind, params, prices);
  const auto sharpe = sharpe_annualized(returns);
  return {sharpe.value, sharpe.degenerate};
}

PortfolioBlackbox::PortfolioBlackbox(StrategyKind kind, const ScenarioSpec& scenario)
    : kind_(kind), space_(kind.param_space()), prices_(generate_scenario(scenario)) {}

Evaluation PortfolioBlackbox::operator()(const Config& params) const {
  const auto returns = run_strategy(kind_, params, prices_);
  const auto sharpe = sharpe_annualized(returns);
  return {sharpe.value, sharpe.degenerate};
}

}  // namespace tpeas
