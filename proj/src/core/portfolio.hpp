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

#ifndef TPEAS_CORE_PORTFOLIO_HPP
#define TPEAS_CORE_PORTFOLIO_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "param_space.hpp"

namespace tpeas {

// -----------------------------------------------------------------------------
// Market scenarios
// -----------------------------------------------------------------------------

enum class ScenarioKind { kHighVolatility, kStableBull, kRangeBoundLong, kRangeBoundShort };

struct Regime {
  double drift;       // annualized
  double volatility;  // annualized
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kHighVolatility;
  std::int64_t n_assets = 10;
  std::int64_t n_days = 252;
  std::uint64_t seed = 0;
  std::vector<Regime> regimes;
  double switch_intensity = 0.0;  // expected regime switches per year
  double reversion = 0.0;         // daily pull of log price toward the start
  double correlation = 0.0;       // loading on the common market shock
  double drift_dispersion = 0.0;  // per-asset annualized drift offset scale
  double start_price = 100.0;
};

std::string_view to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(std::string_view name);

/// Nominal horizon in trading days; generate_scenario accepts +-10%.
std::int64_t nominal_horizon(ScenarioKind kind);

ScenarioSpec scenario_preset(ScenarioKind kind, std::uint64_t seed);

/// Asset-major price matrix. Day 0 is the start price.
class PriceSeries {
 public:
  PriceSeries(std::size_t n_assets, std::size_t n_days);

  std::size_t n_assets() const { return n_assets_; }
  std::size_t n_days() const { return n_days_; }
  double price(std::size_t asset, std::size_t day) const { return prices_[asset * n_days_ + day]; }
  double& price(std::size_t asset, std::size_t day) { return prices_[asset * n_days_ + day]; }
  /// Simple return of day t >= 1.
  double asset_return(std::size_t asset, std::size_t day) const {
    return price(asset, day) / price(asset, day - 1) - 1.0;
  }
  std::span<const double> asset_prices(std::size_t asset) const {
    return {prices_.data() + asset * n_days_, n_days_};
  }

  /// One row per day, one column per asset, with a header row.
  std::string to_csv() const;

  friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

 private:
  std::size_t n_assets_;
  std::size_t n_days_;
  std::vector<double> prices_;
};

/// Regime-switching geometric Brownian motion. Deterministic given spec.seed.
PriceSeries generate_scenario(const ScenarioSpec& spec);

// -----------------------------------------------------------------------------
// Strategies
// -----------------------------------------------------------------------------

enum class StrategyFamily { kTrendFollowing, kMeanReversion, kThresholdHybrid };

std::string_view to_string(StrategyFamily family);
StrategyFamily strategy_family_from_string(std::string_view name);

/// A strategy family with its parameters replicated over asset groups. Asset i
/// belongs to group i % n_groups. The schema ends with two global categorical
/// switches: direction {long_short, long_only} and sizing {equal, inverse_vol}.
struct StrategyKind {
  StrategyFamily family = StrategyFamily::kTrendFollowing;
  std::int64_t n_groups = 5;

  std::size_t params_per_group() const;
  ParamSpace param_space() const;
};

inline constexpr double kDefaultCostRate = 0.0005;  // 5 bp per unit of turnover

/// Daily portfolio returns for days 1..n_days-1. Positions for day t are
/// decided from prices up to day t-1.
std::vector<double> run_strategy(const StrategyKind& kind, const Config& params,
                                 const PriceSeries& prices, double cost_rate = kDefaultCostRate);

struct SharpeResult {
  double value = 0.0;
  bool degenerate = false;  // stddev below 1e-12; value forced to 0
};

/// sqrt(252) * mean / sample stddev.
SharpeResult sharpe_annualized(std::span<const double> returns);

struct Evaluation {
  double f = 0.0;
  bool degenerate = false;

  Evaluation() = default;
  Evaluation(double value, bool is_degenerate = false) : f(value), degenerate(is_degenerate) {}
};

Evaluation evaluate(const StrategyKind& kind, const ScenarioSpec& scenario, const Config& params);

/// evaluate() with the price series generated once up front.
class PortfolioBlackbox {
 public:
  PortfolioBlackbox(StrategyKind kind, const ScenarioSpec& scenario);

  const StrategyKind& kind() const { return kind_; }
  const ParamSpace& space() const { return space_; }
  const PriceSeries& prices() const { return prices_; }

  Evaluation operator()(const Config& params) const;

 private:
  StrategyKind kind_;
  ParamSpace space_;
  PriceSeries prices_;
};

}  // namespace tpeas

#endif  // TPEAS_CORE_PORTFOLIO_HPP
