#include <cmath>
#include <numeric>

#include "doctest.h"
#include "error.hpp"
#include "portfolio.hpp"
#include "test_util.hpp"

using namespace tpeas;

namespace {

// Every group sized to zero, everything else at the middle of its range.
Config zero_size_config(const StrategyKind& kind) {
  const auto space = kind.param_space();
  Config c;
  for (const auto& d : space.domains()) {
    if (d.name.ends_with("_size")) {
      c.emplace_back(0.0);
    } else if (const auto* r = std::get_if<ContinuousRange>(&d.kind)) {
      c.emplace_back(0.5 * (r->lo + r->hi));
    } else if (const auto* i = std::get_if<IntegerRange>(&d.kind)) {
      c.emplace_back((i->lo + i->hi) / 2);
    } else {
      c.emplace_back(Choice{0});
    }
  }
  return c;
}

PriceSeries single_asset(const std::vector<double>& path) {
  PriceSeries p(1, path.size());
  for (std::size_t t = 0; t < path.size(); ++t) p.price(0, t) = path[t];
  return p;
}

// One group: fast, slow, band, stop_loss, size, direction, sizing.
Config trend_config(std::int64_t fast, std::int64_t slow, double band, double stop, double size) {
  return Config{fast, slow, band, stop, size, Choice{0}, Choice{0}};
}

}  // namespace

TEST_CASE("scenario generation is deterministic") {
  for (auto kind : {ScenarioKind::kHighVolatility, ScenarioKind::kStableBull,
                    ScenarioKind::kRangeBoundLong, ScenarioKind::kRangeBoundShort}) {
    const auto spec = scenario_preset(kind, 42);
    const auto a = generate_scenario(spec);
    const auto b = generate_scenario(spec);
    CHECK(a == b);
    CHECK(a.n_days() == static_cast<std::size_t>(nominal_horizon(kind)));
    for (std::size_t i = 0; i < a.n_assets(); ++i)
      for (double p : a.asset_prices(i)) CHECK(p > 0.0);
    CHECK_FALSE(a == generate_scenario(scenario_preset(kind, 43)));
  }
}

TEST_CASE("scenario presets follow their regime descriptions") {
  const auto hv = scenario_preset(ScenarioKind::kHighVolatility, 0);
  CHECK(hv.regimes.size() >= 3);
  for (const auto& r : hv.regimes) {
    CHECK(r.volatility >= 0.25);
    CHECK(r.volatility <= 0.60);
  }
  for (const auto& r : scenario_preset(ScenarioKind::kStableBull, 0).regimes) {
    CHECK(r.drift >= 0.08);
    CHECK(r.drift <= 0.15);
    CHECK(r.volatility >= 0.08);
    CHECK(r.volatility <= 0.15);
  }
  const auto rb = scenario_preset(ScenarioKind::kRangeBoundLong, 0);
  CHECK(rb.reversion > 0.0);
  for (const auto& r : rb.regimes) CHECK(r.drift == 0.0);
  CHECK(nominal_horizon(ScenarioKind::kHighVolatility) == 252);
  CHECK(nominal_horizon(ScenarioKind::kStableBull) == 756);
  CHECK(nominal_horizon(ScenarioKind::kRangeBoundLong) == 1260);
  CHECK(nominal_horizon(ScenarioKind::kRangeBoundShort) == 1008);
}

TEST_CASE("horizon outside the tolerance is rejected") {
  auto spec = scenario_preset(ScenarioKind::kStableBull, 1);
  spec.n_days = 681;
  CHECK_NOTHROW(generate_scenario(spec));
  spec.n_days = 831;
  CHECK_NOTHROW(generate_scenario(spec));
  spec.n_days = 680;
  CHECK_THROWS_AS(generate_scenario(spec), Error);
  spec.n_days = 832;
  CHECK_THROWS_AS(generate_scenario(spec), Error);
}

TEST_CASE("stable bull assets gain on average") {
  int positive = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto spec = scenario_preset(ScenarioKind::kStableBull, seed);
    spec.n_assets = 20;
    const auto prices = generate_scenario(spec);
    double total = 0.0;
    for (std::size_t i = 0; i < prices.n_assets(); ++i) {
      const auto path = prices.asset_prices(i);
      const double years = static_cast<double>(path.size() - 1) / 252.0;
      total += std::log(path.back() / path.front()) / years;
    }
    positive += total > 0.0;
  }
  CHECK(positive >= 18);
}

TEST_CASE("zero volatility gives the deterministic growth path") {
  auto spec = scenario_preset(ScenarioKind::kStableBull, 5);
  spec.regimes = {{0.1, 0.0}};
  spec.switch_intensity = 0.0;
  spec.drift_dispersion = 0.0;
  spec.n_assets = 3;
  const auto prices = generate_scenario(spec);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t t = 0; t < prices.n_days(); ++t)
      CHECK(prices.price(i, t) ==
            doctest::Approx(100.0 * std::exp(0.1 * static_cast<double>(t) / 252.0)).epsilon(1e-12));
}

TEST_CASE("strategy schemas") {
  const StrategyKind m1{StrategyFamily::kTrendFollowing, 5};
  const StrategyKind m2{StrategyFamily::kMeanReversion, 5};
  const StrategyKind m3{StrategyFamily::kThresholdHybrid, 5};
  CHECK(m1.param_space().dimension() == 27);
  CHECK(m2.param_space().dimension() == 27);
  CHECK(m3.param_space().dimension() == 32);
  const auto space = m3.param_space();
  CHECK(space[0].name == "g0_mom_lookback");
  CHECK(space[31].name == "sizing");
  CHECK(StrategyKind{StrategyFamily::kTrendFollowing, 1}.param_space().dimension() == 7);
  CHECK(strategy_family_from_string("threshold_hybrid") == StrategyFamily::kThresholdHybrid);
  CHECK_THROWS_AS(strategy_family_from_string("momentum"), Error);
  CHECK(scenario_kind_from_string("range_bound_short") == ScenarioKind::kRangeBoundShort);
}

TEST_CASE("trend following on a rising path stays long") {
  const StrategyKind kind{StrategyFamily::kTrendFollowing, 1};
  const std::vector<double> path = {100.0, 101.0, 102.5, 104.0, 106.0};
  const auto r = run_strategy(kind, trend_config(1, 2, 0.0, 0.3, 1.0), single_asset(path));
  // Day 1 lacks the slow window. From day 2 on fast > slow; entry cost on day 2 only.
  REQUIRE(r.size() == 4);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == doctest::Approx(102.5 / 101.0 - 1.0 - 0.0005).epsilon(1e-14));
  CHECK(r[2] == doctest::Approx(104.0 / 102.5 - 1.0).epsilon(1e-14));
  CHECK(r[3] == doctest::Approx(106.0 / 104.0 - 1.0).epsilon(1e-14));
}

TEST_CASE("trend following flips on a reversal") {
  const StrategyKind kind{StrategyFamily::kTrendFollowing, 1};
  const std::vector<double> path = {100.0, 101.0, 103.0, 102.0, 99.0};
  const auto r = run_strategy(kind, trend_config(1, 2, 0.0, 0.3, 0.5), single_asset(path));
  REQUIRE(r.size() == 4);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == doctest::Approx(0.5 * (103.0 / 101.0 - 1.0) - 0.0005 * 0.5).epsilon(1e-14));
  CHECK(r[2] == doctest::Approx(0.5 * (102.0 / 103.0 - 1.0)).epsilon(1e-14));
  // fast 102 < slow 102.5: short, turnover 1.0.
  CHECK(r[3] == doctest::Approx(-0.5 * (99.0 / 102.0 - 1.0) - 0.0005).epsilon(1e-14));
}

TEST_CASE("stop loss exits and stays out until the signal changes") {
  const StrategyKind kind{StrategyFamily::kTrendFollowing, 1};
  // Long entered at 110 on day 3; a band keeps the signal long while the price
  // slides below 110 * 0.95.
  const std::vector<double> path = {100.0, 100.0, 110.0, 108.0, 104.0, 103.0, 103.0};
  const auto r = run_strategy(kind, trend_config(1, 3, 0.0, 0.05, 1.0), single_asset(path));
  REQUIRE(r.size() == 6);
  // t=3: fast 110 > slow 103.33, enter long at 110.
  CHECK(r[2] == doctest::Approx(108.0 / 110.0 - 1.0 - 0.0005).epsilon(1e-12));
  // t=4: fast 108 > slow 106, still above the stop level 104.5.
  CHECK(r[3] == doctest::Approx(104.0 / 108.0 - 1.0).epsilon(1e-12));
  // t=5: fast 104 < slow 107.33, short at 104.
  CHECK(r[4] == doctest::Approx(-(103.0 / 104.0 - 1.0) - 0.001).epsilon(1e-12));


  const std::vector<double> stop_path = {100.0, 100.0, 100.0, 100.0, 100.0, 120.0, 113.0, 112.0, 125.0};
  const auto st = run_strategy(kind, trend_config(1, 5, 0.0, 0.05, 1.0), single_asset(stop_path));
  REQUIRE(st.size() == 8);
  // t=5: fast 100 == slow 100: flat. t=6: fast 120 > slow 104: long at 120.
  CHECK(st[5] == doctest::Approx(113.0 / 120.0 - 1.0 - 0.0005).epsilon(1e-12));
  // t=7: fast 113 > slow 106.6 but 113 <= 114: stopped out, pay to exit.
  CHECK(st[6] == doctest::Approx(-0.0005).epsilon(1e-12));
  // t=8: still long signal (112 > 109), stays out.
  CHECK(st[7] == 0.0);
}

TEST_CASE("zero sizing gives zero returns and a degenerate score") {
  for (auto family : {StrategyFamily::kTrendFollowing, StrategyFamily::kMeanReversion,
                      StrategyFamily::kThresholdHybrid}) {
    const StrategyKind kind{family, 5};
    const auto scenario = scenario_preset(ScenarioKind::kHighVolatility, 3);
    const auto params = zero_size_config(kind);
    for (double r : run_strategy(kind, params, generate_scenario(scenario))) CHECK(r == 0.0);
    const auto e = evaluate(kind, scenario, params);
    CHECK(e.f == 0.0);
    CHECK(e.degenerate);
  }
}

TEST_CASE("strategies do not look ahead") {
  const auto base = generate_scenario(scenario_preset(ScenarioKind::kHighVolatility, 11));
  for (auto family : {StrategyFamily::kTrendFollowing, StrategyFamily::kMeanReversion,
                      StrategyFamily::kThresholdHybrid}) {
    const StrategyKind kind{family, 5};
    const auto space = kind.param_space();
    Rng rng(static_cast<std::uint64_t>(family) + 100);
    for (int trial = 0; trial < 10; ++trial) {
      const auto params = sample_uniform(space, rng);
      const auto before = run_strategy(kind, params, base);
      const std::size_t t = 60 + 15 * static_cast<std::size_t>(trial);
      auto perturbed = base;
      for (std::size_t i = 0; i < perturbed.n_assets(); ++i) perturbed.price(i, t) *= 1.07;
      const auto after = run_strategy(kind, params, perturbed);
      // returns[d - 1] belongs to day d; days before t are untouched.
      for (std::size_t d = 1; d < t; ++d) CHECK(after[d - 1] == before[d - 1]);
    }
  }
}

TEST_CASE("transaction costs reduce total return") {
  const auto prices = generate_scenario(scenario_preset(ScenarioKind::kHighVolatility, 2));
  const StrategyKind kind{StrategyFamily::kTrendFollowing, 5};
  Rng rng(8);
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const auto params = sample_uniform(kind.param_space(), rng);
    const auto free = run_strategy(kind, params, prices, 0.0);
    const auto costly = run_strategy(kind, params, prices);
    const double a = std::accumulate(free.begin(), free.end(), 0.0);
    const double b = std::accumulate(costly.begin(), costly.end(), 0.0);
    bool traded = false;
    for (std::size_t d = 0; d < free.size(); ++d) traded |= free[d] != costly[d];
    if (traded) {
      CHECK(b < a);
      ++checked;
    } else {
      CHECK(b == a);
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("run_strategy rejects invalid parameters") {
  const StrategyKind kind{StrategyFamily::kTrendFollowing, 1};
  const auto prices = single_asset({100.0, 101.0, 102.0});
  CHECK_THROWS_AS(run_strategy(kind, trend_config(0, 2, 0.0, 0.1, 1.0), prices), Error);
  CHECK_THROWS_AS(run_strategy(kind, Config{std::int64_t{1}}, prices), Error);
}

TEST_CASE("long lookbacks leave an uncovered flat prefix") {
  const StrategyKind kind{StrategyFamily::kTrendFollowing, 1};
  std::vector<double> path;
  for (int t = 0; t < 30; ++t) path.push_back(100.0 + t);
  const auto r = run_strategy(kind, trend_config(3, 200, 0.0, 0.1, 1.0), single_asset(path));
  for (double x : r) CHECK(x == 0.0);
}

TEST_CASE("sharpe_annualized") {
  const std::vector<double> r = {0.01, -0.01, 0.02};
  const double mean = 0.02 / 3.0;
  const double sd = std::sqrt(((0.01 - mean) * (0.01 - mean) + (-0.01 - mean) * (-0.01 - mean) +
                               (0.02 - mean) * (0.02 - mean)) /
                              2.0);
  const auto s = sharpe_annualized(r);
  CHECK(s.value == doctest::Approx(std::sqrt(252.0) * mean / sd).epsilon(1e-12));
  CHECK(s.value == doctest::Approx(6.93).epsilon(1e-3));
  CHECK_FALSE(s.degenerate);

  const std::vector<double> neg = {-0.01, 0.01, -0.02};
  CHECK(sharpe_annualized(neg).value == -s.value);
  const std::vector<double> scaled = {0.037, -0.037, 0.074};
  CHECK(sharpe_annualized(scaled).value == doctest::Approx(s.value).epsilon(1e-12));

  const auto zero = sharpe_annualized(std::vector<double>(10, 0.0));
  CHECK(zero.value == 0.0);
  CHECK(zero.degenerate);
  CHECK(sharpe_annualized(std::vector<double>(5, 0.003)).degenerate);
  CHECK_THROWS_AS(sharpe_annualized(std::vector<double>{0.1}), Error);
}

TEST_CASE("evaluate is deterministic and matches the cached black box") {
  const StrategyKind kind{StrategyFamily::kMeanReversion, 5};
  const auto scenario = scenario_preset(ScenarioKind::kRangeBoundShort, 4);
  const PortfolioBlackbox box(kind, scenario);
  Rng rng(6);
  for (int i = 0; i < 5; ++i) {
    const auto params = sample_uniform(kind.param_space(), rng);
    const auto a = evaluate(kind, scenario, params);
    const auto b = evaluate(kind, scenario, params);
    CHECK(a.f == b.f);
    CHECK(box(params).f == a.f);
  }
}

TEST_CASE("threshold hybrid on high volatility spans both signs") {
  const StrategyKind kind{StrategyFamily::kThresholdHybrid, 5};
  const PortfolioBlackbox box(kind, scenario_preset(ScenarioKind::kHighVolatility, 0));
  Rng rng(1000);
  int pos = 0, neg = 0;
  for (int i = 0; i < 1000; ++i) {
    const double f = box(sample_uniform(box.space(), rng)).f;
    pos += f > 0.0;
    neg += f < 0.0;
  }
  CHECK(pos > 0);
  CHECK(neg > 0);
}

TEST_CASE("price export has one row per day") {
  auto spec = scenario_preset(ScenarioKind::kHighVolatility, 0);
  spec.n_assets = 2;
  const auto csv = generate_scenario(spec).to_csv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 253);
  CHECK(csv.starts_with("day,"));
}
