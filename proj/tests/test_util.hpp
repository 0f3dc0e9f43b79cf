// Shared fixtures for the test suites.
#ifndef TPEAS_TESTS_TEST_UTIL_HPP
#define TPEAS_TESTS_TEST_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "optimizer.hpp"
#include "param_space.hpp"

namespace tpeas::testing {

inline ParamSpace unit_square() {
  return ParamSpace({{"x1", ContinuousRange{0.0, 1.0}}, {"x2", ContinuousRange{0.0, 1.0}}});
}

// -(x1 - 0.3)^2 - (x2 - 0.7)^2, maximum 0 at (0.3, 0.7).
inline Evaluation quadratic(const Config& c) {
  const double x1 = std::get<double>(c[0]);
  const double x2 = std::get<double>(c[1]);
  return Evaluation(-(x1 - 0.3) * (x1 - 0.3) - (x2 - 0.7) * (x2 - 0.7));
}

// Exhaustive evaluation on a 101 x 101 grid.
inline double quadratic_grid_optimum() {
  double best = -1e300;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j)
      best = std::max(best, quadratic(Config{i / 100.0, j / 100.0}).f);
  return best;
}

inline double best_f(const History& h) {
  double best = h[0].f_value;
  for (const auto& t : h.trials()) best = std::max(best, t.f_value);
  return best;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// A random mixed space with `dims` coordinates.
inline ParamSpace random_space(std::mt19937_64& rng, std::size_t dims) {
  std::vector<ParamDomain> domains;
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_real_distribution<double> real(-10.0, 10.0);
  for (std::size_t i = 0; i < dims; ++i) {
    const std::string name = "p" + std::to_string(i);
    switch (kind(rng)) {
      case 0: {
        const double lo = real(rng);
        domains.push_back({name, ContinuousRange{lo, lo + 0.1 + std::abs(real(rng))}});
        break;
      }
      case 1: {
        const auto lo = static_cast<std::int64_t>(real(rng));
        domains.push_back({name, IntegerRange{lo, lo + 1 + static_cast<std::int64_t>(std::abs(real(rng)))}});
        break;
      }
      default: {
        std::vector<std::string> labels;
        const int n = std::uniform_int_distribution<int>(2, 5)(rng);
        for (int j = 0; j < n; ++j) labels.push_back("c" + std::to_string(j));
        domains.push_back({name, Choices{labels}});
      }
    }
  }
  return ParamSpace(std::move(domains));
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("tpeas_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace tpeas::testing

#endif  // TPEAS_TESTS_TEST_UTIL_HPP
