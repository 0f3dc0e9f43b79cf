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

#ifndef TPEAS_CORE_PARAM_SPACE_HPP
#define TPEAS_CORE_PARAM_SPACE_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace tpeas {

using Rng = std::mt19937_64;

struct ContinuousRange {
  double lo;
  double hi;
};

struct IntegerRange {
  std::int64_t lo;
  std::int64_t hi;
};

struct Choices {
  std::vector<std::string> labels;
};

// Index into the owning domain's ordered label list.
struct Choice {
  std::size_t index;
  friend bool operator==(const Choice&, const Choice&) = default;
};

using DomainKind = std::variant<ContinuousRange, IntegerRange, Choices>;
using ParamValue = std::variant<double, std::int64_t, Choice>;

struct ParamDomain {
  std::string name;
  DomainKind kind;

  bool is_continuous() const { return std::holds_alternative<ContinuousRange>(kind); }
  bool is_integer() const { return std::holds_alternative<IntegerRange>(kind); }
  bool is_categorical() const { return std::holds_alternative<Choices>(kind); }
};

/// Bounded mixed domain. Integer bounds are inclusive, continuous bounds are
/// closed, categorical choices keep their declaration order.
class ParamSpace {
 public:
  ParamSpace() = default;
  /// Throws Error(kInvalidArgument) on empty lists, inverted bounds, fewer
  /// than two distinct choices or duplicate names.
  explicit ParamSpace(std::vector<ParamDomain> domains);

  std::size_t dimension() const { return domains_.size(); }
  const std::vector<ParamDomain>& domains() const { return domains_; }
  const ParamDomain& operator[](std::size_t i) const { return domains_[i]; }

  /// Log of the uniform density over the whole space. Continuous coordinates
  /// contribute 1/(hi-lo), integer 1/(hi-lo+1), categorical 1/|choices|.
  double log_uniform_density() const;

  friend bool operator==(const ParamSpace& a, const ParamSpace& b);

 private:
  std::vector<ParamDomain> domains_;
};

using Config = std::vector<ParamValue>;

enum class ViolationKind { kLengthMismatch, kOutOfBounds, kWrongType };

struct Violation {
  ViolationKind kind;
  std::size_t coordinate;  // unused for kLengthMismatch
  std::string message;
};

/// Empty result means the config is valid.
std::vector<Violation> validate(const ParamSpace& space, const Config& config);

/// Throws Error(kOutOfDomain) listing every violation.
void require_valid(const ParamSpace& space, const Config& config);

Config sample_uniform(const ParamSpace& space, Rng& rng);

// JSON forms: a space is a list of {name, kind, bounds|choices}; a config is an
// object keyed by domain name with categorical values written as labels.
nlohmann::json space_to_json(const ParamSpace& space);
ParamSpace space_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ParamSpace& space, const Config& config);
Config config_from_json(const ParamSpace& space, const nlohmann::json& doc);

}  // namespace tpeas

#endif  // TPEAS_CORE_PARAM_SPACE_HPP
