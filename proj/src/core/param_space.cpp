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

#include "param_space.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "error.hpp"

namespace tpeas {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_domain(const ParamDomain& d) {
  if (d.name.empty()) Fail(ErrorCode::kInvalidArgument, "parameter with empty name");
  std::visit(Overloaded{
                 [&](const ContinuousRange& r) {
                   if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi))
                     Fail(ErrorCode::kInvalidArgument,
                          "continuous parameter '" + d.name + "' needs finite lo < hi");
                 },
                 [&](const IntegerRange& r) {
                   if (!(r.lo < r.hi))
                     Fail(ErrorCode::kInvalidArgument,
                          "integer parameter '" + d.name + "' needs lo < hi");
                 },
                 [&](const Choices& c) {
                   std::set<std::string> distinct(c.labels.begin(), c.labels.end());
                   if (c.labels.size() < 2 || distinct.size() != c.labels.size())
                     Fail(ErrorCode::kInvalidArgument,
                          "categorical parameter '" + d.name +
                              "' needs at least 2 distinct choices");
                 },
             },
             d.kind);
}

}  // namespace

ParamSpace::ParamSpace(std::vector<ParamDomain> domains) : domains_(std::move(domains)) {
  if (domains_.empty()) Fail(ErrorCode::kInvalidArgument, "parameter space is empty");
  std::set<std::string> names;
  for (const auto& d : domains_) {
    check_domain(d);
    if (!names.insert(d.name).second)
      Fail(ErrorCode::kInvalidArgument, "duplicate parameter name '" + d.name + "'");
  }
}

double ParamSpace::log_uniform_density() const {
  double log_density = 0.0;
  for (const auto& d : domains_) {
    std::visit(Overloaded{
                   [&](const ContinuousRange& r) { log_density -= std::log(r.hi - r.lo); },
                   [&](const IntegerRange& r) {
                     log_density -= std::log(static_cast<double>(r.hi - r.lo) + 1.0);
                   },
                   [&](const Choices& c) {
                     log_density -= std::log(static_cast<double>(c.labels.size()));
                   },
               },
               d.kind);
  }
  return log_density;
}

bool operator==(const ParamSpace& a, const ParamSpace& b) {
  if (a.dimension() != b.dimension()) return false;
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    const auto& da = a[i];
    const auto& db = b[i];
    if (da.name != db.name || da.kind.index() != db.kind.index()) return false;
    bool same = std::visit(
        Overloaded{
            [&](const ContinuousRange& r) {
              const auto& o = std::get<ContinuousRange>(db.kind);
              return r.lo == o.lo && r.hi == o.hi;
            },
            [&](const IntegerRange& r) {
              const auto& o = std::get<IntegerRange>(db.kind);
              return r.lo == o.lo && r.hi == o.hi;
            },
            [&](const Choices& c) { return c.labels == std::get<Choices>(db.kind).labels; },
        },
        da.kind);
    if (!same) return false;
  }
  return true;
}

std::vector<Violation> validate(const ParamSpace& space, const Config& config) {
  std::vector<Violation> out;
  if (config.size() != space.dimension()) {
    std::ostringstream msg;
    msg << "config has " << config.size() << " values, space has " << space.dimension();
    out.push_back({ViolationKind::kLengthMismatch, 0, msg.str()});
    return out;
  }
  for (std::size_t i = 0; i < config.size(); ++i) {
    const auto& d = space[i];
    const auto& v = config[i];
    auto wrong_type = [&] {
      out.push_back({ViolationKind::kWrongType, i, "'" + d.name + "' has the wrong value type"});
    };
    auto out_of_bounds = [&] {
      out.push_back({ViolationKind::kOutOfBounds, i, "'" + d.name + "' is out of bounds"});
    };
    std::visit(Overloaded{
                   [&](const ContinuousRange& r) {
                     const double* x = std::get_if<double>(&v);
                     if (!x) return wrong_type();
                     if (!(*x >= r.lo && *x <= r.hi)) out_of_bounds();
                   },
                   [&](const IntegerRange& r) {
                     const std::int64_t* x = std::get_if<std::int64_t>(&v);
                     if (!x) return wrong_type();
                     if (*x < r.lo || *x > r.hi) out_of_bounds();
                   },
                   [&](const Choices& c) {
                     const Choice* x = std::get_if<Choice>(&v);
                     if (!x) return wrong_type();
                     if (x->index >= c.labels.size()) out_of_bounds();
                   },
               },
               d.kind);
  }
  return out;
}

void require_valid(const ParamSpace& space, const Config& config) {
  auto violations = validate(space, config);
  if (violations.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& v : violations) msg += " " + v.message + ";";
  Fail(ErrorCode::kOutOfDomain, msg);
}

Config sample_uniform(const ParamSpace& space, Rng& rng) {
  Config out;
  out.reserve(space.dimension());
  for (const auto& d : space.domains()) {
    std::visit(Overloaded{
                   [&](const ContinuousRange& r) {
                     out.emplace_back(std::uniform_real_distribution<double>(r.lo, r.hi)(rng));
                   },
                   [&](const IntegerRange& r) {
                     out.emplace_back(std::uniform_int_distribution<std::int64_t>(r.lo, r.hi)(rng));
                   },
                   [&](const Choices& c) {
                     out.emplace_back(Choice{std::uniform_int_distribution<std::size_t>(
                         0, c.labels.size() - 1)(rng)});
                   },
               },
               d.kind);
  }
  return out;
}

nlohmann::json space_to_json(const ParamSpace& space) {
  auto doc = nlohmann::json::array();
  for (const auto& d : space.domains()) {
    nlohmann::json item;
    item["name"] = d.name;
    std::visit(Overloaded{
                   [&](const ContinuousRange& r) {
                     item["kind"] = "continuous";
                     item["bounds"] = {r.lo, r.hi};
                   },
                   [&](const IntegerRange& r) {
                     item["kind"] = "integer";
                     item["bounds"] = {r.lo, r.hi};
                   },
                   [&](const Choices& c) {
                     item["kind"] = "categorical";
                     item["choices"] = c.labels;
                   },
               },
               d.kind);
    doc.push_back(std::move(item));
  }
  return doc;
}

ParamSpace space_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) Fail(ErrorCode::kParse, "parameter space must be a JSON array");
  std::vector<ParamDomain> domains;
  try {
    for (const auto& item : doc) {
      ParamDomain d;
      d.name = item.at("name").get<std::string>();
      const auto kind = item.at("kind").get<std::string>();
      if (kind == "continuous") {
        const auto& b = item.at("bounds");
        d.kind = ContinuousRange{b.at(0).get<double>(), b.at(1).get<double>()};
      } else if (kind == "integer") {
        const auto& b = item.at("bounds");
        d.kind = IntegerRange{b.at(0).get<std::int64_t>(), b.at(1).get<std::int64_t>()};
      } else if (kind == "categorical") {
        d.kind = Choices{item.at("choices").get<std::vector<std::string>>()};
      } else {
        Fail(ErrorCode::kParse, "unknown parameter kind '" + kind + "'");
      }
      domains.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kParse, std::string("malformed parameter space: ") + e.what());
  }
  return ParamSpace(std::move(domains));
}

nlohmann::json config_to_json(const ParamSpace& space, const Config& config) {
  require_valid(space, config);
  auto doc = nlohmann::json::object();
  for (std::size_t i = 0; i < config.size(); ++i) {
    const auto& d = space[i];
    std::visit(Overloaded{
                   [&](double x) { doc[d.name] = x; },
                   [&](std::int64_t x) { doc[d.name] = x; },
                   [&](Choice c) { doc[d.name] = std::get<Choices>(d.kind).labels[c.index]; },
               },
               config[i]);
  }
  return doc;
}

Config config_from_json(const ParamSpace& space, const nlohmann::json& doc) {
  if (!doc.is_object()) Fail(ErrorCode::kParse, "config must be a JSON object");
  if (doc.size() != space.dimension())
    Fail(ErrorCode::kOutOfDomain, "config has " + std::to_string(doc.size()) +
                                      " values, space has " +
                                      std::to_string(space.dimension()));
  Config out;
  out.reserve(space.dimension());
  for (const auto& d : space.domains()) {
    auto it = doc.find(d.name);
    if (it == doc.end()) Fail(ErrorCode::kOutOfDomain, "config is missing '" + d.name + "'");
    const auto& v = *it;
    if (d.is_continuous()) {
      if (!v.is_number()) Fail(ErrorCode::kParse, "'" + d.name + "' must be a number");
      out.emplace_back(v.get<double>());
    } else if (d.is_integer()) {
      if (!v.is_number_integer()) Fail(ErrorCode::kParse, "'" + d.name + "' must be an integer");
      out.emplace_back(v.get<std::int64_t>());
    } else {
      if (!v.is_string()) Fail(ErrorCode::kParse, "'" + d.name + "' must be a label");
      const auto& labels = std::get<Choices>(d.kind).labels;
      const auto label = v.get<std::string>();
      std::size_t idx = 0;
      while (idx < labels.size() && labels[idx] != label) ++idx;
      if (idx == labels.size())
        Fail(ErrorCode::kOutOfDomain, "'" + label + "' is not a choice of '" + d.name + "'");
      out.emplace_back(Choice{idx});
    }
  }
  require_valid(space, out);
  return out;
}

}  // namespace tpeas
