#include "doctest.h"
#include "error.hpp"
#include "param_space.hpp"
#include "test_util.hpp"

using namespace tpeas;

TEST_CASE("validate reports interior, out-of-bounds and arity") {
  const ParamSpace space({{"x", ContinuousRange{0.0, 1.0}}});
  CHECK(validate(space, Config{0.5}).empty());

  const auto oob = validate(space, Config{1.5});
  REQUIRE(oob.size() == 1);
  CHECK(oob[0].kind == ViolationKind::kOutOfBounds);
  CHECK(oob[0].coordinate == 0);

  const ParamSpace two({{"a", ContinuousRange{0.0, 1.0}}, {"b", IntegerRange{0, 3}}});
  const auto arity = validate(two, Config{0.5});
  REQUIRE(arity.size() == 1);
  CHECK(arity[0].kind == ViolationKind::kLengthMismatch);
}

TEST_CASE("validate checks every coordinate and bound inclusivity") {
  const ParamSpace space({{"c", ContinuousRange{0.0, 1.0}},
                          {"i", IntegerRange{1, 5}},
                          {"k", Choices{{"A", "B"}}}});
  CHECK(validate(space, Config{0.0, std::int64_t{1}, Choice{1}}).empty());
  CHECK(validate(space, Config{1.0, std::int64_t{5}, Choice{0}}).empty());
  const auto v = validate(space, Config{-0.1, std::int64_t{6}, Choice{2}});
  CHECK(v.size() == 3);
  const auto wrong = validate(space, Config{std::int64_t{0}, 0.5, Choice{0}});
  REQUIRE(wrong.size() == 2);
  CHECK(wrong[0].kind == ViolationKind::kWrongType);
  CHECK_THROWS_AS(require_valid(space, Config{2.0, std::int64_t{1}, Choice{0}}), Error);
}

TEST_CASE("construction rejects malformed domains") {
  CHECK_THROWS_AS(ParamSpace(std::vector<ParamDomain>{}), Error);
  CHECK_THROWS_AS(ParamSpace({{"x", ContinuousRange{1.0, 1.0}}}), Error);
  CHECK_THROWS_AS(ParamSpace({{"x", IntegerRange{3, 2}}}), Error);
  CHECK_THROWS_AS(ParamSpace({{"x", Choices{{"A"}}}}), Error);
  CHECK_THROWS_AS(ParamSpace({{"x", Choices{{"A", "A"}}}}), Error);
  CHECK_THROWS_AS(ParamSpace({{"x", ContinuousRange{0, 1}}, {"x", IntegerRange{0, 1}}}), Error);
}

TEST_CASE("sample_uniform always validates on random spaces") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto space = testing::random_space(gen, 1 + trial % 8);
    Rng rng(trial);
    for (int i = 0; i < 20; ++i) CHECK(validate(space, sample_uniform(space, rng)).empty());
  }
}

TEST_CASE("sample_uniform is deterministic per seed") {
  std::mt19937_64 gen(3);
  const auto space = testing::random_space(gen, 6);
  Rng a(42), b(42);
  for (int i = 0; i < 50; ++i) CHECK(sample_uniform(space, a) == sample_uniform(space, b));
}

TEST_CASE("categorical draws are balanced") {
  // Binomial(10000, 0.5) has sd 50; [0.47, 0.53] is a 6 sd band.
  const ParamSpace space({{"c", Choices{{"A", "B"}}}});
  Rng rng(1234);
  int count_a = 0;
  for (int i = 0; i < 10000; ++i) count_a += std::get<Choice>(sample_uniform(space, rng)[0]).index == 0;
  const double freq = count_a / 10000.0;
  CHECK(freq >= 0.47);
  CHECK(freq <= 0.53);
}

TEST_CASE("uniform density of a mixed space") {
  const ParamSpace space({{"c", ContinuousRange{0.0, 4.0}},
                          {"i", IntegerRange{0, 9}},
                          {"k", Choices{{"A", "B", "C"}}}});
  CHECK(std::exp(space.log_uniform_density()) == doctest::Approx(1.0 / (4.0 * 10.0 * 3.0)));
}

TEST_CASE("JSON forms round-trip") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto space = testing::random_space(gen, 5);
    const auto back = space_from_json(nlohmann::json::parse(space_to_json(space).dump()));
    CHECK(back == space);
    Rng rng(trial);
    const auto config = sample_uniform(space, rng);
    CHECK(config_from_json(space, nlohmann::json::parse(config_to_json(space, config).dump())) ==
          config);
  }
}

TEST_CASE("JSON parsing errors") {
  CHECK_THROWS_AS(space_from_json(nlohmann::json::object()), Error);
  CHECK_THROWS_AS(space_from_json(nlohmann::json::parse(R"([{"name":"x","kind":"weird"}])")),
                  Error);
  const ParamSpace space({{"k", Choices{{"A", "B"}}}, {"i", IntegerRange{0, 3}}});
  CHECK_THROWS_AS(config_from_json(space, nlohmann::json::parse(R"({"k":"Z","i":1})")), Error);
  CHECK_THROWS_AS(config_from_json(space, nlohmann::json::parse(R"({"k":"A","i":1.5})")), Error);
  CHECK_THROWS_AS(config_from_json(space, nlohmann::json::parse(R"({"k":"A"})")), Error);
  CHECK_THROWS_AS(config_from_json(space, nlohmann::json::parse(R"({"k":"A","i":9})")), Error);
}
