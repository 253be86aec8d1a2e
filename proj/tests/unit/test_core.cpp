// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <set>

#include "doctest.h"
#include "fracsample/core.hpp"
#include "fracsample/error.hpp"

using namespace fracsample;

TEST_CASE("compute_budget reference value") {
  // 16 * (10000 + 4 * 16 * 300)
  CHECK(compute_budget(16, 4, 16, 10000, 300) == 467200.0);
  CHECK(compute_budget(1, 1, 1, 5, 7) == 12.0);
}

TEST_CASE("compute_budget is linear in n") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> small(1, 64);
  std::uniform_int_distribution<int> tokens(1, 40000);
  for (int i = 0; i < 1000; ++i) {
    const int n = small(rng), m = small(rng), d = small(rng);
    const double ct = tokens(rng), cs = tokens(rng);
    CHECK(compute_budget(n, m, d, ct, cs) == n * compute_budget(1, m, d, ct, cs));
  }
}

TEST_CASE("compute_budget rejects nonpositive arguments") {
  CHECK_THROWS_AS(compute_budget(0, 1, 1, 1, 1), DomainError);
  CHECK_THROWS_AS(compute_budget(1, 0, 1, 1, 1), DomainError);
  CHECK_THROWS_AS(compute_budget(1, 1, 0, 1, 1), DomainError);
  CHECK_THROWS_AS(compute_budget(1, 1, 1, -1, 1), DomainError);
}

TEST_CASE("derive_seed is deterministic and separates keys") {
  const SampleKey k{"q1", 2, 3, 4};
  CHECK(derive_seed(5, k, SeedKind::solution) == derive_seed(5, k, SeedKind::solution));
  CHECK(derive_seed(5, k, SeedKind::solution) != derive_seed(5, k, SeedKind::thinking));
  CHECK(derive_seed(5, k, SeedKind::solution) != derive_seed(6, k, SeedKind::solution));

  std::set<std::uint64_t> seen;
  long long count = 0;
  for (int q = 0; q < 10; ++q) {
    for (int i = 1; i <= 10; ++i) {
      for (int t = 1; t <= 25; ++t) {
        for (int j = 1; j <= 40; ++j) {
          seen.insert(derive_seed(0, {"q" + std::to_string(q), i, t, j}, SeedKind::solution));
          ++count;
        }
      }
    }
  }
  CHECK(count == 100000);
  CHECK(seen.size() == 100000);
}

TEST_CASE("SampleKey order and text form") {
  const SampleKey a{"q", 1, 2, 3};
  const SampleKey b{"q", 1, 3, 1};
  const SampleKey c{"q", 2, 1, 1};
  CHECK(a < b);
  CHECK(b < c);
  CHECK(SampleKey::thinking("q", 1) < a);
  CHECK(SampleKey::thinking("q", 1).is_thinking());
  CHECK(a.str() == "q/i1/t2/j3");
}

TEST_CASE("SamplingPlan validation and request count") {
  auto p = SamplingPlan::full(2, 3, 4);
  CHECK(p.depth_set == std::vector<int>{1, 2, 3, 4});
  CHECK(p.requests_per_question() == 2 * (1 + 4 * 3));
  CHECK(SamplingPlan::vanilla(8, 1, 16).depth_set == std::vector<int>{16});

  p.depth_set = {0, 1};
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.depth_set = {2, 1};
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.depth_set = {5};
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK_THROWS_AS(SamplingPlan::full(0, 1, 4), DomainError);
  p = SamplingPlan::full(1, 1, 4);
  p.m = 0;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("DecodingParams validation") {
  DecodingParams p;
  CHECK_NOTHROW(p.validate());
  p.temperature = -0.1;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = {};
  p.top_p = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = {};
  p.max_tokens = 0;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("plan JSON forms") {
  auto p = nlohmann::json{{"n", 2}, {"m", 1}, {"H", 16}, {"depth_set", "last:4"}}.get<SamplingPlan>();
  CHECK(p.depth_set == std::vector<int>{13, 14, 15, 16});
  p = nlohmann::json{{"n", 2}, {"m", 1}, {"H", 3}}.get<SamplingPlan>();
  CHECK(p.depth_set == std::vector<int>{1, 2, 3});
  p = nlohmann::json{{"n", 2}, {"m", 1}, {"H", 8}, {"depth_set", {2, 8}}}.get<SamplingPlan>();
  CHECK(p.depth_set == std::vector<int>{2, 8});

  const auto back = nlohmann::json(p).get<SamplingPlan>();
  CHECK(back.depth_set == p.depth_set);
  CHECK(back.params == p.params);
  CHECK(back.root_seed == p.root_seed);
}

TEST_CASE("defaults follow the evaluation setup") {
  DecodingParams p;
  CHECK(p.temperature == 0.6);
  CHECK(p.top_p == 0.95);
  CHECK(p.max_tokens == 32768);
}
