#include "doctest.h"

#include <random>
#include <set>

#include "goalrec/observations.hpp"

using namespace goalrec;

namespace {

Plan numbered_plan(std::size_t n) {
  Plan plan;
  for (std::size_t i = 0; i < n; ++i) plan.push_back(ActionLabel{"STEP", {"S" + std::to_string(i)}});
  return plan;
}

bool strictly_increasing(const std::vector<std::size_t>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i - 1] >= v[i]) return false;
  }
  return true;
}

struct Golden {
  std::uint64_t seed;
  std::uint64_t stream;
  int pct;
  std::vector<std::vector<std::size_t>> draws;
};

// Produced by a separate Python implementation of std::seed_seq and
// std::mt19937_64 over a 20-step plan.
const std::vector<Golden> kGolden = {
    {0, 0, 10, {{3}, {1, 7, 10}, {0}}},
    {0, 0, 30, {{2, 3, 15, 18}, {1, 7, 8, 10, 12, 15, 18}, {0, 11, 12, 13, 15}}},
    {0, 0, 50, {{2, 3, 9, 12, 15, 18, 19}, {1, 3, 7, 8, 10, 11, 12, 15, 18, 19}, {0, 4, 5, 6, 11, 12, 13, 15}}},
    {0, 0, 70,
     {{2, 3, 7, 9, 12, 15, 17, 18, 19}, {1, 3, 7, 8, 10, 11, 12, 15, 18, 19},
      {0, 2, 3, 4, 5, 6, 7, 8, 11, 12, 13, 14, 15}}},
    {42, 7, 10, {{19}, {2, 6, 18}, {1, 2}}},
    {42, 7, 30, {{2, 8, 10, 12, 19}, {2, 4, 5, 6, 10, 11, 12, 16, 18}, {1, 2, 8, 10, 15, 16, 19}}},
    {42, 7, 50,
     {{2, 3, 5, 8, 10, 12, 13, 14, 16, 17, 19},
      {0, 2, 4, 5, 6, 10, 11, 12, 13, 14, 15, 16, 18},
      {1, 2, 3, 4, 8, 10, 13, 15, 16, 18, 19}}},
    {42, 7, 70,
     {{0, 2, 3, 5, 6, 8, 10, 12, 13, 14, 16, 17, 18, 19},
      {0, 2, 4, 5, 6, 7, 8, 10, 11, 12, 13, 14, 15, 16, 18},
      {0, 1, 2, 3, 4, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19}}},
};

}  // namespace

TEST_SUITE("observations") {
  TEST_CASE("valid observability levels") {
    for (int pct : kObservabilityLevels) CHECK(is_valid_observability(pct));
    CHECK_FALSE(is_valid_observability(0));
    CHECK_FALSE(is_valid_observability(40));
    CHECK_FALSE(is_valid_observability(101));
    Plan plan = numbered_plan(3);
    CHECK_THROWS_AS(sample_observations(plan, 40, 0), std::invalid_argument);
  }

  TEST_CASE("sampled index sets match the reference generator") {
    Plan plan = numbered_plan(20);
    for (const auto& g : kGolden) {
      CAPTURE(g.seed);
      CAPTURE(g.stream);
      CAPTURE(g.pct);
      for (std::uint32_t d = 0; d < g.draws.size(); ++d) {
        auto obs = sample_observations(plan, g.pct, g.seed, g.stream, d);
        CHECK(obs.source_indices == g.draws[d]);
        CHECK(obs.observability_pct == g.pct);
      }
    }
  }

  TEST_CASE("full observability returns the plan") {
    Plan plan = numbered_plan(7);
    auto obs = sample_observations(plan, 100, 5, 3, 2);
    CHECK(obs.labels == plan);
    CHECK(obs.source_indices == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6});
    auto all = generate_benchmark_obs(plan, 100, 5, 3);
    REQUIRE(all.size() == 1);
    CHECK(all[0].labels == plan);
    CHECK(full_observation(plan).labels == plan);
  }

  TEST_CASE("samples are nonempty ordered subsequences and deterministic") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      Plan plan = numbered_plan(1 + rng() % 30);
      int pct = kObservabilityLevels[rng() % 5];
      std::uint64_t seed = rng(), stream = rng() % 100;
      auto draws = generate_benchmark_obs(plan, pct, seed, stream);
      REQUIRE_FALSE(draws.empty());
      CHECK(draws.size() <= static_cast<std::size_t>(kBenchmarkDraws));
      std::set<std::vector<std::size_t>> distinct;
      for (const auto& obs : draws) {
        CHECK_FALSE(obs.labels.empty());
        CHECK(obs.labels.size() == obs.source_indices.size());
        CHECK(strictly_increasing(obs.source_indices));
        for (std::size_t i = 0; i < obs.labels.size(); ++i) CHECK(obs.labels[i] == plan[obs.source_indices[i]]);
        CHECK(distinct.insert(obs.source_indices).second);
      }
      CHECK(generate_benchmark_obs(plan, pct, seed, stream) == draws);
    }
  }

  TEST_CASE("different streams give independent draws") {
    Plan plan = numbered_plan(40);
    auto a = sample_observations(plan, 50, 1, 0);
    auto b = sample_observations(plan, 50, 1, 1);
    CHECK(a.source_indices != b.source_indices);
  }

  TEST_CASE("one-step plans always observe their only action") {
    Plan plan = numbered_plan(1);
    for (int pct : kObservabilityLevels) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CHECK(sample_observations(plan, pct, seed).source_indices == std::vector<std::size_t>{0});
      }
    }
  }

  TEST_CASE("empty plans are rejected") {
    Plan plan;
    CHECK_THROWS(sample_observations(plan, 50, 0));
  }

  TEST_CASE("subsequence matching") {
    Plan plan = numbered_plan(5);
    plan.push_back(plan[1]);
    Plan labels{plan[1], plan[3], plan[1]};
    auto m = match_subsequence(plan, labels);
    REQUIRE(m);
    CHECK(*m == std::vector<std::size_t>{1, 3, 5});
    Plan out_of_order{plan[3], plan[2]};
    CHECK_FALSE(match_subsequence(plan, out_of_order));
    CHECK(match_subsequence(plan, Plan{}) == std::vector<std::size_t>{});
  }
}
