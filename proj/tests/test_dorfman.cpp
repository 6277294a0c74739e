#include <doctest.h>

#include <random>

#include "groupt/dorfman.hpp"
#include "groupt/errors.hpp"
#include "reference.hpp"

using namespace groupt;
using reference::decimal;

namespace {

Population random_population(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> q(n);
  for (double& v : q) v = dist(rng);
  return Population::from_q(q);
}

}  // namespace

TEST_CASE("group cost") {
  const Population four = parse_population("0.95,0.95,0.95,0.95", ValueKind::kQ);
  CHECK(dorfman_group_cost<Rational>(four, {1, 4}) == decimal("1.741975"));
  CHECK(dorfman_group_cost<Rational>(four, {2, 2}) == 1);
  const Population three = parse_population("0.7,0.7,0.7", ValueKind::kQ);
  CHECK(dorfman_group_cost<Rational>(three, {1, 3}) == decimal("2.971"));
  CHECK(dorfman_group_cost<double>(three, {1, 3}) == doctest::Approx(2.971).epsilon(1e-14));
  CHECK_THROWS_AS(dorfman_group_cost<double>(three, {2, 4}), ValidationError);
  CHECK_THROWS_AS(dorfman_group_cost<double>(three, {3, 2}), ValidationError);
  CHECK_THROWS_AS(dorfman_group_cost<double>(three, {0, 1}), ValidationError);
}

TEST_CASE("optimal partition on small cases") {
  const auto halves = optimal_ordered_partition<Rational>(parse_population("0.5,0.5", ValueKind::kQ));
  CHECK(halves.cost == 2);
  CHECK(halves.groups == std::vector<IndexRange>{{1, 1}, {2, 2}});

  const auto high = optimal_ordered_partition<Rational>(parse_population("0.95,0.95,0.95,0.95", ValueKind::kQ));
  CHECK(high.cost == decimal("1.741975"));
  REQUIRE(high.groups.size() == 1);
  CHECK(high.groups[0] == IndexRange{1, 4});
  CHECK(high.group_costs == std::vector<Rational>{decimal("1.741975")});

  const auto empty = optimal_ordered_partition<double>(Population{});
  CHECK(empty.cost == 0.0);
  CHECK(empty.groups.empty());
}

TEST_CASE("partition is over the descending-q order") {
  const Population pop = parse_population("0.3,0.99,0.2,0.98", ValueKind::kQ);
  const auto plan = optimal_ordered_partition<Rational>(pop);
  CHECK(plan.sorted.q_values() == std::vector<double>{0.99, 0.98, 0.3, 0.2});
  CHECK(plan.sorted.units()[0].id == 2);
  Rational total = 0;
  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    CHECK(plan.group_costs[g] == dorfman_group_cost<Rational>(plan.sorted, plan.groups[g]));
    total += plan.group_costs[g];
  }
  CHECK(total == plan.cost);
  CHECK(plan.groups.front().start == 1);
  CHECK(plan.groups.back().end == 4);
}

TEST_CASE("O(n^2) partition matches exhaustive search") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 120; ++rep) {
    const std::size_t n = 1 + rep % 14;
    const Population pop = random_population(rng, n, 0.4, 0.999);
    const auto plan = optimal_ordered_partition<double>(pop);
    CHECK(plan.cost == doctest::Approx(brute_force_partitions<double>(pop)).epsilon(1e-12));

    std::vector<std::size_t> blocks;
    for (const auto& g : plan.groups) blocks.push_back(g.size());
    CHECK(plan.cost == doctest::Approx(reference::dorfman_cost(plan.sorted.q_values(), blocks)).epsilon(1e-12));
    CHECK(plan.cost <= static_cast<double>(n) + 1e-12);
  }
  CHECK_THROWS_AS(brute_force_partitions<double>(random_population(rng, kBruteForcePartitionLimit + 1, 0.5, 0.9)),
                  SizeLimitError);
}

TEST_CASE("ties prefer the longer group") {
  // A pair with q1*q2 = 0.5 costs 1 + 2*0.5 = 2, the same as two singletons.
  const Population pop = parse_population("0.8,0.625", ValueKind::kQ);
  const auto plan = optimal_ordered_partition<Rational>(pop);
  CHECK(plan.cost == 2);
  CHECK(plan.groups == std::vector<IndexRange>{{1, 2}});
}
