#include <doctest.h>

#include <cmath>
#include <random>

#include "groupt/errors.hpp"
#include "groupt/gpta.hpp"
#include "groupt/nested_dp.hpp"
#include "groupt/population.hpp"

using namespace groupt;

TEST_CASE("parse_population reads q tuples") {
  const Population pop = parse_population("0.68,0.65,0.62,0.62", ValueKind::kQ);
  REQUIRE(pop.size() == 4);
  CHECK(pop[0].q == 0.68);
  CHECK(pop[1].q == 0.65);
  CHECK(pop[3].q == 0.62);
  CHECK(pop[0].q_exact == Rational(17, 25));
  CHECK(pop[0].p_exact == Rational(8, 25));
  CHECK(pop[2].id == 3);
}

TEST_CASE("parse_population reads a single p value") {
  const Population pop = parse_population("0.5", ValueKind::kP);
  REQUIRE(pop.size() == 1);
  CHECK(pop[0].p == 0.5);
  CHECK(pop[0].q_exact == Rational(1, 2));
}

TEST_CASE("parse_population rejects boundary and malformed values") {
  CHECK_THROWS_AS(parse_population("1.0", ValueKind::kP), ValidationError);
  CHECK_THROWS_AS(parse_population("0", ValueKind::kP), ValidationError);
  CHECK_THROWS_AS(parse_population("", ValueKind::kP), ValidationError);
  try {
    parse_population("0.5,abc,0.3", ValueKind::kP);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("index 2") != std::string::npos);
  }
  try {
    parse_population("0.5\n0.3\n1.5", ValueKind::kQ);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("index 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_population("0.5,,0.3", ValueKind::kP), ValidationError);
  CHECK_THROWS_AS(parse_population("0.5e", ValueKind::kP), ValidationError);
}

TEST_CASE("population files: comments, newlines and kind directive") {
  const Population pop = parse_population("# a comment\n0.1, 0.2\n\n# kind: p\n0.3\n", ValueKind::kQ);
  REQUIRE(pop.size() == 3);
  CHECK(pop[0].p_exact == Rational(1, 10));
  CHECK(pop[2].p == doctest::Approx(0.3));

  const Population scientific = parse_population("3.5e-1", ValueKind::kP);
  CHECK(scientific[0].p_exact == Rational(7, 20));
}

TEST_CASE("write_population round-trips decimal populations") {
  const Population pop = parse_population("0.68,0.65,0.62,0.125", ValueKind::kQ);
  for (ValueKind kind : {ValueKind::kP, ValueKind::kQ}) {
    const Population back = parse_population(write_population(pop, kind), ValueKind::kQ);
    REQUIRE(back.size() == pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) CHECK(back[i].q_exact == pop[i].q_exact);
  }
}

TEST_CASE("q_product") {
  const Population two = parse_population("0.68,0.65", ValueKind::kQ);
  CHECK(q_product<double>(two, 1, 2) == doctest::Approx(0.442).epsilon(1e-15));
  CHECK(q_product<Rational>(two, 1, 2) == Rational(221, 500));
  CHECK(q_product<double>(two, 2, 2) == 0.65);

  const Population four = parse_population("0.62,0.62,0.68,0.65", ValueKind::kQ);
  // 0.62 * 0.62 * 0.68 * 0.65 by hand: 0.3844 * 0.442 = 0.1699048
  CHECK(q_product<Rational>(four, 1, 4) == Rational(212381, 1250000));
  CHECK(q_product<double>(four, 1, 4) == doctest::Approx(0.1699048).epsilon(1e-14));

  CHECK_THROWS_AS(q_product<double>(four, 0, 2), ValidationError);
  CHECK_THROWS_AS(q_product<double>(four, 3, 2), ValidationError);
  CHECK_THROWS_AS(q_product<double>(four, 1, 5), ValidationError);
}

TEST_CASE("q_product splits multiplicatively") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> digits(1, 99);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rep % 9;
    std::string text;
    for (std::size_t i = 0; i < n; ++i) text += (i ? ",0." : "0.") + std::to_string(digits(rng) + 100).substr(1);
    const Population pop = parse_population(text, ValueKind::kQ);
    const std::size_t i = 1 + rep % n;
    const std::size_t k = n;
    for (std::size_t j = i; j < k; ++j) {
      CHECK(q_product<Rational>(pop, i, j) * q_product<Rational>(pop, j + 1, k) == q_product<Rational>(pop, i, k));
      const double split = q_product<double>(pop, i, j) * q_product<double>(pop, j + 1, k);
      const double whole = q_product<double>(pop, i, k);
      CHECK(std::fabs(split - whole) <= 1e-15 * whole);
    }
  }
}

TEST_CASE("R-range constants and membership") {
  CHECK(RRange::kLo == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-16));
  CHECK(RRange::kHi == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-16));
  CHECK(RRange::kLo < RRange::kHi);
  CHECK(kGoldenQ + kGoldenQ * kGoldenQ == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(r_range_contains(0.35));
  CHECK(r_range_contains(0.38));
  CHECK_FALSE(r_range_contains(0.39));
  CHECK_FALSE(r_range_contains(0.29));
  CHECK(r_range_contains(RRange::kHi));
  CHECK(r_range_contains(RRange::kLo));
}

TEST_CASE("sort_by_q_descending") {
  const Population pop = parse_population("0.62,0.62,0.65,0.68", ValueKind::kQ);
  const Population sorted = sort_by_q_descending(pop);
  CHECK(sorted.q_values() == std::vector<double>{0.68, 0.65, 0.62, 0.62});
  CHECK(sorted[2].id == 1);
  CHECK(sorted[3].id == 2);
  CHECK(sorted.is_permutation_of(pop));

  const Population again = sort_by_q_descending(sorted);
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(again[i].id == sorted[i].id);

  const Population flat = parse_population("0.7,0.7,0.7", ValueKind::kQ);
  const Population flat_sorted = sort_by_q_descending(flat);
  for (std::size_t i = 0; i < flat.size(); ++i) CHECK(flat_sorted[i].id == flat[i].id);
}

TEST_CASE("sort_by_q_descending is an idempotent permutation") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> digits(1, 9);
  for (int rep = 0; rep < 100; ++rep) {
    std::string text;
    for (int i = 0; i < 8; ++i) text += (i ? ",0." : "0.") + std::to_string(digits(rng));
    const Population pop = parse_population(text, ValueKind::kQ);
    const Population once = sort_by_q_descending(pop);
    const Population twice = sort_by_q_descending(once);
    CHECK(once.is_permutation_of(pop));
    for (std::size_t i = 0; i < once.size(); ++i) {
      CHECK(once[i].id == twice[i].id);
      if (i) CHECK(once[i - 1].q >= once[i].q);
    }
  }
}

TEST_CASE("EXACT and FLOAT agree on cost operations for two-decimal inputs") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> cents(20, 95);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + rep % 10;
    std::string text;
    for (std::size_t i = 0; i < n; ++i) text += (i ? ",0." : "0.") + std::to_string(cents(rng));
    const Population pop = parse_population(text, ValueKind::kQ);
    CHECK(std::fabs(gpta_cost<double>(pop) - gpta_cost<Rational>(pop).get_d()) <= 1e-12);
    CHECK(std::fabs(FixedOrderDp<double>(pop).cost() - FixedOrderDp<Rational>(pop).cost().get_d()) <= 1e-12);
  }
}

TEST_CASE("CostValue formatting and comparison") {
  const CostValue f(3.85755520001);
  const CostValue e(Rational(602743, 156250));
  CHECK(f.to_string() == "3.8576");
  CHECK(e.to_string() == "3.8576");
  CHECK(e.to_string(true) == "3.8575552");
  CHECK(e.mode() == NumericMode::kExact);
  CHECK(costs_equal(f, e));
  CHECK_FALSE(costs_equal(CostValue(Rational(1, 3)), CostValue(Rational(1, 3) + Rational("1/1000000000000"))));
  CHECK(parse_mode("exact") == NumericMode::kExact);
  CHECK_THROWS_AS(parse_mode("double"), ValidationError);
}
