// Acceptance suite. Each test case prints one PASS/FAIL line for its criterion.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cli_runner.hpp"
#include "groupt/dorfman.hpp"
#include "groupt/example_orders.hpp"
#include "groupt/gpta.hpp"
#include "groupt/harness.hpp"
#include "groupt/nested_dp.hpp"
#include "groupt/oracle.hpp"

using namespace groupt;

namespace {

// Published four-decimal values: E_P (GPTA) and E_Ne (fixed-order optimum).
constexpr double kTableEP[12] = {3.8576, 3.8449, 3.8545, 3.8576, 3.8449, 3.8659,
                                 3.8449, 3.8659, 3.8449, 3.8545, 3.8749, 3.8863};
constexpr double kTableENe[12] = {3.8576, 3.8454, 3.8754, 3.8691, 3.8454, 3.9054,
                                  3.8655, 3.9255, 3.8610, 3.8910, 3.8736, 3.9036};

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

Population random_q(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> q(n);
  for (double& v : q) v = dist(rng);
  return Population::from_q(q);
}

Population row(std::size_t r) { return parse_population(kExampleOrders[r], ValueKind::kQ); }

/// Largest group tested by any optimal move at any state reachable through
/// optimal moves of the fixed-order DP, ties included.
std::size_t largest_optimal_group(const Population& order) {
  const FixedOrderDp<Rational> dp(order);
  const std::size_t n = order.size();
  auto Q = [&](std::size_t i, std::size_t j) { return q_product<Rational>(order, i, j); };
  std::set<std::pair<std::size_t, std::size_t>> seen;  // (i, 0) = G(i); (i, j) = H(i, j)
  std::size_t largest = 0;
  std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t i, std::size_t j) {
    if (!seen.insert({i, j}).second) return;
    if (j == 0) {
      if (i > n) return;
      for (std::size_t k = i; k <= n; ++k) {
        const Rational q = Q(i, k);
        const Rational cost = 1 + q * dp.g(k + 1) + (1 - q) * dp.h(i, k);
        if (cost != dp.g(i)) continue;
        largest = std::max(largest, k - i + 1);
        visit(k + 1, 0);
        visit(i, k);
      }
      return;
    }
    if (i == j) {
      visit(i + 1, 0);
      return;
    }
    const Rational q_run = Q(i, j);
    for (std::size_t m = i; m < j; ++m) {
      const Rational q = Q(i, m);
      const Rational cost = 1 + ((q - q_run) * dp.h(m + 1, j) + (1 - q) * dp.h(i, m)) / (1 - q_run);
      if (cost != dp.h(i, j)) continue;
      largest = std::max(largest, m - i + 1);
      visit(m + 1, j);
      visit(i, m);
    }
  };
  visit(1, 0);
  return largest;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("criterion 1: worked-example table") {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::size_t r = 0; r < 12; ++r) {
    const Population order = row(r);
    const double e_p = gpta_cost<double>(order);
    const double e_ne = fixed_order_optimal<double>(order).cost;
    CHECK(std::fabs(e_p - kTableEP[r]) <= 5e-5);
    CHECK(std::fabs(e_ne - kTableENe[r]) <= 5e-5);
    worst = std::max({worst, std::fabs(e_p - kTableEP[r]), std::fabs(e_ne - kTableENe[r])});
  }
  const double elapsed = seconds_since(start);
  CHECK(elapsed < 1.0);
  report(1, worst <= 5e-5 && elapsed < 1.0, fmt("max deviation %.2e, %.3f s", worst, elapsed));
}

TEST_CASE("criterion 2: observations on the worked example") {
  std::vector<Rational> gpta(12);
  std::vector<Rational> dp(12);
  for (std::size_t r = 0; r < 12; ++r) {
    gpta[r] = gpta_cost<Rational>(row(r));
    dp[r] = fixed_order_optimal<Rational>(row(r)).cost;
  }
  const bool a = gpta[0] == dp[0];
  const bool b = *std::min_element(gpta.begin(), gpta.end()) < gpta[0] &&
                 *std::min_element(dp.begin(), dp.end()) < dp[0];
  std::size_t largest = 0;
  for (std::size_t r = 0; r < 12; ++r) largest = std::max(largest, largest_optimal_group(row(r)));
  const bool c = largest <= 2;
  const bool d = dp[10] < gpta[10];
  CHECK(a);
  CHECK(b);
  CHECK(c);
  CHECK(d);
  report(2, a && b && c && d,
         fmt("(a) %s (b) %s (c) largest optimal group %zu (d) %s", a ? "ok" : "no", b ? "ok" : "no", largest,
             d ? "ok" : "no"));
}

TEST_CASE("criterion 3: engine and oracle agreement") {
  std::mt19937_64 rng(3003);
  std::uniform_int_distribution<std::size_t> n10(1, 10);
  std::uniform_int_distribution<std::size_t> n5(1, 5);
  std::uniform_int_distribution<std::size_t> n12(1, 12);
  double gpta_worst = 0.0;
  double dp_worst = 0.0;
  double dorfman_worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Population pop = random_q(rng, n10(rng), 0.01, 0.99);
    gpta_worst = std::max(gpta_worst, std::fabs(gpta_cost<double>(pop) - gpta_expected_by_enumeration<double>(pop)));
  }
  for (int t = 0; t < 200; ++t) {
    const Population order = random_q(rng, n5(rng), 0.01, 0.99);
    dp_worst = std::max(dp_worst, std::fabs(fixed_order_optimal<double>(order).cost -
                                            brute_force_order_respecting<double>(order)));
  }
  for (int t = 0; t < 100; ++t) {
    const Population pop = random_q(rng, n12(rng), 0.01, 0.99);
    dorfman_worst = std::max(dorfman_worst, std::fabs(optimal_ordered_partition<double>(pop).cost -
                                                      brute_force_partitions<double>(pop)));
  }
  CHECK(gpta_worst <= 1e-12);
  CHECK(dp_worst <= 1e-12);
  CHECK(dorfman_worst <= 1e-12);
  report(3, gpta_worst <= 1e-12 && dp_worst <= 1e-12 && dorfman_worst <= 1e-12,
         fmt("gpta %.1e, dp %.1e, dorfman %.1e", gpta_worst, dp_worst, dorfman_worst));
}

TEST_CASE("criterion 4: conjecture 1 campaign") {
  CampaignConfig config;
  config.conjecture = Conjecture::kOne;
  for (std::size_t n = 2; n <= 50; ++n) config.n_values.push_back(n);
  config.total_instances = 1000;
  config.seed = 4004;
  auto start = std::chrono::steady_clock::now();
  const CampaignReport main = run_conjecture1(config);
  const double main_time = seconds_since(start);

  CampaignConfig smoke = config;
  smoke.n_values.clear();
  for (std::size_t n = 2; n <= 500; ++n) smoke.n_values.push_back(n);
  smoke.total_instances.reset();
  smoke.trials_per_n = 1;
  start = std::chrono::steady_clock::now();
  const CampaignReport large = run_conjecture1(smoke);
  const double smoke_time = seconds_since(start);

  CHECK(main.summary.instances == 1000);
  CHECK(main.summary.counterexamples == 0);
  CHECK(main_time < 60.0);
  CHECK(large.summary.counterexamples == 0);
  report(4,
         main.summary.instances == 1000 && main.summary.counterexamples == 0 && main_time < 60.0 &&
             large.summary.counterexamples == 0,
         fmt("1000 instances n=2..50: %zu counterexamples, max gap %.1e, %.1f s; n=2..500 smoke: %zu instances, "
             "%zu counterexamples, %.1f s",
             main.summary.counterexamples, main.summary.max_gap, main_time, large.summary.instances,
             large.summary.counterexamples, smoke_time));
}

TEST_CASE("criterion 5: conjecture 2 campaign") {
  CampaignConfig config;
  config.conjecture = Conjecture::kTwo;
  config.n_values = {2, 3, 4, 5, 6, 7};
  config.total_instances = 250;
  config.seed = 5005;
  const CampaignReport result = run_conjecture2(config);

  std::size_t pairs = 0;
  bool pairs_optimal = true;
  std::map<std::size_t, std::size_t> failures_by_n;
  for (const InstanceRecord& rec : result.records) {
    if (!rec.pass) ++failures_by_n[rec.n];
    if (rec.n != 2) continue;
    ++pairs;
    pairs_optimal = pairs_optimal && rec.two_unit && std::fabs(rec.gpta_sorted - *rec.two_unit) <= 1e-9;
  }
  std::string by_n;
  for (const auto& [n, count] : failures_by_n) by_n += fmt(" n=%zu:%zu", n, count);
  CHECK(result.summary.counterexamples == 0);
  CHECK(pairs_optimal);
  report(5, result.summary.counterexamples == 0 && pairs_optimal,
         fmt("250 instances: %zu counterexamples (max gap %.2e)%s; n=2 GPTA equals two-unit optimum: %s (%zu instances)",
             result.summary.counterexamples, result.summary.max_gap, by_n.c_str(), pairs_optimal ? "yes" : "no",
             pairs));
}

TEST_CASE("criterion 6: larger-q member first") {
  std::mt19937_64 rng(6006);
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  std::uniform_int_distribution<std::size_t> length(0, 8);
  double worst_excess = -1.0;
  double worst_tie = 0.0;
  std::size_t ties = 0;
  for (int t = 0; t < 10000; ++t) {
    double q_a = unit(rng);
    double q_b = t % 10 == 0 ? q_a : unit(rng);
    if (q_a < q_b) std::swap(q_a, q_b);
    const Population continuation = random_q(rng, length(rng), 0.01, 0.99);
    const auto cmp = pair_resolution_comparison<double>(q_a, q_b, continuation);
    worst_excess = std::max(worst_excess, cmp.e_a - cmp.e_b);
    if (q_a == q_b) {
      ++ties;
      worst_tie = std::max(worst_tie, std::fabs(cmp.e_a - cmp.e_b));
    }
  }
  CHECK(worst_excess <= 1e-12);
  CHECK(worst_tie <= 1e-12);
  report(6, worst_excess <= 1e-12 && worst_tie <= 1e-12,
         fmt("max e_a - e_b %.2e over 10000 tuples; %zu ties, max |e_a - e_b| %.1e", worst_excess, ties, worst_tie));
}

TEST_CASE("criterion 7: boundary behaviour") {
  const auto golden = two_unit_optimal<double>(kGoldenQ, kGoldenQ);
  const bool golden_ok = std::fabs(golden.cost - 2.0) <= 1e-9;
  const Population half = Population::from_q(std::vector<double>{0.5, 0.5});
  const bool sufficient = individual_testing_sufficient(half);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    const Population pop = Population::from_q(std::vector<double>(n, 0.5));
    worst = std::max(worst, std::fabs(fixed_order_optimal<double>(pop).cost - static_cast<double>(n)));
  }
  CHECK(golden_ok);
  CHECK(sufficient);
  CHECK(worst <= 1e-9);
  report(7, golden_ok && sufficient && worst <= 1e-9,
         fmt("golden pair cost %.12f; q=0.5 sufficiency %s; max |DP - n| %.1e for n<=6", golden.cost,
             sufficient ? "true" : "false", worst));
}

TEST_CASE("criterion 8: monotonicity in p") {
  std::mt19937_64 rng(8008);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  std::uniform_real_distribution<double> prob(0.01, 0.94);
  double worst_drop = 0.0;
  std::size_t comparisons = 0;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> p(size(rng));
    for (double& v : p) v = prob(rng);
    const double base = optimal_nested<double>(Population::from_p(p)).cost;
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::vector<double> raised = p;
      raised[i] += 0.05;
      if (raised[i] >= 1.0) continue;
      const double cost = optimal_nested<double>(Population::from_p(raised)).cost;
      worst_drop = std::max(worst_drop, base - cost);
      ++comparisons;
    }
  }
  CHECK(worst_drop <= 1e-12);
  report(8, worst_drop <= 1e-12, fmt("%zu comparisons, largest decrease %.1e", comparisons, worst_drop));
}

TEST_CASE("criterion 9: reports independent of thread count") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "groupt_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  struct Run {
    std::string args;
    std::string tag;
  };
  const std::vector<Run> runs = {
      {"verify 1 --n 2..40 --trials 4 --seed 9 --threads 1", "c1_t1"},
      {"verify 1 --n 2..40 --trials 4 --seed 9 --threads 4", "c1_t4"},
      {"verify 1 --n 2..40 --trials 4 --seed 9 --threads 3", "c1_t3"},
      {"verify 2 --n 2..6 --trials 3 --seed 9 --threads 1", "c2_t1"},
      {"verify 2 --n 2..6 --trials 3 --seed 9 --threads 4", "c2_t4"},
  };
  std::map<std::string, std::string> json;
  std::map<std::string, std::string> csv;
  std::map<std::string, std::string> stdout_text;
  bool exits_ok = true;
  for (const Run& r : runs) {
    // Same output prefix for every run so the path echoed on stdout matches too.
    const std::string prefix = (dir / (r.tag.substr(0, 2))).string();
    const auto result = groupt::testing::run_cli(r.args + " --out " + prefix);
    exits_ok = exits_ok && (result.exit_code == 0 || result.exit_code == 1);
    json[r.tag] = slurp(prefix + ".json");
    csv[r.tag] = slurp(prefix + ".csv");
    stdout_text[r.tag] = result.out;
  }
  const bool c1 = !json["c1_t1"].empty() && json["c1_t1"] == json["c1_t4"] && json["c1_t1"] == json["c1_t3"] &&
                  csv["c1_t1"] == csv["c1_t4"] && csv["c1_t1"] == csv["c1_t3"] &&
                  stdout_text["c1_t1"] == stdout_text["c1_t4"];
  const bool c2 = !json["c2_t1"].empty() && json["c2_t1"] == json["c2_t4"] && csv["c2_t1"] == csv["c2_t4"] &&
                  stdout_text["c2_t1"] == stdout_text["c2_t4"];
  CHECK(exits_ok);
  CHECK(c1);
  CHECK(c2);
  fs::remove_all(dir);
  report(9, exits_ok && c1 && c2,
         fmt("conjecture 1 threads 1/3/4 %s; conjecture 2 threads 1/4 %s", c1 ? "identical" : "differ",
             c2 ? "identical" : "differ"));
}
