#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "groupt/policy_tree.hpp"
#include "groupt/population.hpp"

namespace groupt {

/// Generalized pairwise testing on a fixed order.
///
/// Units are paired in order. A positive pair is resolved by testing the
/// member with the larger q (the earlier one on ties); if that member is
/// good the partner is defective by deduction, otherwise the partner
/// reverts to its prior distribution and heads the remaining order. A
/// final single unit is tested individually.

inline constexpr std::size_t kGptaPolicyLimit = 16;
inline constexpr std::size_t kGptaEnumerationLimit = 14;

/// Expected number of tests; memoized on (carry, suffix start).
template <class T>
T gpta_cost(const TestOrder& order);

/// Same recursion on a bare q sequence.
template <class T>
T gpta_cost_of(std::span<const T> q_values);

PolicyTree gpta_policy(const TestOrder& order);

/// true = defective, aligned with the order.
using DefectVector = std::vector<bool>;

struct TestEvent {
  enum class Kind { kTest, kDeduce };
  Kind kind = Kind::kTest;
  std::vector<int> ids;
  bool positive = false;

  /// `TEST {1,2} -> POS` or `DEDUCE 2 DEFECTIVE`.
  std::string to_string() const;
};

struct Execution {
  int tests_used = 0;
  DefectVector classification;
  std::vector<TestEvent> trace;
};

Execution gpta_execute(const TestOrder& order, const DefectVector& defects);

/// Brute-force expectation over all 2^n defect vectors via gpta_execute.
template <class T>
T gpta_expected_by_enumeration(const TestOrder& order);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Trial t draws from a generator seeded by (seed, t).
MonteCarloEstimate gpta_monte_carlo(const TestOrder& order, std::uint64_t trials, std::uint64_t seed);

template <class T>
struct PairComparison {
  T e_a;  // resolve the positive pair by testing the larger-q unit first
  T e_b;  // ... by testing the smaller-q unit first
};

/// Expected totals for the two ways of resolving a contaminated pair at
/// the head of `continuation`. Requires q_a >= q_b.
template <class T>
PairComparison<T> pair_resolution_comparison(const T& q_a, const T& q_b, const TestOrder& continuation);

}  // namespace groupt
