#pragma once

#include <cstddef>
#include <optional>

#include "groupt/numeric.hpp"
#include "groupt/policy_tree.hpp"
#include "groupt/population.hpp"

namespace groupt {

inline constexpr std::size_t kOracleFloatLimit = 12;
inline constexpr std::size_t kOracleExactLimit = 8;
inline constexpr std::size_t kBestGptaOrderLimit = 10;
inline constexpr std::size_t kBestFixedOrderLimit = 8;
inline constexpr std::size_t kAdaptivePairingLimit = 16;

struct OracleOptions {
  /// Share memo entries between states that coincide as q-multisets.
  bool merge_equivalent_states = false;
  /// Check, at every state reachable through optimal moves, that all
  /// optimal moves are equivalent up to swapping equal-q units. EXACT only.
  bool certify_uniqueness = false;
};

template <class T>
struct OracleResult {
  T cost;
  PolicyTree policy;
  /// Distinct cost-minimizing root tests.
  std::size_t optimal_first_moves = 0;
  std::optional<bool> unique_up_to_equivalent_items;
};

/// Optimal adaptive nested algorithm by DP over (binomial pool,
/// contaminated set) states. From (S, {}) any nonempty T of S may be
/// tested; from (S, C) only nonempty proper subsets of C. A positive
/// outcome on T inside C returns C\T to the pool; a contaminated
/// singleton is defective by deduction.
template <class T>
OracleResult<T> optimal_nested(const Population& pop, const OracleOptions& options = {});

template <class T>
struct OrderSearchResult {
  TestOrder order;
  T cost;
  /// Orders attaining the minimum, counting equal-q swaps once.
  std::size_t optimal_order_count = 0;
};

/// Minimum of gpta_cost over all orders, by depth-first construction of
/// orders from the back so that shared suffixes are evaluated once.
template <class T>
OrderSearchResult<T> best_gpta_order(const Population& pop);

/// Minimum of fixed_order_optimal over all orders.
template <class T>
OrderSearchResult<T> best_fixed_order(const Population& pop);

enum class TwoUnitStrategy { kIndividual, kPairFirst };

template <class T>
struct TwoUnitResult {
  T cost;
  TwoUnitStrategy strategy;
};

/// Optimal procedure for two units (q_a >= q_b); ties report INDIVIDUAL.
template <class T>
TwoUnitResult<T> two_unit_optimal(const T& q_a, const T& q_b);

/// Pairwise testing where each pair is chosen adaptively from the
/// unclassified units; a positive pair is resolved on its larger-q member.
template <class T>
T adaptive_pairing_gpta(const Population& pop);

}  // namespace groupt
