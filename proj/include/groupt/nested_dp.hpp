#pragma once

#include <cstddef>
#include <vector>

#include "groupt/policy_tree.hpp"
#include "groupt/population.hpp"

namespace groupt {

inline constexpr std::size_t kBruteForceOrderLimit = 5;

/// Optimal nested procedure for a fixed unit order.
///
/// Every test is a contiguous prefix of the unclassified sequence, which
/// always has the form [contaminated run i..j][binomial suffix j+1..n]:
///
///   G(i)   optimal cost with binomial suffix i..n, G(n+1) = 0
///   H(i,j) optimal cost with contaminated run i..j ahead of suffix j+1..n
///
/// Testing prefix i..k of the binomial suffix leads to G(k+1) or H(i,k).
/// Testing prefix i..m of a contaminated run leads to H(m+1,j) on a
/// negative outcome, and to H(i,m) on a positive one (units m+1..j revert
/// to the binomial pool, ahead of j+1..n). H(i,i) = G(i+1).
///
/// O(n^3) time, O(n^2) memory. Argmin ties go to the smallest group.
template <class T>
class FixedOrderDp {
 public:
  explicit FixedOrderDp(const TestOrder& order);

  std::size_t size() const { return n_; }
  /// 1-based; i in 1..n+1.
  const T& g(std::size_t i) const { return g_[i - 1]; }
  /// 1-based; 1 <= i <= j <= n.
  const T& h(std::size_t i, std::size_t j) const { return h_[index(i - 1, j - 1)]; }
  /// Last unit (1-based) of the optimal prefix test from G(i) / H(i,j).
  std::size_t g_choice(std::size_t i) const { return g_choice_[i - 1] + 1; }
  std::size_t h_choice(std::size_t i, std::size_t j) const { return h_choice_[index(i - 1, j - 1)] + 1; }

  const T& cost() const { return g_[0]; }
  PolicyTree policy() const;

 private:
  std::size_t index(std::size_t i, std::size_t j) const { return i * n_ + j; }

  const TestOrder& order_;
  std::size_t n_;
  std::vector<T> g_;
  std::vector<T> h_;
  std::vector<std::size_t> g_choice_;
  std::vector<std::size_t> h_choice_;
};

template <class T>
struct FixedOrderResult {
  T cost;
  PolicyTree policy;
};

template <class T>
FixedOrderResult<T> fixed_order_optimal(const TestOrder& order);

/// Exhaustive search over order-respecting nested strategies, tracking the
/// explicit posterior over all 2^n defect vectors. n <= 5.
template <class T>
T brute_force_order_respecting(const TestOrder& order);

/// Sufficient condition for individual testing to be optimal: with q sorted
/// nonincreasing, q1 + q1*q2 < 1. True for n = 1.
template <class T = double>
bool individual_testing_sufficient(const Population& pop);

}  // namespace groupt
