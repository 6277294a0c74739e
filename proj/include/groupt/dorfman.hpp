#pragma once

#include <cstddef>
#include <vector>

#include "groupt/population.hpp"

namespace groupt {

inline constexpr std::size_t kBruteForcePartitionLimit = 16;

/// 1-based inclusive range of positions.
struct IndexRange {
  std::size_t start = 1;
  std::size_t end = 1;
  std::size_t size() const { return end - start + 1; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Dorfman procedure on one group: a singleton costs one test; a group of
/// k >= 2 costs one group test plus k individual tests when positive.
template <class T>
T dorfman_group_cost(const Population& pop, IndexRange range);

template <class T>
struct DorfmanPlan {
  Population sorted;                 // descending q
  std::vector<IndexRange> groups;    // contiguous blocks of `sorted`
  std::vector<T> group_costs;
  T cost;
};

/// Optimal ordered partition in O(n^2):
/// D(i) = min_{j >= i} [cost(i..j) + D(j+1)] over the descending-q order.
/// Ties prefer the longer group.
template <class T>
DorfmanPlan<T> optimal_ordered_partition(const Population& pop);

/// Minimum over all 2^(n-1) ordered partitions. n <= 16.
template <class T>
T brute_force_partitions(const Population& pop);

}  // namespace groupt
