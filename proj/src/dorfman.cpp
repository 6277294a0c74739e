#include "groupt/dorfman.hpp"

#include "groupt/errors.hpp"

namespace groupt {

template <class T>
T dorfman_group_cost(const Population& pop, IndexRange range) {
  if (range.start < 1 || range.start > range.end || range.end > pop.size()) {
    throw ValidationError("dorfman_group_cost: range [" + std::to_string(range.start) + "," +
                          std::to_string(range.end) + "] outside 1.." + std::to_string(pop.size()));
  }
  if (range.size() == 1) return T(1);
  const T all_good = q_product<T>(pop, range.start, range.end);
  return T(1) + T(static_cast<long>(range.size())) * (T(1) - all_good);
}

template <class T>
DorfmanPlan<T> optimal_ordered_partition(const Population& pop) {
  DorfmanPlan<T> plan{sort_by_q_descending(pop), {}, {}, T(0)};
  const std::size_t n = pop.size();
  std::vector<T> best(n + 2, T(0));
  std::vector<std::size_t> cut(n + 2, 0);
  for (std::size_t i = n; i >= 1; --i) {
    bool have = false;
    T all_good(1);
    for (std::size_t j = i; j <= n; ++j) {
      all_good *= plan.sorted.template q<T>(j - 1);
      const long size = static_cast<long>(j - i + 1);
      T candidate = (size == 1 ? T(1) : T(1) + T(size) * (T(1) - all_good)) + best[j + 1];
      if (!have || candidate <= best[i]) {
        best[i] = candidate;
        cut[i] = j;
        have = true;
      }
    }
  }
  plan.cost = best[1];
  for (std::size_t i = 1; i <= n; i = cut[i] + 1) {
    plan.groups.push_back({i, cut[i]});
    plan.group_costs.push_back(dorfman_group_cost<T>(plan.sorted, {i, cut[i]}));
  }
  return plan;
}

template <class T>
T brute_force_partitions(const Population& pop) {
  const std::size_t n = pop.size();
  require_size_at_most(n, kBruteForcePartitionLimit, "brute_force_partitions");
  if (n == 0) return T(0);
  const Population sorted = sort_by_q_descending(pop);
  bool have = false;
  T best(0);
  // Bit k of `cuts` set: a block ends after position k+1.
  for (std::uint32_t cuts = 0; cuts < (std::uint32_t{1} << (n - 1)); ++cuts) {
    T total(0);
    std::size_t start = 1;
    for (std::size_t pos = 1; pos <= n; ++pos) {
      if (pos == n || (cuts >> (pos - 1) & 1U)) {
        total += dorfman_group_cost<T>(sorted, {start, pos});
        start = pos + 1;
      }
    }
    if (!have || total < best) {
      best = total;
      have = true;
    }
  }
  return best;
}

template double dorfman_group_cost<double>(const Population&, IndexRange);
template Rational dorfman_group_cost<Rational>(const Population&, IndexRange);
template DorfmanPlan<double> optimal_ordered_partition<double>(const Population&);
template DorfmanPlan<Rational> optimal_ordered_partition<Rational>(const Population&);
template double brute_force_partitions<double>(const Population&);
template Rational brute_force_partitions<Rational>(const Population&);

}  // namespace groupt
