#include "groupt/oracle.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <unordered_map>
#include <vector>

#include "groupt/errors.hpp"
#include "groupt/nested_dp.hpp"

namespace groupt {
namespace {

using Mask = std::uint32_t;

// Equal-q classes in order of first appearance.
struct QClasses {
  std::vector<std::size_t> class_of;
  std::vector<std::vector<std::size_t>> members;

  explicit QClasses(const Population& pop) : class_of(pop.size()) {
    for (std::size_t i = 0; i < pop.size(); ++i) {
      std::size_t c = 0;
      while (c < members.size() && pop[members[c].front()].q_exact != pop[i].q_exact) ++c;
      if (c == members.size()) members.emplace_back();
      members[c].push_back(i);
      class_of[i] = c;
    }
  }
};

std::vector<int> ids_of(const Population& pop, Mask mask) {
  std::vector<int> ids;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (mask & (Mask{1} << i)) ids.push_back(pop[i].id);
  }
  return ids;
}

template <class T>
bool strictly_better(const T& candidate, const T& best);

template <>
bool strictly_better<double>(const double& candidate, const double& best) {
  return candidate < best - 1e-12;
}

template <>
bool strictly_better<Rational>(const Rational& candidate, const Rational& best) {
  return candidate < best;
}

template <class T>
class NestedOracle {
 public:
  NestedOracle(const Population& pop, const OracleOptions& options)
      : pop_(pop), n_(pop.size()), options_(options), classes_(pop) {
    const Mask subsets = Mask{1} << n_;
    prod_.assign(subsets, T(1));
    base3_.assign(subsets, 0);
    for (Mask m = 1; m < subsets; ++m) {
      const int low = std::countr_zero(m);
      prod_[m] = prod_[m & (m - 1)] * pop.q<T>(static_cast<std::size_t>(low));
      std::uint32_t p3 = 1;
      for (int k = 0; k < low; ++k) p3 *= 3;
      base3_[m] = base3_[m & (m - 1)] + p3;
    }
    std::uint32_t states = 1;
    for (std::size_t k = 0; k < n_; ++k) states *= 3;
    memo_.assign(states, T(0));
    known_.assign(states, 0);
  }

  Mask all() const { return (Mask{1} << n_) - 1; }

  T value(Mask pool, Mask contaminated) {
    if (contaminated != 0 && std::has_single_bit(contaminated)) contaminated = 0;
    if (pool == 0 && contaminated == 0) return T(0);
    if (options_.merge_equivalent_states) canonicalize(pool, contaminated);
    const std::uint32_t key = base3_[pool] + 2 * base3_[contaminated];
    if (known_[key]) return memo_[key];

    bool have = false;
    T best(0);
    for_each_move(pool, contaminated, [&](Mask, const T& score) {
      if (!have || score < best) {
        best = score;
        have = true;
      }
    });
    T result = finish(contaminated, best);
    memo_[key] = result;
    known_[key] = 1;
    return result;
  }

  /// Moves attaining the optimum, in enumeration order.
  std::vector<Mask> optimal_moves(Mask pool, Mask contaminated, bool with_tolerance) {
    const T target = value(pool, contaminated);
    std::vector<Mask> out;
    for_each_move(pool, contaminated, [&](Mask move, const T& score) {
      const T total = finish(contaminated, score);
      const bool equal = with_tolerance ? ScalarTraits<T>::same(total, target) : total == target;
      if (equal) out.push_back(move);
    });
    return out;
  }

  PolicyTree policy(Mask pool, Mask contaminated) {
    if (contaminated != 0 && std::has_single_bit(contaminated)) contaminated = 0;
    if (pool == 0 && contaminated == 0) return PolicyTree::leaf();
    const std::uint64_t key = (std::uint64_t{pool} << 32) | contaminated;
    if (auto it = policies_.find(key); it != policies_.end()) return it->second;

    bool have = false;
    T best(0);
    Mask choice = 0;
    for_each_move(pool, contaminated, [&](Mask move, const T& score) {
      const bool better = !have || strictly_better(score, best) ||
                          (!strictly_better(best, score) && prefer(move, choice));
      if (better) {
        best = score;
        choice = move;
        have = true;
      }
    });

    PolicyTree tree;
    if (contaminated == 0) {
      tree = PolicyTree::test(ids_of(pop_, choice), policy(pool & ~choice, 0), policy(pool & ~choice, choice));
    } else {
      const Mask rest = contaminated & ~choice;
      tree = PolicyTree::test(ids_of(pop_, choice), policy(pool, rest), policy(pool | rest, choice));
    }
    policies_.emplace(key, tree);
    return tree;
  }

  bool unique_up_to_equivalent_items() {
    std::set<std::pair<Mask, Mask>> seen;
    std::vector<std::pair<Mask, Mask>> stack{{all(), 0}};
    while (!stack.empty()) {
      auto [pool, contaminated] = stack.back();
      stack.pop_back();
      if (contaminated != 0 && std::has_single_bit(contaminated)) contaminated = 0;
      if (pool == 0 && contaminated == 0) continue;
      if (!seen.insert({pool, contaminated}).second) continue;
      const std::vector<Mask> moves = optimal_moves(pool, contaminated, false);
      for (Mask move : moves) {
        if (signature(move) != signature(moves.front())) return false;
        if (contaminated == 0) {
          stack.push_back({pool & ~move, 0});
          stack.push_back({pool & ~move, move});
        } else {
          const Mask rest = contaminated & ~move;
          stack.push_back({pool, rest});
          stack.push_back({pool | rest, move});
        }
      }
    }
    return true;
  }

 private:
  // Calls f(move, score) for every admissible test. From a binomial state
  // the score is the full expected cost; inside a contaminated set it is
  // the numerator over the common denominator 1 - Q(C) (see finish()).
  template <class F>
  void for_each_move(Mask pool, Mask contaminated, F&& f) {
    if (contaminated == 0) {
      for (Mask t = pool; t != 0; t = (t - 1) & pool) {
        const Mask rest = pool & ~t;
        T score = T(1) + prod_[t] * value(rest, 0) + (T(1) - prod_[t]) * value(rest, t);
        f(t, score);
      }
      return;
    }
    const T& q_c = prod_[contaminated];
    for (Mask t = (contaminated - 1) & contaminated; t != 0; t = (t - 1) & contaminated) {
      const Mask rest = contaminated & ~t;
      // Q(T)(1 - Q(C\T)) = Q(T) - Q(C)
      T score = (prod_[t] - q_c) * value(pool, rest) + (T(1) - prod_[t]) * value(pool | rest, t);
      f(t, score);
    }
  }

  T finish(Mask contaminated, const T& score) const {
    if (contaminated == 0) return score;
    return T(1) + score / (T(1) - prod_[contaminated]);
  }

  // Smaller groups first, then lower positions.
  static bool prefer(Mask a, Mask b) {
    const int ca = std::popcount(a);
    const int cb = std::popcount(b);
    if (ca != cb) return ca < cb;
    const Mask diff = a ^ b;
    return (a & (diff & (~diff + 1))) != 0;
  }

  std::vector<std::size_t> signature(Mask move) const {
    std::vector<std::size_t> counts(classes_.members.size(), 0);
    for (std::size_t i = 0; i < n_; ++i) {
      if (move & (Mask{1} << i)) ++counts[classes_.class_of[i]];
    }
    return counts;
  }

  void canonicalize(Mask& pool, Mask& contaminated) const {
    Mask new_pool = 0;
    Mask new_cont = 0;
    for (const auto& members : classes_.members) {
      std::size_t in_pool = 0;
      std::size_t in_cont = 0;
      for (std::size_t i : members) {
        in_pool += (pool >> i) & 1U;
        in_cont += (contaminated >> i) & 1U;
      }
      std::size_t k = 0;
      for (; k < in_pool; ++k) new_pool |= Mask{1} << members[k];
      for (; k < in_pool + in_cont; ++k) new_cont |= Mask{1} << members[k];
    }
    pool = new_pool;
    contaminated = new_cont;
  }

  const Population& pop_;
  std::size_t n_;
  OracleOptions options_;
  QClasses classes_;
  std::vector<T> prod_;
  std::vector<std::uint32_t> base3_;
  std::vector<T> memo_;
  std::vector<char> known_;
  std::unordered_map<std::uint64_t, PolicyTree> policies_;
};

}  // namespace
template <class T>
OracleResult<T> optimal_nested(const Population& pop, const OracleOptions& options) {
  const bool exact = ScalarTraits<T>::kMode == NumericMode::kExact;
  require_size_at_most(pop.size(), exact ? kOracleExactLimit : kOracleFloatLimit, "optimal_nested");
  OracleResult<T> result;
  if (pop.empty()) {
    result.cost = T(0);
    return result;
  }
  NestedOracle<T> oracle(pop, options);
  result.cost = oracle.value(oracle.all(), 0);
  result.policy = oracle.policy(oracle.all(), 0);
  result.optimal_first_moves = oracle.optimal_moves(oracle.all(), 0, true).size();
  if (exact && options.certify_uniqueness) {
    result.unique_up_to_equivalent_items = oracle.unique_up_to_equivalent_items();
  }
  return result;
}

namespace {

// Tracks the running minimum and how many candidates attain it.
template <class T>
struct MinTracker {
  bool have = false;
  T best = T(0);
  std::size_t count = 0;

  /// True when `value` becomes the new strict minimum.
  bool offer(const T& value) {
    if (!have || (value < best && !ScalarTraits<T>::same(value, best))) {
      best = value;
      count = 1;
      have = true;
      return true;
    }
    if (ScalarTraits<T>::same(value, best)) {
      ++count;
      if (value < best) best = value;
    }
    return false;
  }
};

TestOrder order_from_classes(const Population& pop, const QClasses& classes,
                             const std::vector<std::size_t>& class_sequence) {
  std::vector<std::size_t> used(classes.members.size(), 0);
  std::vector<std::size_t> perm;
  perm.reserve(class_sequence.size());
  for (std::size_t c : class_sequence) perm.push_back(classes.members[c][used[c]++]);
  return pop.permuted(perm);
}

template <class T>
class GptaOrderSearch {
 public:
  explicit GptaOrderSearch(const Population& pop)
      : classes_(pop), k_(classes_.members.size()), n_(pop.size()), sequence_(n_) {
    for (const auto& members : classes_.members) {
      q_.push_back(pop.q<T>(members.front()));
      left_.push_back(members.size());
    }
  }

  void run() {
    // Suffix costs F[c] = E(c ++ suffix) for a carried unit of class c,
    // F[k] = E(suffix). Empty suffix: E(c) = 1, E() = 0.
    std::vector<T> empty(k_ + 1, T(1));
    empty[k_] = T(0);
    extend(empty, 0);
  }

  const MinTracker<T>& tracker() const { return tracker_; }
  const std::vector<std::size_t>& best_sequence() const { return best_sequence_; }
  const QClasses& classes() const { return classes_; }

 private:
  void extend(const std::vector<T>& suffix, std::size_t length) {
    std::vector<T> next(k_ + 1);
    for (std::size_t x = 0; x < k_; ++x) {
      if (left_[x] == 0) continue;
      --left_[x];
      sequence_[n_ - 1 - length] = x;
      next[k_] = suffix[x];
      if (length + 1 == n_) {
        if (tracker_.offer(next[k_])) best_sequence_ = sequence_;
      } else {
        for (std::size_t c = 0; c < k_; ++c) {
          if (left_[c] == 0) continue;
          // Pair (carried c, x): the first unit wins ties.
          const bool carry_wins = q_[c] >= q_[x];
          const T& q_a = carry_wins ? q_[c] : q_[x];
          const std::size_t b = carry_wins ? x : c;
          next[c] = T(2) - q_[c] * q_[x] + q_a * suffix[k_] + (T(1) - q_a) * suffix[b];
        }
        extend(next, length + 1);
      }
      ++left_[x];
    }
  }

  QClasses classes_;
  std::size_t k_;
  std::size_t n_;
  std::vector<T> q_;
  std::vector<std::size_t> left_;
  std::vector<std::size_t> sequence_;
  std::vector<std::size_t> best_sequence_;
  MinTracker<T> tracker_;
};

}  // namespace

template <class T>
OrderSearchResult<T> best_gpta_order(const Population& pop) {
  require_size_at_most(pop.size(), kBestGptaOrderLimit, "best_gpta_order");
  if (pop.empty()) return {pop, T(0), 1};
  GptaOrderSearch<T> search(pop);
  search.run();
  return {order_from_classes(pop, search.classes(), search.best_sequence()), search.tracker().best,
          search.tracker().count};
}

template <class T>
OrderSearchResult<T> best_fixed_order(const Population& pop) {
  require_size_at_most(pop.size(), kBestFixedOrderLimit, "best_fixed_order");
  if (pop.empty()) return {pop, T(0), 1};
  const QClasses classes(pop);
  std::vector<std::size_t> sequence;
  for (std::size_t c = 0; c < classes.members.size(); ++c) {
    sequence.insert(sequence.end(), classes.members[c].size(), c);
  }
  MinTracker<T> tracker;
  std::vector<std::size_t> best_sequence;
  do {
    const TestOrder order = order_from_classes(pop, classes, sequence);
    if (tracker.offer(FixedOrderDp<T>(order).cost())) best_sequence = sequence;
  } while (std::next_permutation(sequence.begin(), sequence.end()));
  return {order_from_classes(pop, classes, best_sequence), tracker.best, tracker.count};
}

template <class T>
TwoUnitResult<T> two_unit_optimal(const T& q_a, const T& q_b) {
  if (!(q_a > 0 && q_a < 1 && q_b > 0 && q_b < 1)) {
    throw ValidationError("two_unit_optimal: q values must lie in (0,1)");
  }
  if (q_a < q_b) throw ValidationError("two_unit_optimal: requires q_a >= q_b");
  // Pair first, then the larger-q unit: q_a q_b * 1 + q_a (1 - q_b) * 2 + (1 - q_a) * 3.
  const T pair_first = T(3) - q_a - q_a * q_b;
  const T lhs = q_a + q_a * q_b;
  if (lhs > T(1) && !ScalarTraits<T>::same(lhs, T(1))) return {pair_first, TwoUnitStrategy::kPairFirst};
  return {T(2), TwoUnitStrategy::kIndividual};
}

template <class T>
T adaptive_pairing_gpta(const Population& pop) {
  const std::size_t n = pop.size();
  require_size_at_most(n, kAdaptivePairingLimit, "adaptive_pairing_gpta");
  const Mask states = Mask{1} << n;
  std::vector<T> best(states, T(0));
  for (Mask s = 1; s < states; ++s) {
    if (std::has_single_bit(s)) {
      best[s] = T(1);
      continue;
    }
    bool have = false;
    T candidate(0);
    for (std::size_t u = 0; u < n; ++u) {
      if (!(s >> u & 1U)) continue;
      for (std::size_t v = u + 1; v < n; ++v) {
        if (!(s >> v & 1U)) continue;
        const std::size_t a = pop.q<T>(u) >= pop.q<T>(v) ? u : v;
        const Mask rest = s & ~(Mask{1} << u) & ~(Mask{1} << v);
        const T& q_a = pop.q<T>(a);
        candidate = T(2) - pop.q<T>(u) * pop.q<T>(v) + q_a * best[rest] +
                    (T(1) - q_a) * best[s & ~(Mask{1} << a)];
        if (!have || candidate < best[s]) {
          best[s] = candidate;
          have = true;
        }
      }
    }
  }
  return best[states - 1];
}

template OracleResult<double> optimal_nested<double>(const Population&, const OracleOptions&);
template OracleResult<Rational> optimal_nested<Rational>(const Population&, const OracleOptions&);
template OrderSearchResult<double> best_gpta_order<double>(const Population&);
template OrderSearchResult<Rational> best_gpta_order<Rational>(const Population&);
template OrderSearchResult<double> best_fixed_order<double>(const Population&);
template OrderSearchResult<Rational> best_fixed_order<Rational>(const Population&);
template TwoUnitResult<double> two_unit_optimal<double>(const double&, const double&);
template TwoUnitResult<Rational> two_unit_optimal<Rational>(const Rational&, const Rational&);
template double adaptive_pairing_gpta<double>(const Population&);
template Rational adaptive_pairing_gpta<Rational>(const Population&);

}  // namespace groupt
