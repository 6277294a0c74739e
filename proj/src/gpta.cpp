#include "groupt/gpta.hpp"

#include <cmath>
#include <unordered_map>

#include "groupt/errors.hpp"
#include "groupt/rng.hpp"

namespace groupt {
namespace {

constexpr std::size_t kNoCarry = static_cast<std::size_t>(-1);

// Current head of the sequence: the carried unit (if any) paired with the
// next unit of the order, or the next two units.
struct Pair {
  std::size_t first;
  std::size_t second;
  std::size_t tail;
};

Pair head_pair(std::size_t carry, std::size_t next) {
  if (carry != kNoCarry) return {carry, next, next + 1};
  return {next, next + 1, next + 2};
}

std::size_t remaining(std::size_t n, std::size_t carry, std::size_t next) {
  return (n - next) + (carry != kNoCarry ? 1 : 0);
}

template <class T>
class CostRecursion {
 public:
  explicit CostRecursion(std::span<const T> q) : q_(q) {}

  T eval(std::size_t carry, std::size_t next) {
    const std::size_t left = remaining(q_.size(), carry, next);
    if (left == 0) return T(0);
    if (left == 1) return T(1);
    const std::uint64_t key = (static_cast<std::uint64_t>(carry + 1) << 32) | next;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const Pair pr = head_pair(carry, next);
    const bool first_wins = q_[pr.first] >= q_[pr.second];
    const std::size_t a = first_wins ? pr.first : pr.second;
    const std::size_t b = first_wins ? pr.second : pr.first;
    const T e_tail = eval(kNoCarry, pr.tail);
    const T e_carry = eval(b, pr.tail);
    T value = T(2) - q_[pr.first] * q_[pr.second] + q_[a] * e_tail + (T(1) - q_[a]) * e_carry;
    memo_.emplace(key, value);
    return value;
  }

 private:
  std::span<const T> q_;
  std::unordered_map<std::uint64_t, T> memo_;
};

template <class T>
std::vector<T> q_vector(const TestOrder& order) {
  std::vector<T> q;
  q.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) q.push_back(order.q<T>(i));
  return q;
}

class PolicyBuilder {
 public:
  explicit PolicyBuilder(const TestOrder& order) : order_(order) {}

  PolicyTree build(std::size_t carry, std::size_t next) {
    const std::size_t left = remaining(order_.size(), carry, next);
    if (left == 0) return PolicyTree::leaf();
    if (left == 1) {
      const std::size_t last = carry != kNoCarry ? carry : next;
      return PolicyTree::test({order_[last].id}, PolicyTree::leaf(), PolicyTree::leaf());
    }
    const std::uint64_t key = (static_cast<std::uint64_t>(carry + 1) << 32) | next;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const Pair pr = head_pair(carry, next);
    const bool first_wins = order_[pr.first].q_exact >= order_[pr.second].q_exact;
    const std::size_t a = first_wins ? pr.first : pr.second;
    const std::size_t b = first_wins ? pr.second : pr.first;
    PolicyTree rest = build(kNoCarry, pr.tail);
    PolicyTree resolve = PolicyTree::test({order_[a].id}, rest, build(b, pr.tail));
    PolicyTree tree =
        PolicyTree::test({order_[pr.first].id, order_[pr.second].id}, rest, std::move(resolve));
    memo_.emplace(key, tree);
    return tree;
  }

 private:
  const TestOrder& order_;
  std::unordered_map<std::uint64_t, PolicyTree> memo_;
};

// Runs the algorithm on a realized defect vector. `trace` may be null.
int run_gpta(const TestOrder& order, const DefectVector& defects, DefectVector* classification,
             std::vector<TestEvent>* trace) {
  const std::size_t n = order.size();
  int tests = 0;
  auto record = [&](std::vector<int> ids, bool positive) {
    ++tests;
    if (trace) trace->push_back({TestEvent::Kind::kTest, std::move(ids), positive});
  };
  auto classify = [&](std::size_t i, bool defective) {
    if (classification) (*classification)[i] = defective;
  };

  std::size_t carry = kNoCarry;
  std::size_t next = 0;
  while (remaining(n, carry, next) > 0) {
    if (remaining(n, carry, next) == 1) {
      const std::size_t last = carry != kNoCarry ? carry : next;
      record({order[last].id}, defects[last]);
      classify(last, defects[last]);
      break;
    }
    const Pair pr = head_pair(carry, next);
    const bool pair_positive = defects[pr.first] || defects[pr.second];
    record({order[pr.first].id, order[pr.second].id}, pair_positive);
    carry = kNoCarry;
    next = pr.tail;
    if (!pair_positive) {
      classify(pr.first, false);
      classify(pr.second, false);
      continue;
    }
    const bool first_wins = order[pr.first].q_exact >= order[pr.second].q_exact;
    const std::size_t a = first_wins ? pr.first : pr.second;
    const std::size_t b = first_wins ? pr.second : pr.first;
    record({order[a].id}, defects[a]);
    classify(a, defects[a]);
    if (!defects[a]) {
      classify(b, true);
      if (trace) trace->push_back({TestEvent::Kind::kDeduce, {order[b].id}, true});
    } else {
      carry = b;
    }
  }
  return tests;
}

}  // namespace

template <class T>
T gpta_cost_of(std::span<const T> q_values) {
  return CostRecursion<T>(q_values).eval(kNoCarry, 0);
}

template <class T>
T gpta_cost(const TestOrder& order) {
  const std::vector<T> q = q_vector<T>(order);
  return gpta_cost_of<T>(q);
}

PolicyTree gpta_policy(const TestOrder& order) {
  require_size_at_most(order.size(), kGptaPolicyLimit, "gpta_policy");
  return PolicyBuilder(order).build(kNoCarry, 0);
}

std::string TestEvent::to_string() const {
  if (kind == Kind::kDeduce) return "DEDUCE " + std::to_string(ids.front()) + " DEFECTIVE";
  std::string out = "TEST {";
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(ids[k]);
  }
  out += positive ? "} -> POS" : "} -> NEG";
  return out;
}

Execution gpta_execute(const TestOrder& order, const DefectVector& defects) {
  if (defects.size() != order.size()) {
    throw ValidationError("defect vector length " + std::to_string(defects.size()) +
                          " does not match population size " + std::to_string(order.size()));
  }
  Execution out;
  out.classification.assign(order.size(), false);
  out.tests_used = run_gpta(order, defects, &out.classification, &out.trace);
  return out;
}

template <class T>
T gpta_expected_by_enumeration(const TestOrder& order) {
  const std::size_t n = order.size();
  require_size_at_most(n, kGptaEnumerationLimit, "gpta_expected_by_enumeration");
  T total(0);
  DefectVector defects(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    T weight(1);
    for (std::size_t i = 0; i < n; ++i) {
      defects[i] = (mask >> i) & 1U;
      weight *= defects[i] ? order.p<T>(i) : order.q<T>(i);
    }
    total += weight * T(run_gpta(order, defects, nullptr, nullptr));
  }
  return total;
}

MonteCarloEstimate gpta_monte_carlo(const TestOrder& order, std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw ValidationError("gpta_monte_carlo: trials must be >= 1");
  const std::size_t n = order.size();
  DefectVector defects(n);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    SplitMix64 rng(derive_seed(seed, t));
    for (std::size_t i = 0; i < n; ++i) defects[i] = rng.uniform01() < order[i].p;
    const double count = run_gpta(order, defects, nullptr, nullptr);
    sum += count;
    sum_sq += count * count;
  }
  MonteCarloEstimate est;
  const double m = static_cast<double>(trials);
  est.mean = sum / m;
  if (trials > 1) {
    const double variance = std::max(0.0, (sum_sq - m * est.mean * est.mean) / (m - 1.0));
    est.standard_error = std::sqrt(variance / m);
  }
  return est;
}

template <class T>
PairComparison<T> pair_resolution_comparison(const T& q_a, const T& q_b, const TestOrder& continuation) {
  if (!(q_a > 0 && q_a < 1 && q_b > 0 && q_b < 1)) {
    throw ValidationError("pair_resolution_comparison: q values must lie in (0,1)");
  }
  if (q_a < q_b) throw ValidationError("pair_resolution_comparison: requires q_a >= q_b");

  std::vector<T> tail = q_vector<T>(continuation);
  std::vector<T> with_b{q_b};
  with_b.insert(with_b.end(), tail.begin(), tail.end());
  std::vector<T> with_a{q_a};
  with_a.insert(with_a.end(), tail.begin(), tail.end());

  const T e_tail = gpta_cost_of<T>(tail);
  const T e_with_b = gpta_cost_of<T>(with_b);
  const T e_with_a = gpta_cost_of<T>(with_a);
  const T base = T(2) - q_a * q_b;
  return {base + q_a * e_tail + (T(1) - q_a) * e_with_b, base + q_b * e_tail + (T(1) - q_b) * e_with_a};
}

template double gpta_cost<double>(const TestOrder&);
template Rational gpta_cost<Rational>(const TestOrder&);
template double gpta_cost_of<double>(std::span<const double>);
template Rational gpta_cost_of<Rational>(std::span<const Rational>);
template double gpta_expected_by_enumeration<double>(const TestOrder&);
template Rational gpta_expected_by_enumeration<Rational>(const TestOrder&);
template PairComparison<double> pair_resolution_comparison<double>(const double&, const double&,
                                                                   const TestOrder&);
template PairComparison<Rational> pair_resolution_comparison<Rational>(const Rational&, const Rational&,
                                                                       const TestOrder&);

}  // namespace groupt
