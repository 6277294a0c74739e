#include "groupt/nested_dp.hpp"

#include <limits>
#include <unordered_map>

#include "groupt/errors.hpp"

namespace groupt {

template <class T>
FixedOrderDp<T>::FixedOrderDp(const TestOrder& order)
    : order_(order),
      n_(order.size()),
      g_(n_ + 1, T(0)),
      h_(n_ * n_, T(0)),
      g_choice_(n_ + 1, 0),
      h_choice_(n_ * n_, 0) {
  // Row-wise direct products: prod[index(i,j)] = q_i * ... * q_j.
  std::vector<T> prod(n_ * n_, T(0));
  for (std::size_t i = 0; i < n_; ++i) {
    T running(1);
    for (std::size_t j = i; j < n_; ++j) {
      running *= order.q<T>(j);
      prod[index(i, j)] = running;
    }
  }

  T candidate(0);
  T best(0);
  for (std::size_t i = n_; i-- > 0;) {
    h_[index(i, i)] = g_[i + 1];
    h_choice_[index(i, i)] = i;
    for (std::size_t j = i + 1; j < n_; ++j) {
      const T& q_ij = prod[index(i, j)];
      std::size_t arg = i;
      for (std::size_t m = i; m < j; ++m) {
        const T& q_im = prod[index(i, m)];
        // Q(i,m)(1 - Q(m+1,j)) = Q(i,m) - Q(i,j)
        candidate = (q_im - q_ij) * h_[index(m + 1, j)] + (T(1) - q_im) * h_[index(i, m)];
        if (m == i || candidate < best) {
          best = candidate;
          arg = m;
        }
      }
      h_[index(i, j)] = T(1) + best / (T(1) - q_ij);
      h_choice_[index(i, j)] = arg;
    }

    std::size_t arg = i;
    for (std::size_t k = i; k < n_; ++k) {
      const T& q_ik = prod[index(i, k)];
      candidate = T(1) + q_ik * g_[k + 1] + (T(1) - q_ik) * h_[index(i, k)];
      if (k == i || candidate < best) {
        best = candidate;
        arg = k;
      }
    }
    g_[i] = best;
    g_choice_[i] = arg;
  }
}

template <class T>
PolicyTree FixedOrderDp<T>::policy() const {
  std::vector<PolicyTree> g_tree(n_ + 1);
  std::vector<PolicyTree> h_tree(n_ * n_);
  auto ids = [&](std::size_t from, std::size_t to) {
    std::vector<int> out;
    for (std::size_t t = from; t <= to; ++t) out.push_back(order_[t].id);
    return out;
  };
  for (std::size_t i = n_; i-- > 0;) {
    h_tree[index(i, i)] = g_tree[i + 1];
    for (std::size_t j = i + 1; j < n_; ++j) {
      const std::size_t m = h_choice_[index(i, j)];
      h_tree[index(i, j)] = PolicyTree::test(ids(i, m), h_tree[index(m + 1, j)], h_tree[index(i, m)]);
    }
    const std::size_t k = g_choice_[i];
    g_tree[i] = PolicyTree::test(ids(i, k), g_tree[k + 1], h_tree[index(i, k)]);
  }
  return g_tree[0];
}

template <class T>
FixedOrderResult<T> fixed_order_optimal(const TestOrder& order) {
  FixedOrderDp<T> dp(order);
  return {dp.cost(), dp.policy()};
}

namespace {

// Exhaustive order-respecting search. The posterior is the explicit list of
// defect vectors consistent with all outcomes so far, with prior weights;
// no conditional-probability formula or reversion rule is used.
template <class T>
class OrderRespectingSearch {
 public:
  explicit OrderRespectingSearch(const TestOrder& order) : n_(order.size()) {
    const std::uint32_t worlds = 1U << n_;
    weight_.resize(worlds);
    for (std::uint32_t w = 0; w < worlds; ++w) {
      T weight(1);
      for (std::size_t i = 0; i < n_; ++i) weight *= ((w >> i) & 1U) ? order.p<T>(i) : order.q<T>(i);
      weight_[w] = weight;
    }
  }

  T solve() {
    std::vector<std::uint32_t> all(weight_.size());
    for (std::uint32_t w = 0; w < all.size(); ++w) all[w] = w;
    return search(all, 0, 0);
  }

 private:
  // `live`: consistent worlds. Unclassified units start at `first`;
  // `contaminated_end` > first marks the contaminated run first..end-1.
  T search(const std::vector<std::uint32_t>& live, std::size_t first, std::size_t contaminated_end) {
    while (first < n_ && classified(live, first)) ++first;
    if (contaminated_end <= first) contaminated_end = 0;
    if (first == n_) return T(0);

    T total_weight(0);
    for (std::uint32_t w : live) total_weight += weight_[w];

    const std::size_t last = contaminated_end ? contaminated_end - 1 : n_;
    bool have_best = false;
    T best(0);
    for (std::size_t end = first + 1; end <= last; ++end) {
      std::uint32_t group = 0;
      for (std::size_t t = first; t < end; ++t) group |= 1U << t;
      std::vector<std::uint32_t> negative;
      std::vector<std::uint32_t> positive;
      T neg_weight(0);
      for (std::uint32_t w : live) {
        if (w & group) {
          positive.push_back(w);
        } else {
          negative.push_back(w);
          neg_weight += weight_[w];
        }
      }
      T value(1);
      if (!negative.empty()) {
        const std::size_t next_end = contaminated_end ? contaminated_end : 0;
        value += neg_weight / total_weight * search(negative, end, next_end);
      }
      if (!positive.empty()) {
        value += (total_weight - neg_weight) / total_weight * search(positive, first, end);
      }
      if (!have_best || value < best) {
        best = value;
        have_best = true;
      }
    }
    return best;
  }

  bool classified(const std::vector<std::uint32_t>& live, std::size_t unit) const {
    const std::uint32_t bit = 1U << unit;
    const bool first = live.front() & bit;
    for (std::uint32_t w : live) {
      if (static_cast<bool>(w & bit) != first) return false;
    }
    return true;
  }

  std::size_t n_;
  std::vector<T> weight_;
};

}  // namespace

template <class T>
T brute_force_order_respecting(const TestOrder& order) {
  require_size_at_most(order.size(), kBruteForceOrderLimit, "brute_force_order_respecting");
  if (order.empty()) return T(0);
  return OrderRespectingSearch<T>(order).solve();
}

template <class T>
bool individual_testing_sufficient(const Population& pop) {
  if (pop.size() < 2) return true;
  const Population sorted = sort_by_q_descending(pop);
  const T& q1 = sorted.q<T>(0);
  const T& q2 = sorted.q<T>(1);
  return q1 + q1 * q2 < T(1);
}

template class FixedOrderDp<double>;
template class FixedOrderDp<Rational>;
template FixedOrderResult<double> fixed_order_optimal<double>(const TestOrder&);
template FixedOrderResult<Rational> fixed_order_optimal<Rational>(const TestOrder&);
template double brute_force_order_respecting<double>(const TestOrder&);
template Rational brute_force_order_respecting<Rational>(const TestOrder&);
template bool individual_testing_sufficient<double>(const Population&);
template bool individual_testing_sufficient<Rational>(const Population&);

}  // namespace groupt
