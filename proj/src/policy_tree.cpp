#include "groupt/policy_tree.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "groupt/errors.hpp"

namespace groupt {

PolicyTree PolicyTree::test(std::vector<int> ids, PolicyTree negative, PolicyTree positive) {
  PolicyTree tree;
  tree.node_ = std::make_shared<const PolicyNode>(
      PolicyNode{std::move(ids), std::move(negative), std::move(positive)});
  return tree;
}

const std::vector<int>& PolicyTree::tested() const {
  static const std::vector<int> kNone;
  return node_ ? node_->ids : kNone;
}

const PolicyTree& PolicyTree::negative() const {
  static const PolicyTree kLeaf;
  return node_ ? node_->negative : kLeaf;
}

const PolicyTree& PolicyTree::positive() const {
  static const PolicyTree kLeaf;
  return node_ ? node_->positive : kLeaf;
}

namespace {

void serialize_into(const PolicyTree& tree, std::string& out) {
  if (tree.is_leaf()) {
    out += "LEAF";
    return;
  }
  out += "(TEST {";
  const auto& ids = tree.tested();
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(ids[k]);
  }
  out += "} NEG=";
  serialize_into(tree.negative(), out);
  out += " POS=";
  serialize_into(tree.positive(), out);
  out += ')';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PolicyTree parse_all() {
    PolicyTree tree = parse_tree();
    if (pos_ != text_.size()) fail("trailing characters");
    return tree;
  }

 private:
  PolicyTree parse_tree() {
    if (consume("LEAF")) return PolicyTree::leaf();
    expect("(TEST {");
    std::vector<int> ids;
    while (true) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == start) fail("expected unit id");
      ids.push_back(std::stoi(std::string(text_.substr(start, pos_ - start))));
      if (consume(",")) continue;
      expect("}");
      break;
    }
    expect(" NEG=");
    PolicyTree neg = parse_tree();
    expect(" POS=");
    PolicyTree pos = parse_tree();
    expect(")");
    return PolicyTree::test(std::move(ids), std::move(neg), std::move(pos));
  }

  bool consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }
  void expect(std::string_view token) {
    if (!consume(token)) fail("expected '" + std::string(token) + "'");
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw ValidationError("policy parse error at offset " + std::to_string(pos_) + ": " + why);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::size_t saturating_add(std::size_t a, std::size_t b, std::size_t cap) {
  return (a >= cap || b >= cap - a) ? cap : a + b;
}

enum class Status : char { kPool, kContaminated, kClassified };

// Walks every root-to-leaf path, checking structure and accumulating the
// expected number of tests.
template <class T>
class PolicyWalker {
 public:
  explicit PolicyWalker(const Population& pop) : pop_(pop), status_(pop.size(), Status::kPool) {
    for (std::size_t i = 0; i < pop.size(); ++i) position_[pop[i].id] = i;
  }

  T run(const PolicyTree& tree) { return walk(tree); }

 private:
  T walk(const PolicyTree& tree) {
    if (tree.is_leaf()) {
      for (Status s : status_) {
        if (s != Status::kClassified) throw PolicyError("LEAF reached with unclassified units");
      }
      return T(0);
    }

    std::vector<std::size_t> tested;
    for (int id : tree.tested()) {
      auto it = position_.find(id);
      if (it == position_.end()) throw PolicyError("unknown unit id " + std::to_string(id));
      tested.push_back(it->second);
    }
    if (tested.empty()) throw PolicyError("empty test set");
    std::vector<std::size_t> sorted = tested;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw PolicyError("duplicate unit in test set");
    }

    std::vector<std::size_t> contaminated;
    for (std::size_t i = 0; i < status_.size(); ++i) {
      if (status_[i] == Status::kContaminated) contaminated.push_back(i);
    }
    const std::vector<Status> saved = status_;

    T q_tested(1);
    for (std::size_t i : tested) q_tested *= pop_.q<T>(i);

    T p_neg;
    T p_pos;
    if (!contaminated.empty()) {
      for (std::size_t i : tested) {
        if (status_[i] != Status::kContaminated) {
          throw PolicyError("nested property violated: unit " + std::to_string(pop_[i].id) +
                            " tested outside the contaminated set");
        }
      }
      if (tested.size() >= contaminated.size()) {
        throw PolicyError("nested property violated: test set is not a proper subset");
      }
      T q_all(1);
      for (std::size_t i : contaminated) q_all *= pop_.q<T>(i);
      T q_rest(1);
      for (std::size_t i : contaminated) {
        if (!std::binary_search(sorted.begin(), sorted.end(), i)) q_rest *= pop_.q<T>(i);
      }
      const T denom = T(1) - q_all;
      p_neg = q_tested * (T(1) - q_rest) / denom;
      p_pos = (T(1) - q_tested) / denom;
    } else {
      for (std::size_t i : tested) {
        if (status_[i] != Status::kPool) {
          throw PolicyError("unit " + std::to_string(pop_[i].id) + " is already classified");
        }
      }
      p_neg = q_tested;
      p_pos = T(1) - q_tested;
    }

    // Negative: tested units are good; a singleton remainder of the
    // contaminated set is defective by deduction.
    for (std::size_t i : tested) status_[i] = Status::kClassified;
    if (contaminated.size() == tested.size() + 1) {
      for (std::size_t i : contaminated) status_[i] = Status::kClassified;
    }
    const T e_neg = walk(tree.negative());
    status_ = saved;

    // Positive: the tested set is contaminated; the rest of the old
    // contaminated set returns to the binomial pool.
    for (std::size_t i : contaminated) status_[i] = Status::kPool;
    const Status mark = tested.size() == 1 ? Status::kClassified : Status::kContaminated;
    for (std::size_t i : tested) status_[i] = mark;
    const T e_pos = walk(tree.positive());
    status_ = saved;

    return T(1) + p_neg * e_neg + p_pos * e_pos;
  }

  const Population& pop_;
  std::vector<Status> status_;
  std::unordered_map<int, std::size_t> position_;
};

}  // namespace

std::string PolicyTree::serialize() const {
  std::string out;
  serialize_into(*this, out);
  return out;
}

PolicyTree PolicyTree::parse(std::string_view text) { return Parser(text).parse_all(); }

std::size_t PolicyTree::expanded_size(std::size_t cap) const {
  std::unordered_map<const PolicyNode*, std::size_t> memo;
  std::function<std::size_t(const PolicyTree&)> count = [&](const PolicyTree& t) -> std::size_t {
    if (t.is_leaf()) return 0;
    auto it = memo.find(t.node_.get());
    if (it != memo.end()) return it->second;
    const std::size_t total =
        saturating_add(1, saturating_add(count(t.negative()), count(t.positive()), cap), cap);
    memo.emplace(t.node_.get(), total);
    return total;
  };
  return count(*this);
}

std::size_t PolicyTree::max_group_size() const {
  std::unordered_set<const PolicyNode*> seen;
  std::size_t best = 0;
  std::function<void(const PolicyTree&)> visit = [&](const PolicyTree& t) {
    if (t.is_leaf() || !seen.insert(t.node_.get()).second) return;
    best = std::max(best, t.tested().size());
    visit(t.negative());
    visit(t.positive());
  };
  visit(*this);
  return best;
}

bool operator==(const PolicyTree& a, const PolicyTree& b) {
  if (a.node_ == b.node_) return true;
  if (a.is_leaf() || b.is_leaf()) return false;
  return a.tested() == b.tested() && a.negative() == b.negative() && a.positive() == b.positive();
}

template <class T>
T policy_expected_cost(const PolicyTree& policy, const Population& pop) {
  return PolicyWalker<T>(pop).run(policy);
}

void validate_policy(const PolicyTree& policy, const Population& pop) {
  (void)PolicyWalker<double>(pop).run(policy);
}

template double policy_expected_cost<double>(const PolicyTree&, const Population&);
template Rational policy_expected_cost<Rational>(const PolicyTree&, const Population&);

}  // namespace groupt
