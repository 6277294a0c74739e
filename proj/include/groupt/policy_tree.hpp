#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "groupt/population.hpp"

namespace groupt {

struct PolicyNode;

/// An explicit nested testing strategy.
///
/// A node is either LEAF (every unit classified) or a group test on a set
/// of unit ids with a negative and a positive continuation. Subtrees are
/// immutable and may be shared, so engines that memoize on state build a
/// DAG whose expansion is the decision tree.
class PolicyTree {
 public:
  PolicyTree() = default;  // LEAF

  static PolicyTree leaf() { return {}; }
  static PolicyTree test(std::vector<int> ids, PolicyTree negative, PolicyTree positive);

  bool is_leaf() const { return node_ == nullptr; }
  const std::vector<int>& tested() const;
  const PolicyTree& negative() const;
  const PolicyTree& positive() const;

  /// `(TEST {1,2} NEG=<subtree> POS=<subtree>)` or `LEAF`.
  std::string serialize() const;
  static PolicyTree parse(std::string_view text);

  /// Node count of the expanded tree (LEAFs excluded), saturating at `cap`.
  std::size_t expanded_size(std::size_t cap = SIZE_MAX) const;

  /// Largest tested set anywhere in the tree.
  std::size_t max_group_size() const;

  friend bool operator==(const PolicyTree& a, const PolicyTree& b);

 private:
  std::shared_ptr<const PolicyNode> node_;
};

struct PolicyNode {
  std::vector<int> ids;
  PolicyTree negative;
  PolicyTree positive;
};

/// Exact expected number of tests of `policy` on `pop`.
///
/// Throws PolicyError when the tree tests a classified unit, breaks the
/// nested property, or reaches LEAF with unclassified units.
template <class T>
T policy_expected_cost(const PolicyTree& policy, const Population& pop);

/// Throws PolicyError unless every root-to-leaf path is a valid nested
/// strategy that classifies all units.
void validate_policy(const PolicyTree& policy, const Population& pop);

}  // namespace groupt
