#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "groupt/numeric.hpp"

namespace groupt {

/// One item with a known probability of being defective.
///
/// Both arithmetic views are kept: `p`/`q` are the nearest doubles to the
/// input literal, `p_exact`/`q_exact` the exact rationals (decimal literals
/// parse to k/10^d; doubles convert exactly).
struct Unit {
  int id = 0;
  double p = 0.0;
  double q = 1.0;
  Rational p_exact;
  Rational q_exact;
};

enum class ValueKind { kP, kQ };

/// Ordered sequence of units with distinct ids and 0 < p < 1.
class Population {
 public:
  Population() = default;
  explicit Population(std::vector<Unit> units);

  /// Units numbered 1..n in the given order.
  static Population from_p(std::span<const double> p_values);
  static Population from_q(std::span<const double> q_values);

  std::size_t size() const { return units_.size(); }
  bool empty() const { return units_.empty(); }
  const Unit& operator[](std::size_t i) const { return units_[i]; }
  std::span<const Unit> units() const { return units_; }
  auto begin() const { return units_.begin(); }
  auto end() const { return units_.end(); }

  template <class T>
  const T& q(std::size_t i) const;
  template <class T>
  const T& p(std::size_t i) const;

  std::vector<double> q_values() const;

  /// Units reordered so that result[k] = (*this)[perm[k]].
  Population permuted(std::span<const std::size_t> perm) const;

  /// Same units (by id), possibly in a different order.
  bool is_permutation_of(const Population& other) const;

 private:
  std::vector<Unit> units_;
};

template <>
inline const double& Population::q<double>(std::size_t i) const { return units_[i].q; }
template <>
inline const Rational& Population::q<Rational>(std::size_t i) const { return units_[i].q_exact; }
template <>
inline const double& Population::p<double>(std::size_t i) const { return units_[i].p; }
template <>
inline const Rational& Population::p<Rational>(std::size_t i) const { return units_[i].p_exact; }

/// A population read in the order units are to be tested.
using TestOrder = Population;

/// Comma- or newline-separated decimal literals; `#` starts a comment line.
/// A comment of the form `# kind: p` or `# kind: q` overrides `kind`.
Population parse_population(std::string_view text, ValueKind kind);
Population read_population_file(const std::filesystem::path& path, ValueKind kind);

/// Text form accepted by parse_population; exact decimals where possible.
std::string write_population(const Population& pop, ValueKind kind);

/// Product of q over positions i..j, 1-based inclusive.
template <class T>
T q_product(const Population& pop, std::size_t i, std::size_t j);

/// Probabilities of being defective for which pairwise testing is the
/// optimal nested algorithm in the homogeneous case.
struct RRange {
  static constexpr double kLo = 0.29289321881345247560;  // 1 - 1/sqrt(2)
  static constexpr double kHi = 0.38196601125010515180;  // (3 - sqrt(5)) / 2
};

/// q for which q + q^2 = 1, i.e. p at the upper R-range boundary.
inline constexpr double kGoldenQ = 0.61803398874989484820;

bool r_range_contains(double p);

/// Stable sort by q nonincreasing.
Population sort_by_q_descending(const Population& pop);

}  // namespace groupt
