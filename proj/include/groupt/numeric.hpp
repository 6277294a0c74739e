#pragma once

#include <gmpxx.h>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace groupt {

using Rational = mpq_class;

enum class NumericMode { kFloat, kExact };

/// Absolute equality tolerance for FLOAT-mode cost comparisons.
inline constexpr double kFloatTolerance = 1e-9;

NumericMode parse_mode(std::string_view text);
std::string_view mode_name(NumericMode mode);

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr NumericMode kMode = NumericMode::kFloat;
  static double to_double(double v) { return v; }
  static double abs(double v) { return std::fabs(v); }
  /// a == b within kFloatTolerance.
  static bool same(double a, double b) { return std::fabs(a - b) <= kFloatTolerance; }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr NumericMode kMode = NumericMode::kExact;
  static double to_double(const Rational& v) { return v.get_d(); }
  static Rational abs(const Rational& v) { return ::abs(v); }
  static bool same(const Rational& a, const Rational& b) { return a == b; }
};

template <class T>
double to_double(const T& v) {
  return ScalarTraits<T>::to_double(v);
}

/// Exact decimal rendering when the denominator divides a power of ten.
std::optional<std::string> to_decimal_string(const Rational& value);

/// Fixed-point rendering with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

/// Shortest text that reads back to the same double.
std::string format_roundtrip(double value);

/// An expected test count tagged with the arithmetic that produced it.
class CostValue {
 public:
  CostValue() = default;
  explicit CostValue(double value) : value_(value) {}
  explicit CostValue(Rational exact) : value_(exact.get_d()), exact_(std::move(exact)) {}

  NumericMode mode() const { return exact_ ? NumericMode::kExact : NumericMode::kFloat; }
  double value() const { return value_; }
  const std::optional<Rational>& exact() const { return exact_; }

  /// Four decimals by default; `full` gives round-trip precision (and the
  /// fraction in EXACT mode).
  std::string to_string(bool full = false) const;

  friend bool operator==(const CostValue& a, const CostValue& b);

 private:
  double value_ = 0.0;
  std::optional<Rational> exact_;
};

inline CostValue to_cost_value(double v) { return CostValue(v); }
inline CostValue to_cost_value(const Rational& v) { return CostValue(v); }

/// Exact comparison when both sides are exact, otherwise within kFloatTolerance.
bool costs_equal(const CostValue& a, const CostValue& b);

}  // namespace groupt
