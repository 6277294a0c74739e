#include "groupt/numeric.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "groupt/errors.hpp"

namespace groupt {

NumericMode parse_mode(std::string_view text) {
  if (text == "float") return NumericMode::kFloat;
  if (text == "exact") return NumericMode::kExact;
  throw ValidationError("unknown numeric mode '" + std::string(text) + "' (expected float|exact)");
}

std::string_view mode_name(NumericMode mode) {
  return mode == NumericMode::kExact ? "exact" : "float";
}

std::optional<std::string> to_decimal_string(const Rational& value) {
  mpz_class den = value.get_den();
  int twos = 0;
  int fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    den /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return std::nullopt;

  const int digits = std::max(twos, fives);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  mpz_class scaled = value.get_num() * scale / value.get_den();

  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string text = scaled.get_str();
  if (digits > 0) {
    if (static_cast<int>(text.size()) <= digits) {
      text.insert(0, static_cast<std::size_t>(digits) + 1 - text.size(), '0');
    }
    text.insert(text.size() - static_cast<std::size_t>(digits), ".");
  }
  return negative ? "-" + text : text;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string format_roundtrip(double value) {
  char buf[64];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

std::string CostValue::to_string(bool full) const {
  if (!full) return format_fixed(value_, 4);
  if (exact_) {
    if (auto dec = to_decimal_string(*exact_)) return *dec;
    return exact_->get_str() + " (" + format_roundtrip(value_) + ")";
  }
  return format_roundtrip(value_);
}

bool operator==(const CostValue& a, const CostValue& b) {
  if (a.exact_ && b.exact_) return *a.exact_ == *b.exact_;
  return a.value_ == b.value_ && a.exact_.has_value() == b.exact_.has_value();
}

bool costs_equal(const CostValue& a, const CostValue& b) {
  if (a.exact() && b.exact()) return *a.exact() == *b.exact();
  return std::fabs(a.value() - b.value()) <= kFloatTolerance;
}

}  // namespace groupt
