#include "groupt/population.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "groupt/errors.hpp"

namespace groupt {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Exact value of a decimal literal: [+-]digits[.digits][(e|E)[+-]digits].
bool parse_decimal(std::string_view lit, Rational& out) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < lit.size() && (lit[pos] == '+' || lit[pos] == '-')) negative = lit[pos++] == '-';
  std::string digits;
  int frac_len = 0;
  bool any_digit = false;
  while (pos < lit.size() && std::isdigit(static_cast<unsigned char>(lit[pos]))) {
    digits += lit[pos++];
    any_digit = true;
  }
  if (pos < lit.size() && lit[pos] == '.') {
    ++pos;
    while (pos < lit.size() && std::isdigit(static_cast<unsigned char>(lit[pos]))) {
      digits += lit[pos++];
      ++frac_len;
      any_digit = true;
    }
  }
  if (!any_digit) return false;
  long exponent = 0;
  if (pos < lit.size() && (lit[pos] == 'e' || lit[pos] == 'E')) {
    ++pos;
    bool exp_negative = false;
    if (pos < lit.size() && (lit[pos] == '+' || lit[pos] == '-')) exp_negative = lit[pos++] == '-';
    if (pos >= lit.size() || !std::isdigit(static_cast<unsigned char>(lit[pos]))) return false;
    while (pos < lit.size() && std::isdigit(static_cast<unsigned char>(lit[pos]))) {
      exponent = exponent * 10 + (lit[pos++] - '0');
      if (exponent > 400) return false;
    }
    if (exp_negative) exponent = -exponent;
  }
  if (pos != lit.size()) return false;

  mpz_class num(digits, 10);
  if (negative) num = -num;
  const long scale = exponent - frac_len;
  mpz_class power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  out = scale < 0 ? Rational(num, power) : Rational(num * power);
  out.canonicalize();
  return true;
}

Unit make_unit(int id, double value, Rational exact, ValueKind kind) {
  Unit u;
  u.id = id;
  if (kind == ValueKind::kP) {
    u.p = value;
    u.q = 1.0 - value;
    u.p_exact = std::move(exact);
    u.q_exact = 1 - u.p_exact;
  } else {
    u.q = value;
    u.p = 1.0 - value;
    u.q_exact = std::move(exact);
    u.p_exact = 1 - u.q_exact;
  }
  return u;
}

void validate(const std::vector<Unit>& units) {
  std::unordered_set<int> seen;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const Unit& u = units[i];
    if (!(u.p_exact > 0 && u.p_exact < 1) || !(u.p > 0.0 && u.p < 1.0) || !(u.q > 0.0 && u.q < 1.0)) {
      throw ValidationError("unit at index " + std::to_string(i + 1) +
                            ": probability must lie strictly inside (0,1)");
    }
    if (!seen.insert(u.id).second) {
      throw ValidationError("duplicate unit id " + std::to_string(u.id));
    }
  }
}

}  // namespace

Population::Population(std::vector<Unit> units) : units_(std::move(units)) { validate(units_); }

Population Population::from_p(std::span<const double> p_values) {
  std::vector<Unit> units;
  units.reserve(p_values.size());
  int id = 1;
  for (double v : p_values) units.push_back(make_unit(id++, v, Rational(v), ValueKind::kP));
  return Population(std::move(units));
}

Population Population::from_q(std::span<const double> q_values) {
  std::vector<Unit> units;
  units.reserve(q_values.size());
  int id = 1;
  for (double v : q_values) units.push_back(make_unit(id++, v, Rational(v), ValueKind::kQ));
  return Population(std::move(units));
}

std::vector<double> Population::q_values() const {
  std::vector<double> out;
  out.reserve(units_.size());
  for (const Unit& u : units_) out.push_back(u.q);
  return out;
}

Population Population::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != units_.size()) throw ValidationError("permutation length mismatch");
  std::vector<bool> used(units_.size(), false);
  std::vector<Unit> out;
  out.reserve(units_.size());
  for (std::size_t k : perm) {
    if (k >= units_.size() || used[k]) throw ValidationError("not a permutation");
    used[k] = true;
    out.push_back(units_[k]);
  }
  return Population(std::move(out));
}

bool Population::is_permutation_of(const Population& other) const {
  if (size() != other.size()) return false;
  std::vector<int> a;
  std::vector<int> b;
  for (const Unit& u : units_) a.push_back(u.id);
  for (const Unit& u : other.units_) b.push_back(u.id);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

Population parse_population(std::string_view text, ValueKind kind) {
  std::vector<std::string> literals;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    std::string_view body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      body.remove_prefix(1);
      body = trim(body);
      if (body == "kind: p") kind = ValueKind::kP;
      if (body == "kind: q") kind = ValueKind::kQ;
      continue;
    }
    std::size_t start = 0;
    while (start <= body.size()) {
      std::size_t comma = body.find(',', start);
      if (comma == std::string_view::npos) comma = body.size();
      literals.emplace_back(trim(body.substr(start, comma - start)));
      start = comma + 1;
    }
  }
  if (literals.empty()) throw ValidationError("population is empty");

  std::vector<Unit> units;
  units.reserve(literals.size());
  for (std::size_t i = 0; i < literals.size(); ++i) {
    Rational exact;
    if (literals[i].empty() || !parse_decimal(literals[i], exact)) {
      throw ValidationError("index " + std::to_string(i + 1) + ": malformed literal '" + literals[i] + "'");
    }
    if (!(exact > 0 && exact < 1)) {
      throw ValidationError("index " + std::to_string(i + 1) + ": value " + literals[i] +
                            " outside the open interval (0,1)");
    }
    const double value = std::strtod(literals[i].c_str(), nullptr);
    units.push_back(make_unit(static_cast<int>(i) + 1, value, std::move(exact), kind));
  }
  return Population(std::move(units));
}

Population read_population_file(const std::filesystem::path& path, ValueKind kind) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read population file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_population(buf.str(), kind);
}

std::string write_population(const Population& pop, ValueKind kind) {
  std::string out = kind == ValueKind::kP ? "# kind: p\n" : "# kind: q\n";
  for (const Unit& u : pop) {
    const Rational& exact = kind == ValueKind::kP ? u.p_exact : u.q_exact;
    const double value = kind == ValueKind::kP ? u.p : u.q;
    auto dec = to_decimal_string(exact);
    out += (dec && dec->size() <= 24) ? *dec : format_roundtrip(value);
    out += '\n';
  }
  return out;
}

template <class T>
T q_product(const Population& pop, std::size_t i, std::size_t j) {
  if (i < 1 || i > j || j > pop.size()) {
    throw ValidationError("q_product: range [" + std::to_string(i) + "," + std::to_string(j) +
                          "] outside 1.." + std::to_string(pop.size()));
  }
  T prod = pop.q<T>(i - 1);
  for (std::size_t t = i; t < j; ++t) prod *= pop.q<T>(t);
  return prod;
}

template double q_product<double>(const Population&, std::size_t, std::size_t);
template Rational q_product<Rational>(const Population&, std::size_t, std::size_t);

bool r_range_contains(double p) { return RRange::kLo <= p && p <= RRange::kHi; }

Population sort_by_q_descending(const Population& pop) {
  std::vector<Unit> units(pop.begin(), pop.end());
  std::stable_sort(units.begin(), units.end(),
                   [](const Unit& a, const Unit& b) { return a.q_exact > b.q_exact; });
  return Population(std::move(units));
}

}  // namespace groupt
