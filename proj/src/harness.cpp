#include "groupt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "groupt/errors.hpp"
#include "groupt/gpta.hpp"
#include "groupt/nested_dp.hpp"
#include "groupt/oracle.hpp"

namespace groupt {
namespace {

constexpr double kGrid = 1e6;
constexpr double kRecheckLow = 1e-12;
constexpr double kRecheckHigh = 1e-6;

struct InstanceSpec {
  bool injected = false;
  std::size_t n = 0;
  std::size_t trial = 0;
  std::size_t injected_index = 0;
};

template <class T>
struct Evaluation {
  T gpta_sorted;
  T dp_sorted;
  T gap;
  std::optional<T> oracle;
  std::optional<T> best_gpta;
  std::optional<T> adaptive;
  std::optional<T> two_unit;
  std::optional<std::size_t> first_moves;
  std::optional<std::size_t> order_count;
  std::optional<bool> unique;
};

template <class T>
Evaluation<T> evaluate(Conjecture conjecture, const Population& pop) {
  const Population sorted = sort_by_q_descending(pop);
  Evaluation<T> ev;
  ev.gpta_sorted = gpta_cost<T>(sorted);
  ev.dp_sorted = FixedOrderDp<T>(sorted).cost();
  if (conjecture == Conjecture::kOne) {
    ev.gap = ScalarTraits<T>::abs(ev.dp_sorted - ev.gpta_sorted);
    return ev;
  }
  OracleOptions options;
  options.certify_uniqueness = ScalarTraits<T>::kMode == NumericMode::kExact;
  OracleResult<T> oracle = optimal_nested<T>(pop, options);
  OrderSearchResult<T> best = best_gpta_order<T>(pop);
  ev.oracle = oracle.cost;
  ev.best_gpta = best.cost;
  ev.adaptive = adaptive_pairing_gpta<T>(pop);
  ev.first_moves = oracle.optimal_first_moves;
  ev.order_count = best.optimal_order_count;
  ev.unique = oracle.unique_up_to_equivalent_items;
  if (pop.size() == 2) ev.two_unit = two_unit_optimal<T>(sorted.q<T>(0), sorted.q<T>(1)).cost;
  ev.gap = ScalarTraits<T>::abs(oracle.cost - best.cost);
  return ev;
}

template <class T>
std::optional<double> opt_double(const std::optional<T>& v) {
  if (!v) return std::nullopt;
  return to_double(*v);
}

template <class T>
void fill(InstanceRecord& rec, const Evaluation<T>& ev) {
  rec.gpta_sorted = to_double(ev.gpta_sorted);
  rec.dp_sorted = to_double(ev.dp_sorted);
  rec.oracle = opt_double(ev.oracle);
  rec.best_gpta = opt_double(ev.best_gpta);
  rec.adaptive_gpta = opt_double(ev.adaptive);
  rec.two_unit = opt_double(ev.two_unit);
  rec.optimal_first_moves = ev.first_moves;
  rec.optimal_order_count = ev.order_count;
  rec.unique_up_to_equivalent_items = ev.unique;
  rec.gap = to_double(ev.gap);
}

std::size_t exact_limit(Conjecture conjecture) {
  return conjecture == Conjecture::kOne ? kExactRecheckLimit : kConjecture2Limit;
}

std::vector<InstanceSpec> plan_instances(const CampaignConfig& config) {
  std::vector<InstanceSpec> specs;
  for (std::size_t k = 0; k < config.injected.size(); ++k) {
    specs.push_back({true, config.injected[k].size(), k, k});
  }
  const std::size_t m = config.n_values.size();
  if (config.total_instances) {
    for (std::size_t k = 0; k < *config.total_instances; ++k) {
      specs.push_back({false, config.n_values[k % m], k / m, 0});
    }
  } else {
    for (std::size_t n : config.n_values) {
      for (std::size_t t = 0; t < config.trials_per_n; ++t) specs.push_back({false, n, t, 0});
    }
  }
  return specs;
}

InstanceRecord run_instance(const CampaignConfig& config, const InstanceSpec& spec) {
  Population pop;
  if (spec.injected) {
    pop = config.injected[spec.injected_index];
  } else {
    SplitMix64 rng(derive_seed(config.seed, spec.n, spec.trial));
    pop = sample_population(spec.n, config.p_lo, config.p_hi, rng);
  }
  InstanceRecord rec = evaluate_instance(config.conjecture, pop, config.mode, config.tolerance);
  rec.injected = spec.injected;
  rec.trial = spec.trial;
  return rec;
}

CampaignReport run(const CampaignConfig& config) {
  config.validate();
  const std::vector<InstanceSpec> specs = plan_instances(config);
  CampaignReport report;
  report.config = config;
  report.records.resize(specs.size());

  // Records land in their planned slot, so the report does not depend on
  // which worker ran which instance.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < specs.size(); k = next++) {
      report.records[k] = run_instance(config, specs[k]);
    }
  };
  const unsigned workers = std::max(1U, std::min<unsigned>(config.threads, static_cast<unsigned>(specs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  report.summary.instances = report.records.size();
  for (const InstanceRecord& rec : report.records) {
    report.summary.max_gap = std::max(report.summary.max_gap, rec.gap);
    if (!rec.pass) ++report.summary.counterexamples;
  }
  return report;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string csv_field(const std::optional<double>& v) { return v ? format_roundtrip(*v) : ""; }

std::vector<std::string> p_literals(const Population& pop) {
  std::vector<std::string> out;
  for (const Unit& u : pop) {
    auto dec = to_decimal_string(u.p_exact);
    out.push_back(dec ? *dec : format_roundtrip(u.p));
  }
  return out;
}

}  // namespace

void CampaignConfig::validate() const {
  if (!(p_lo > 0.0 && p_lo <= p_hi && p_hi < 1.0)) {
    throw ValidationError("p range must satisfy 0 < lo <= hi < 1");
  }
  if (n_values.empty() && injected.empty()) throw ValidationError("no population sizes given");
  for (std::size_t n : n_values) {
    if (n < 1) throw ValidationError("population sizes must be >= 1");
  }
  if (trials_per_n < 1) throw ValidationError("trials must be >= 1");
  if (total_instances && n_values.empty()) throw ValidationError("total_instances needs n_values");
  if (!(tolerance >= 0.0)) throw ValidationError("tolerance must be >= 0");
  if (conjecture == Conjecture::kTwo) {
    std::size_t largest = 0;
    for (std::size_t n : n_values) largest = std::max(largest, n);
    for (const Population& pop : injected) largest = std::max(largest, pop.size());
    if (largest > kConjecture2Limit) {
      throw ValidationError("conjecture 2 campaigns require n <= " + std::to_string(kConjecture2Limit));
    }
  }
}

Population sample_population(std::size_t n, double lo, double hi, SplitMix64& rng) {
  if (!(lo > 0.0 && lo <= hi && hi < 1.0)) throw ValidationError("invalid sampling interval");
  const auto grid_lo = static_cast<long long>(std::ceil(lo * kGrid - 1e-9));
  const auto grid_hi = static_cast<long long>(std::floor(hi * kGrid + 1e-9));
  if (grid_lo > grid_hi || grid_lo < 1 || grid_hi >= static_cast<long long>(kGrid)) {
    throw ValidationError("sampling interval contains no point of the 1e-6 grid inside (0,1)");
  }
  std::string text;
  for (std::size_t i = 0; i < n; ++i) {
    const double draw = lo + rng.uniform01() * (hi - lo);
    const long long k = std::clamp(std::llround(draw * kGrid), grid_lo, grid_hi);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s0.%06lld", i ? "," : "", k);
    text += buf;
  }
  return parse_population(text, ValueKind::kP);
}

InstanceRecord evaluate_instance(Conjecture conjecture, const Population& pop, NumericMode mode,
                                 double tolerance) {
  InstanceRecord rec;
  rec.n = pop.size();
  rec.population = pop;
  if (mode == NumericMode::kExact) {
    const Evaluation<Rational> ev = evaluate<Rational>(conjecture, pop);
    fill(rec, ev);
    rec.exact_gap = ev.gap.get_str();
    rec.pass = ev.gap == 0;
    return rec;
  }
  const Evaluation<double> ev = evaluate<double>(conjecture, pop);
  fill(rec, ev);
  rec.pass = rec.gap <= tolerance;
  if (rec.gap >= kRecheckLow && rec.gap <= kRecheckHigh && pop.size() <= exact_limit(conjecture)) {
    const Evaluation<Rational> exact = evaluate<Rational>(conjecture, pop);
    rec.exact_recheck = true;
    rec.exact_gap = exact.gap.get_str();
    rec.gap = exact.gap.get_d();
    rec.pass = exact.gap == 0;
  }
  return rec;
}

CampaignReport run_conjecture1(const CampaignConfig& config) {
  if (config.conjecture != Conjecture::kOne) throw ValidationError("run_conjecture1 needs a C1 config");
  return run(config);
}

CampaignReport run_conjecture2(const CampaignConfig& config) {
  if (config.conjecture != Conjecture::kTwo) throw ValidationError("run_conjecture2 needs a C2 config");
  return run(config);
}

CampaignReport run_campaign(const CampaignConfig& config) { return run(config); }

nlohmann::json report_to_json(const CampaignReport& report) {
  const CampaignConfig& cfg = report.config;
  nlohmann::json config = {
      {"conjecture", static_cast<int>(cfg.conjecture)},
      {"n_values", cfg.n_values},
      {"trials_per_n", cfg.trials_per_n},
      {"total_instances", cfg.total_instances ? nlohmann::json(*cfg.total_instances) : nlohmann::json(nullptr)},
      {"p_range", {cfg.p_lo, cfg.p_hi}},
      {"seed", cfg.seed},
      {"tolerance", cfg.tolerance},
      {"mode", std::string(mode_name(cfg.mode))},
      {"injected", cfg.injected.size()},
  };

  nlohmann::json records = nlohmann::json::array();
  for (const InstanceRecord& rec : report.records) {
    nlohmann::json r = {
        {"source", rec.injected ? "injected" : "sampled"},
        {"n", rec.n},
        {"trial", rec.trial},
        {"p", p_literals(rec.population)},
        {"gpta_sorted_cost", rec.gpta_sorted},
        {"dp_sorted_cost", rec.dp_sorted},
        {"gap", rec.gap},
        {"pass", rec.pass},
    };
    if (report.config.conjecture == Conjecture::kTwo) {
      r["oracle_cost"] = optional_json(rec.oracle);
      r["best_gpta_cost"] = optional_json(rec.best_gpta);
      r["adaptive_pairing_cost"] = optional_json(rec.adaptive_gpta);
      r["sorted_gpta_gap"] = rec.oracle ? nlohmann::json(rec.gpta_sorted - *rec.oracle) : nlohmann::json(nullptr);
      r["optimal_first_moves"] =
          rec.optimal_first_moves ? nlohmann::json(*rec.optimal_first_moves) : nlohmann::json(nullptr);
      r["optimal_order_count"] =
          rec.optimal_order_count ? nlohmann::json(*rec.optimal_order_count) : nlohmann::json(nullptr);
      r["unique_up_to_equivalent_items"] = rec.unique_up_to_equivalent_items
                                               ? nlohmann::json(*rec.unique_up_to_equivalent_items)
                                               : nlohmann::json(nullptr);
      if (rec.two_unit) r["two_unit_optimal_cost"] = *rec.two_unit;
    }
    if (rec.exact_gap) r["exact_gap"] = *rec.exact_gap;
    if (rec.exact_recheck) r["exact_recheck"] = true;
    records.push_back(std::move(r));
  }

  return {
      {"config", config},
      {"summary",
       {{"instances", report.summary.instances},
        {"max_gap", report.summary.max_gap},
        {"counterexamples", report.summary.counterexamples}}},
      {"records", records},
  };
}

std::string report_to_csv(const CampaignReport& report) {
  std::string out =
      "source,n,trial,gpta_sorted_cost,dp_sorted_cost,oracle_cost,best_gpta_cost,adaptive_pairing_cost,gap,pass\n";
  for (const InstanceRecord& rec : report.records) {
    out += rec.injected ? "injected," : "sampled,";
    out += std::to_string(rec.n) + "," + std::to_string(rec.trial) + ",";
    out += format_roundtrip(rec.gpta_sorted) + "," + format_roundtrip(rec.dp_sorted) + ",";
    out += csv_field(rec.oracle) + "," + csv_field(rec.best_gpta) + "," + csv_field(rec.adaptive_gpta) + ",";
    out += format_roundtrip(rec.gap) + (rec.pass ? ",1\n" : ",0\n");
  }
  return out;
}

std::vector<std::pair<Population, double>> counterexamples_from_json(const nlohmann::json& report) {
  std::vector<std::pair<Population, double>> out;
  for (const auto& rec : report.at("records")) {
    if (rec.at("pass").get<bool>()) continue;
    std::string text;
    for (const auto& lit : rec.at("p")) text += lit.get<std::string>() + "\n";
    out.emplace_back(parse_population(text, ValueKind::kP), rec.at("gap").get<double>());
  }
  return out;
}

void write_report_files(const CampaignReport& report, const std::filesystem::path& prefix) {
  namespace fs = std::filesystem;
  if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
  {
    std::ofstream json(prefix.string() + ".json", std::ios::binary);
    json << report_to_json(report).dump(2) << '\n';
  }
  {
    std::ofstream csv(prefix.string() + ".csv", std::ios::binary);
    csv << report_to_csv(report);
  }
  const fs::path dir = prefix.string() + "_counterexamples";
  fs::remove_all(dir);
  if (report.summary.counterexamples == 0) return;
  fs::create_directories(dir);
  for (const InstanceRecord& rec : report.records) {
    if (rec.pass) continue;
    const std::string name = std::string(rec.injected ? "injected" : "sampled") + "_n" +
                             std::to_string(rec.n) + "_t" + std::to_string(rec.trial) + ".txt";
    std::ofstream file(dir / name, std::ios::binary);
    file << "# conjecture " << static_cast<int>(report.config.conjecture) << " counterexample, gap "
         << format_roundtrip(rec.gap) << '\n'
         << write_population(rec.population, ValueKind::kP);
  }
}

}  // namespace groupt
