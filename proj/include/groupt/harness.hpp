#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "groupt/numeric.hpp"
#include "groupt/population.hpp"
#include "groupt/rng.hpp"

namespace groupt {

enum class Conjecture { kOne = 1, kTwo = 2 };

inline constexpr std::size_t kConjecture2Limit = 8;
/// Largest n for which a FLOAT near-miss in a Conjecture-1 campaign is
/// re-checked in exact arithmetic.
inline constexpr std::size_t kExactRecheckLimit = 60;

struct CampaignConfig {
  Conjecture conjecture = Conjecture::kOne;
  std::vector<std::size_t> n_values;
  std::size_t trials_per_n = 20;
  /// When set, instance k uses n_values[k % |n_values|] and trial k / |n_values|.
  std::optional<std::size_t> total_instances;
  double p_lo = RRange::kLo;
  double p_hi = RRange::kHi;
  std::uint64_t seed = 0;
  double tolerance = kFloatTolerance;
  NumericMode mode = NumericMode::kFloat;
  /// Worker count. Never changes report content.
  unsigned threads = 1;
  /// Evaluated before the sampled instances.
  std::vector<Population> injected;

  /// Throws ValidationError.
  void validate() const;
};

struct InstanceRecord {
  bool injected = false;
  std::size_t n = 0;
  std::size_t trial = 0;
  Population population;
  double gpta_sorted = 0.0;
  double dp_sorted = 0.0;
  std::optional<double> oracle;
  std::optional<double> best_gpta;
  std::optional<double> adaptive_gpta;
  std::optional<double> two_unit;
  std::optional<std::size_t> optimal_first_moves;
  std::optional<std::size_t> optimal_order_count;
  std::optional<bool> unique_up_to_equivalent_items;
  /// |dp_sorted - gpta_sorted| (C1) or |oracle - best_gpta| (C2).
  double gap = 0.0;
  /// Exact gap as a fraction when computed in exact arithmetic.
  std::optional<std::string> exact_gap;
  bool exact_recheck = false;
  bool pass = true;
};

struct CampaignSummary {
  std::size_t instances = 0;
  double max_gap = 0.0;
  std::size_t counterexamples = 0;
};

struct CampaignReport {
  CampaignConfig config;
  std::vector<InstanceRecord> records;
  CampaignSummary summary;
};

/// n uniform draws of p from [lo, hi] on a 1e-6 decimal grid.
Population sample_population(std::size_t n, double lo, double hi, SplitMix64& rng);

/// Evaluates one population against a conjecture.
InstanceRecord evaluate_instance(Conjecture conjecture, const Population& pop, NumericMode mode,
                                 double tolerance);

CampaignReport run_conjecture1(const CampaignConfig& config);
CampaignReport run_conjecture2(const CampaignConfig& config);
CampaignReport run_campaign(const CampaignConfig& config);

nlohmann::json report_to_json(const CampaignReport& report);
std::string report_to_csv(const CampaignReport& report);

/// Populations and recorded gaps of the failing records in a JSON report.
std::vector<std::pair<Population, double>> counterexamples_from_json(const nlohmann::json& report);

/// Writes <prefix>.json, <prefix>.csv and, for each counterexample, a
/// population file under <prefix>_counterexamples/.
void write_report_files(const CampaignReport& report, const std::filesystem::path& prefix);

}  // namespace groupt
