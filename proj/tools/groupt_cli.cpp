#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "groupt/dorfman.hpp"
#include "groupt/errors.hpp"
#include "groupt/example_orders.hpp"
#include "groupt/gpta.hpp"
#include "groupt/harness.hpp"
#include "groupt/nested_dp.hpp"
#include "groupt/oracle.hpp"

using namespace groupt;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCounterexamples = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSizeLimit = 3;

/// Largest expanded policy the CLI will print.
constexpr std::size_t kPolicyPrintLimit = 100000;

struct PopulationSource {
  std::string q;
  std::string p;
  std::string file;
  std::string values = "p";

  Population load() const {
    const int given = !q.empty() + !p.empty() + !file.empty();
    if (given != 1) throw ValidationError("give exactly one of --q, --p, --file");
    if (!q.empty()) return parse_population(q, ValueKind::kQ);
    if (!p.empty()) return parse_population(p, ValueKind::kP);
    return read_population_file(file, values == "q" ? ValueKind::kQ : ValueKind::kP);
  }
};

struct OutputOptions {
  std::string format = "text";
  bool full_precision = false;
};

NumericMode default_mode() {
  const char* env = std::getenv("GT_MODE");
  return env && *env ? parse_mode(env) : NumericMode::kFloat;
}

void add_population_options(CLI::App* cmd, PopulationSource& src) {
  auto* q = cmd->add_option("--q", src.q, "comma-separated q values (probability good)");
  auto* p = cmd->add_option("--p", src.p, "comma-separated p values (probability defective)");
  auto* f = cmd->add_option("--file", src.file, "population file");
  q->excludes(p)->excludes(f);
  p->excludes(f);
  cmd->add_option("--values", src.values, "meaning of bare values in --file")
      ->check(CLI::IsMember({"p", "q"}));
}

void add_output_options(CLI::App* cmd, OutputOptions& out) {
  cmd->add_option("--format", out.format, "output format")->check(CLI::IsMember({"text", "json", "csv"}));
  cmd->add_flag("--full-precision", out.full_precision, "print costs at full precision");
}

void add_mode_option(CLI::App* cmd, std::string& mode) {
  cmd->add_option("--mode", mode, "numeric mode (default: $GT_MODE or float)")
      ->check(CLI::IsMember({"float", "exact"}));
}

NumericMode resolve_mode(const std::string& flag) { return flag.empty() ? default_mode() : parse_mode(flag); }

std::string checked_policy(const PolicyTree& policy) {
  if (policy.expanded_size(kPolicyPrintLimit + 1) > kPolicyPrintLimit) {
    throw SizeLimitError("policy expands to more than " + std::to_string(kPolicyPrintLimit) +
                         " tests; rerun without --policy");
  }
  return policy.serialize();
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string ids_text(const Population& pop, IndexRange range) {
  std::string out = "{";
  for (std::size_t i = range.start; i <= range.end; ++i) {
    if (i > range.start) out += ',';
    out += std::to_string(pop[i - 1].id);
  }
  return out + "}";
}

// ---------------------------------------------------------------- table1

int cmd_table1(const OutputOptions& out) {
  const int decimals = out.full_precision ? 17 : 4;
  auto render = [&](double v) { return out.full_precision ? format_roundtrip(v) : format_fixed(v, decimals); };

  ordered_json rows = ordered_json::array();
  std::string text = "row  order                 E_P     E_Ne\n";
  std::string csv = "row,order,e_p,e_ne\n";
  for (std::size_t r = 0; r < kExampleOrders.size(); ++r) {
    const Population order = parse_population(kExampleOrders[r], ValueKind::kQ);
    const double e_p = gpta_cost<double>(order);
    const double e_ne = fixed_order_optimal<double>(order).cost;
    const std::string order_text(kExampleOrders[r]);
    char line[128];
    std::snprintf(line, sizeof line, "%-4zu %-21s %s  %s\n", r + 1, order_text.c_str(), render(e_p).c_str(),
                  render(e_ne).c_str());
    text += line;
    csv += std::to_string(r + 1) + "," + csv_escape(order_text) + "," + render(e_p) + "," + render(e_ne) + "\n";
    rows.push_back({{"row", r + 1}, {"order", order_text}, {"e_p", render(e_p)}, {"e_ne", render(e_ne)}});
  }
  if (out.format == "json") {
    std::cout << ordered_json{{"rows", rows}}.dump(2) << '\n';
  } else if (out.format == "csv") {
    std::cout << csv;
  } else {
    std::cout << text;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
  std::string engine;
  PopulationSource source;
  OutputOptions out;
  std::string mode;
  bool policy = false;
};

struct EvalResult {
  CostValue cost;
  std::optional<PolicyTree> policy;
  std::optional<std::size_t> root_moves;
  std::optional<DorfmanPlan<double>> plan;
  std::vector<CostValue> group_costs;
};

template <class T>
EvalResult evaluate(const EvalOptions& opt, const Population& pop) {
  EvalResult r;
  if (opt.engine == "gpta") {
    r.cost = to_cost_value(gpta_cost<T>(pop));
    if (opt.policy) r.policy = gpta_policy(pop);
  } else if (opt.engine == "dp") {
    FixedOrderResult<T> dp = fixed_order_optimal<T>(pop);
    r.cost = to_cost_value(dp.cost);
    if (opt.policy) r.policy = dp.policy;
  } else if (opt.engine == "oracle") {
    OracleResult<T> oracle = optimal_nested<T>(pop);
    r.cost = to_cost_value(oracle.cost);
    r.root_moves = oracle.optimal_first_moves;
    r.policy = oracle.policy;
  } else {
    DorfmanPlan<T> plan = optimal_ordered_partition<T>(pop);
    r.cost = to_cost_value(plan.cost);
    DorfmanPlan<double> shape{plan.sorted, plan.groups, {}, to_double(plan.cost)};
    for (const T& c : plan.group_costs) {
      shape.group_costs.push_back(to_double(c));
      r.group_costs.push_back(to_cost_value(c));
    }
    r.plan = std::move(shape);
  }
  return r;
}

int cmd_eval(const EvalOptions& opt) {
  const Population pop = opt.source.load();
  const NumericMode mode = resolve_mode(opt.mode);
  const EvalResult r = mode == NumericMode::kExact ? evaluate<Rational>(opt, pop) : evaluate<double>(opt, pop);
  const bool full = opt.out.full_precision;
  const bool show_policy = r.policy && (opt.policy || opt.out.format == "json");
  const std::string policy_text = show_policy ? checked_policy(*r.policy) : std::string();

  if (opt.out.format == "json") {
    ordered_json j{{"engine", opt.engine}, {"n", pop.size()}, {"mode", std::string(mode_name(mode))},
                   {"cost", r.cost.value()}, {"cost_text", r.cost.to_string(full)}};
    if (r.cost.exact()) j["cost_exact"] = r.cost.exact()->get_str();
    if (r.root_moves) j["root_moves"] = *r.root_moves;
    if (show_policy) j["policy"] = policy_text;
    if (r.plan) {
      ordered_json groups = ordered_json::array();
      for (std::size_t g = 0; g < r.plan->groups.size(); ++g) {
        const IndexRange range = r.plan->groups[g];
        std::vector<int> ids;
        for (std::size_t i = range.start; i <= range.end; ++i) ids.push_back(r.plan->sorted[i - 1].id);
        groups.push_back({{"range", {range.start, range.end}},
                          {"ids", ids},
                          {"cost", r.group_costs[g].value()},
                          {"cost_text", r.group_costs[g].to_string(full)}});
      }
      j["partition"] = groups;
    }
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }

  if (opt.out.format == "csv") {
    std::cout << "engine,n,mode,cost" << (show_policy ? ",policy" : "") << '\n';
    std::cout << opt.engine << ',' << pop.size() << ',' << mode_name(mode) << ',' << csv_escape(r.cost.to_string(full));
    if (show_policy) std::cout << ',' << csv_escape(policy_text);
    std::cout << '\n';
    if (r.plan) {
      std::cout << "group,start,end,ids,cost\n";
      for (std::size_t g = 0; g < r.plan->groups.size(); ++g) {
        const IndexRange range = r.plan->groups[g];
        std::cout << g + 1 << ',' << range.start << ',' << range.end << ','
                  << csv_escape(ids_text(r.plan->sorted, range)) << ',' << csv_escape(r.group_costs[g].to_string(full))
                  << '\n';
      }
    }
    return kExitOk;
  }

  std::cout << r.cost.to_string(full) << '\n';
  if (r.root_moves) std::cout << "optimal root tests: " << *r.root_moves << '\n';
  if (r.plan) {
    for (std::size_t g = 0; g < r.plan->groups.size(); ++g) {
      std::cout << "group " << ids_text(r.plan->sorted, r.plan->groups[g]) << " cost "
                << r.group_costs[g].to_string(full) << '\n';
    }
  }
  if (show_policy) std::cout << policy_text << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- search

int cmd_search(const PopulationSource& source, const std::string& mode_flag, const OutputOptions& out) {
  const Population pop = source.load();
  const NumericMode mode = resolve_mode(mode_flag);
  auto run = [&]<class T>(T) {
    const OrderSearchResult<T> gpta = best_gpta_order<T>(pop);
    const OrderSearchResult<T> dp = best_fixed_order<T>(pop);
    return std::pair{std::tuple{write_population(gpta.order, ValueKind::kQ), to_cost_value(gpta.cost),
                                gpta.optimal_order_count},
                     std::tuple{write_population(dp.order, ValueKind::kQ), to_cost_value(dp.cost),
                                dp.optimal_order_count}};
  };
  const auto [gpta, dp] = mode == NumericMode::kExact ? run(Rational(0)) : run(0.0);
  auto order_line = [](std::string text) {
    text.erase(0, text.find('\n') + 1);  // drop the kind header
    for (char& c : text) c = c == '\n' ? ',' : c;
    if (!text.empty()) text.pop_back();
    return text;
  };
  const auto& [gpta_order, gpta_cost_v, gpta_count] = gpta;
  const auto& [dp_order, dp_cost_v, dp_count] = dp;
  if (out.format == "json") {
    ordered_json j{{"n", pop.size()},
                   {"mode", std::string(mode_name(mode))},
                   {"best_gpta", {{"order_q", order_line(gpta_order)}, {"cost", gpta_cost_v.value()},
                                  {"cost_text", gpta_cost_v.to_string(out.full_precision)},
                                  {"optimal_orders", gpta_count}}},
                   {"best_fixed_order", {{"order_q", order_line(dp_order)}, {"cost", dp_cost_v.value()},
                                         {"cost_text", dp_cost_v.to_string(out.full_precision)},
                                         {"optimal_orders", dp_count}}}};
    std::cout << j.dump(2) << '\n';
  } else if (out.format == "csv") {
    std::cout << "procedure,order_q,cost,optimal_orders\n";
    std::cout << "gpta," << csv_escape(order_line(gpta_order)) << ',' << gpta_cost_v.to_string(out.full_precision)
              << ',' << gpta_count << '\n';
    std::cout << "fixed_order_dp," << csv_escape(order_line(dp_order)) << ','
              << dp_cost_v.to_string(out.full_precision) << ',' << dp_count << '\n';
  } else {
    std::cout << "best GPTA order      " << order_line(gpta_order) << "  cost "
              << gpta_cost_v.to_string(out.full_precision) << "  (" << gpta_count << " optimal)\n";
    std::cout << "best fixed-order DP  " << order_line(dp_order) << "  cost "
              << dp_cost_v.to_string(out.full_precision) << "  (" << dp_count << " optimal)\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- trace / simulate

int cmd_trace(const PopulationSource& source, const std::string& defects_text) {
  const Population pop = source.load();
  DefectVector defects;
  for (char c : defects_text) {
    if (c == ',' || c == ' ') continue;
    if (c != '0' && c != '1') throw ValidationError("--defects takes a string of 0 and 1");
    defects.push_back(c == '1');
  }
  const Execution run = gpta_execute(pop, defects);
  for (const TestEvent& e : run.trace) std::cout << e.to_string() << '\n';
  std::cout << "tests used: " << run.tests_used << '\n';
  return kExitOk;
}

int cmd_simulate(const PopulationSource& source, std::uint64_t trials, std::uint64_t seed, const OutputOptions& out) {
  const Population pop = source.load();
  const MonteCarloEstimate est = gpta_monte_carlo(pop, trials, seed);
  const double exact = gpta_cost<double>(pop);
  auto render = [&](double v) { return out.full_precision ? format_roundtrip(v) : format_fixed(v, 4); };
  if (out.format == "json") {
    ordered_json j{{"trials", trials},       {"seed", seed}, {"mean", est.mean}, {"standard_error", est.standard_error},
                   {"expected_cost", exact}};
    std::cout << j.dump(2) << '\n';
  } else if (out.format == "csv") {
    std::cout << "trials,seed,mean,standard_error,expected_cost\n"
              << trials << ',' << seed << ',' << render(est.mean) << ',' << format_roundtrip(est.standard_error) << ','
              << render(exact) << '\n';
  } else {
    std::cout << "mean " << render(est.mean) << " +/- " << format_roundtrip(est.standard_error) << " over " << trials
              << " trials (expected " << render(exact) << ")\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
  int conjecture = 1;
  std::string n_spec;
  std::size_t trials = 20;
  std::optional<std::size_t> instances;
  std::string range;
  std::uint64_t seed = 1;
  std::string mode;
  unsigned threads = 1;
  std::string out;
  double tolerance = kFloatTolerance;
  std::vector<std::string> inject_q;
  std::vector<std::string> inject_p;
  std::vector<std::string> inject_files;
};

std::size_t parse_size(const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw ValidationError("--n: '" + text + "' is not a positive integer");
  }
  return static_cast<std::size_t>(v);
}

/// "2..50", "3,5,8" or a mix such as "2..4,10".
std::vector<std::size_t> parse_n_values(const std::string& spec) {
  std::vector<std::size_t> values;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t comma = spec.find(',', start);
    if (comma == std::string::npos) comma = spec.size();
    const std::string item = spec.substr(start, comma - start);
    const std::size_t dots = item.find("..");
    if (dots == std::string::npos) {
      values.push_back(parse_size(item));
    } else {
      const std::size_t lo = parse_size(item.substr(0, dots));
      const std::size_t hi = parse_size(item.substr(dots + 2));
      if (lo > hi) throw ValidationError("--n: empty range '" + item + "'");
      for (std::size_t n = lo; n <= hi; ++n) values.push_back(n);
    }
    start = comma + 1;
  }
  return values;
}

std::pair<double, double> parse_range(const std::string& text) {
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos) throw ValidationError("--range takes lo,hi");
  char* end = nullptr;
  const std::string lo_text = text.substr(0, comma);
  const std::string hi_text = text.substr(comma + 1);
  const double lo = std::strtod(lo_text.c_str(), &end);
  if (lo_text.empty() || *end != '\0') throw ValidationError("--range: bad lower bound '" + lo_text + "'");
  const double hi = std::strtod(hi_text.c_str(), &end);
  if (hi_text.empty() || *end != '\0') throw ValidationError("--range: bad upper bound '" + hi_text + "'");
  return {lo, hi};
}

int cmd_verify(const VerifyOptions& opt) {
  CampaignConfig config;
  config.conjecture = opt.conjecture == 1 ? Conjecture::kOne : Conjecture::kTwo;
  if (!opt.n_spec.empty()) config.n_values = parse_n_values(opt.n_spec);
  config.trials_per_n = opt.trials;
  config.total_instances = opt.instances;
  if (!opt.range.empty()) std::tie(config.p_lo, config.p_hi) = parse_range(opt.range);
  config.seed = opt.seed;
  config.mode = resolve_mode(opt.mode);
  config.threads = opt.threads;
  config.tolerance = opt.tolerance;
  for (const std::string& q : opt.inject_q) config.injected.push_back(parse_population(q, ValueKind::kQ));
  for (const std::string& p : opt.inject_p) config.injected.push_back(parse_population(p, ValueKind::kP));
  for (const std::string& f : opt.inject_files) config.injected.push_back(read_population_file(f, ValueKind::kP));

  const CampaignReport report = run_campaign(config);
  const std::string prefix = opt.out.empty() ? "groupt_verify" + std::to_string(opt.conjecture) : opt.out;
  write_report_files(report, prefix);

  std::cout << "conjecture " << opt.conjecture << ": " << report.summary.instances << " instances, "
            << report.summary.counterexamples << " counterexamples, max gap " << format_roundtrip(report.summary.max_gap)
            << '\n';
  for (const InstanceRecord& rec : report.records) {
    if (rec.pass) continue;
    std::cout << "  counterexample " << (rec.injected ? "injected" : "sampled") << " n=" << rec.n
              << " trial=" << rec.trial << " gap " << format_roundtrip(rec.gap) << '\n';
  }
  std::cout << "wrote " << prefix << ".json, " << prefix << ".csv\n";
  return report.summary.counterexamples == 0 ? kExitOk : kExitCounterexamples;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested group testing: GPTA, fixed-order DP, exhaustive oracles and conjecture campaigns"};
  app.require_subcommand(1);

  OutputOptions table_out;
  auto* table1 = app.add_subcommand("table1", "expected costs of all 12 orders of {0.68,0.65,0.62,0.62}");
  add_output_options(table1, table_out);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "expected cost of one engine on one population");
  eval_cmd->add_option("engine", eval.engine, "gpta | dp | oracle | dorfman")
      ->required()
      ->check(CLI::IsMember({"gpta", "dp", "oracle", "dorfman"}));
  add_population_options(eval_cmd, eval.source);
  add_mode_option(eval_cmd, eval.mode);
  add_output_options(eval_cmd, eval.out);
  eval_cmd->add_flag("--policy", eval.policy, "print the serialized policy tree");

  PopulationSource search_src;
  std::string search_mode;
  OutputOptions search_out;
  auto* search = app.add_subcommand("search", "best GPTA order and best fixed order over all permutations");
  add_population_options(search, search_src);
  add_mode_option(search, search_mode);
  add_output_options(search, search_out);

  PopulationSource trace_src;
  std::string defects;
  auto* trace = app.add_subcommand("trace", "run GPTA on a known defect vector and print every test");
  add_population_options(trace, trace_src);
  trace->add_option("--defects", defects, "0/1 per unit, 1 = defective")->required();

  PopulationSource sim_src;
  std::uint64_t sim_trials = 100000;
  std::uint64_t sim_seed = 1;
  OutputOptions sim_out;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo estimate of the GPTA expected cost");
  add_population_options(simulate, sim_src);
  simulate->add_option("--trials", sim_trials, "number of simulated runs");
  simulate->add_option("--seed", sim_seed, "random seed");
  add_output_options(simulate, sim_out);

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "randomized campaign for conjecture 1 or 2");
  verify_cmd->add_option("conjecture", verify.conjecture, "1 or 2")->required()->check(CLI::IsMember({1, 2}));
  verify_cmd->add_option("--n", verify.n_spec, "sizes: 2..50, 3,5,8 or a mix");
  verify_cmd->add_option("--trials", verify.trials, "instances per size");
  verify_cmd->add_option("--instances", verify.instances, "total instances, spread round-robin over the sizes");
  verify_cmd->add_option("--range", verify.range, "p sampling interval lo,hi (default: the R-range)");
  verify_cmd->add_option("--seed", verify.seed, "campaign seed");
  add_mode_option(verify_cmd, verify.mode);
  verify_cmd->add_option("--threads", verify.threads, "worker threads (does not change output)")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--out", verify.out, "report prefix (writes PREFIX.json, PREFIX.csv)");
  verify_cmd->add_option("--tolerance", verify.tolerance, "float-mode gap tolerance");
  verify_cmd->add_option("--inject-q", verify.inject_q, "extra population given as q values")->take_all();
  verify_cmd->add_option("--inject-p", verify.inject_p, "extra population given as p values")->take_all();
  verify_cmd->add_option("--inject-file", verify.inject_files, "extra population file")->take_all();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*table1) return cmd_table1(table_out);
    if (*eval_cmd) return cmd_eval(eval);
    if (*search) return cmd_search(search_src, search_mode, search_out);
    if (*trace) return cmd_trace(trace_src, defects);
    if (*simulate) return cmd_simulate(sim_src, sim_trials, sim_seed, sim_out);
    if (*verify_cmd) return cmd_verify(verify);
  } catch (const SizeLimitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSizeLimit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
