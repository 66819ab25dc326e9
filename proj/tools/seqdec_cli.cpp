// Command line front end: configure an experiment in JSON, run it, and
// emit CSV tables. Exit codes: 0 success, 2 configuration error, 3 runtime
// error.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "seqdec/csv.hpp"
#include "seqdec/dla.hpp"
#include "seqdec/energy.hpp"
#include "seqdec/errors.hpp"
#include "seqdec/flu.hpp"
#include "seqdec/pomdp.hpp"
#include "seqdec/pomdp_io.hpp"
#include "seqdec/policies.hpp"
#include "seqdec/rls.hpp"
#include "seqdec/simulate.hpp"
#include "seqdec/tuning.hpp"
#include "seqdec/vfa.hpp"

namespace {

using nlohmann::json;
using namespace seqdec;

/// Configuration problems exit with code 2; anything thrown as a library
/// Error after configuration exits with 3.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

constexpr int kSchemaVersion = 1;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config error at " + where + ": " + what);
}

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) fail(where + "/" + key, "unknown key");
  }
}

const json* find(const json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double need_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "must be a number");
  return j.get<double>();
}

int need_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "must be an integer");
  return j.get<int>();
}

bool need_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "must be a boolean");
  return j.get<bool>();
}

std::string need_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "must be a string");
  return j.get<std::string>();
}

std::vector<double> need_number_array(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) fail(where, "must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Problem section

struct ProblemConfig {
  std::string family; // "flu" | "energy"
  FluConfig flu;
  EnergyConfig energy;
};

EnergyVariant energy_variant_from_string(const std::string& s, const std::string& where) {
  if (s == "base") return EnergyVariant::Base;
  if (s == "ar") return EnergyVariant::ArPrice;
  if (s == "passive") return EnergyVariant::PassiveLearning;
  if (s == "active") return EnergyVariant::ActiveLearning;
  if (s == "forecast") return EnergyVariant::RollingForecast;
  fail(where, "unknown energy variant \"" + s + "\" (valid: base, ar, passive, active, forecast)");
}

void parse_flu_params(const json& j, const std::string& where, FluConfig& cfg) {
  static const std::set<std::string> keys = {
      "regions", "mu0", "mu0_regions", "sigma_mu", "drift", "theta_vac", "sigma_w",
      "prior_mean", "prior_precision", "drift_prior_mean", "drift_prior_precision",
      "theta_vac_hat", "c_obs", "c_unc", "c_vac", "c_inv", "inventory0",
      "inventory_rate", "temp0", "temp_mean", "temp_sd", "temp_rho", "hum0", "hum_mean",
      "hum_sd", "hum_rho", "th_mu0", "th_mu_lag", "lag", "th_temp", "th_vac1", "th_vac2",
      "temp_threshold", "use_approx_model", "theta_w", "vac_dose", "vac_grid"};
  check_keys(j, where, keys);
  auto num = [&](const char* k, double& slot) {
    if (const json* v = find(j, k)) slot = need_number(*v, where + "/" + k);
  };
  if (const json* v = find(j, "regions")) cfg.regions = need_int(*v, where + "/regions");
  num("mu0", cfg.mu0);
  if (const json* v = find(j, "mu0_regions"))
    cfg.mu0_regions = need_number_array(*v, where + "/mu0_regions");
  num("sigma_mu", cfg.sigma_mu);
  num("drift", cfg.drift);
  num("theta_vac", cfg.theta_vac);
  num("sigma_w", cfg.sigma_w);
  num("prior_mean", cfg.prior_mean);
  num("prior_precision", cfg.prior_precision);
  num("drift_prior_mean", cfg.drift_prior_mean);
  num("drift_prior_precision", cfg.drift_prior_precision);
  num("theta_vac_hat", cfg.theta_vac_hat);
  num("c_obs", cfg.c_obs);
  num("c_unc", cfg.c_unc);
  num("c_vac", cfg.c_vac);
  num("c_inv", cfg.c_inv);
  num("inventory0", cfg.inventory0);
  num("inventory_rate", cfg.inventory_rate);
  num("temp0", cfg.temp0);
  num("temp_mean", cfg.temp_mean);
  num("temp_sd", cfg.temp_sd);
  num("temp_rho", cfg.temp_rho);
  num("hum0", cfg.hum0);
  num("hum_mean", cfg.hum_mean);
  num("hum_sd", cfg.hum_sd);
  num("hum_rho", cfg.hum_rho);
  num("th_mu0", cfg.th_mu0);
  num("th_mu_lag", cfg.th_mu_lag);
  if (const json* v = find(j, "lag")) cfg.lag = need_int(*v, where + "/lag");
  if (const json* v = find(j, "th_temp")) {
    auto a = need_number_array(*v, where + "/th_temp");
    if (a.size() != 3) fail(where + "/th_temp", "must have 3 entries");
    std::copy(a.begin(), a.end(), cfg.th_temp.begin());
  }
  num("th_vac1", cfg.th_vac1);
  num("th_vac2", cfg.th_vac2);
  num("temp_threshold", cfg.temp_threshold);
  if (const json* v = find(j, "use_approx_model"))
    cfg.use_approx_model = need_bool(*v, where + "/use_approx_model");
  if (const json* v = find(j, "theta_w")) {
    auto a = need_number_array(*v, where + "/theta_w");
    if (a.size() != 3) fail(where + "/theta_w", "must have 3 entries");
    std::copy(a.begin(), a.end(), cfg.theta_w.begin());
  }
  num("vac_dose", cfg.vac_dose);
  if (const json* v = find(j, "vac_grid"))
    cfg.vac_grid = need_number_array(*v, where + "/vac_grid");
}

void parse_energy_params(const json& j, const std::string& where, EnergyConfig& cfg) {
  static const std::set<std::string> keys = {
      "storage0", "storage_max", "efficiency", "price0", "price_mean", "price_sigma",
      "ar", "ar_sigma", "impact", "rls_lambda", "forecast_leads", "forecast_sigma",
      "energy0", "forecast0", "decision_grid"};
  check_keys(j, where, keys);
  auto num = [&](const char* k, double& slot) {
    if (const json* v = find(j, k)) slot = need_number(*v, where + "/" + k);
  };
  num("storage0", cfg.storage0);
  num("storage_max", cfg.storage_max);
  num("efficiency", cfg.efficiency);
  if (const json* v = find(j, "price0")) {
    auto a = need_number_array(*v, where + "/price0");
    if (a.size() != 3) fail(where + "/price0", "must have 3 entries");
    std::copy(a.begin(), a.end(), cfg.price0.begin());
  }
  num("price_mean", cfg.price_mean);
  num("price_sigma", cfg.price_sigma);
  if (const json* v = find(j, "ar")) {
    auto a = need_number_array(*v, where + "/ar");
    if (a.size() != 3) fail(where + "/ar", "must have 3 entries");
    std::copy(a.begin(), a.end(), cfg.ar.begin());
  }
  num("ar_sigma", cfg.ar_sigma);
  num("impact", cfg.impact);
  num("rls_lambda", cfg.rls_lambda);
  if (const json* v = find(j, "forecast_leads"))
    cfg.forecast_leads = need_int(*v, where + "/forecast_leads");
  num("forecast_sigma", cfg.forecast_sigma);
  num("energy0", cfg.energy0);
  if (const json* v = find(j, "forecast0"))
    cfg.forecast0 = need_number_array(*v, where + "/forecast0");
  if (const json* v = find(j, "decision_grid"))
    cfg.decision_grid = need_number_array(*v, where + "/decision_grid");
}

ProblemConfig parse_problem(const json& j) {
  if (!j.is_object()) fail("/problem", "must be an object");
  check_keys(j, "/problem", {"family", "variant", "params"});
  const json* fam = find(j, "family");
  if (!fam) fail("/problem", "missing \"family\"");
  ProblemConfig p;
  p.family = need_string(*fam, "/problem/family");
  if (p.family == "flu") {
    if (const json* v = find(j, "variant"))
      p.flu.variant = need_int(*v, "/problem/variant");
    if (const json* v = find(j, "params")) {
      if (!v->is_object()) fail("/problem/params", "must be an object");
      parse_flu_params(*v, "/problem/params", p.flu);
    }
    try {
      p.flu.validate();
    } catch (const Error& e) {
      fail("/problem", e.what());
    }
  } else if (p.family == "energy") {
    if (const json* v = find(j, "variant"))
      p.energy.variant =
          energy_variant_from_string(need_string(*v, "/problem/variant"), "/problem/variant");
    if (const json* v = find(j, "params")) {
      if (!v->is_object()) fail("/problem/params", "must be an object");
      parse_energy_params(*v, "/problem/params", p.energy);
    }
  } else {
    fail("/problem/family", "unknown family \"" + p.family + "\" (valid: flu, energy)");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Run / tune sections

struct RunConfig {
  int horizon = 0;
  int replications = 1;
  std::uint64_t master_seed = 0;
  std::string trajectory_csv = "trajectory.csv";
  std::string summary_csv = "summary.csv";
};

RunConfig parse_run(const json& j) {
  if (!j.is_object()) fail("/run", "must be an object");
  check_keys(j, "/run",
             {"horizon", "replications", "master_seed", "trajectory_csv", "summary_csv"});
  RunConfig r;
  const json* h = find(j, "horizon");
  if (!h) fail("/run", "missing \"horizon\"");
  r.horizon = need_int(*h, "/run/horizon");
  if (r.horizon < 0) fail("/run/horizon", "must be >= 0");
  if (const json* v = find(j, "replications")) {
    r.replications = need_int(*v, "/run/replications");
    if (r.replications < 1) fail("/run/replications", "must be >= 1");
  }
  if (const json* v = find(j, "master_seed")) {
    if (!v->is_number_unsigned()) fail("/run/master_seed", "must be a nonnegative integer");
    r.master_seed = v->get<std::uint64_t>();
  }
  if (const json* v = find(j, "trajectory_csv"))
    r.trajectory_csv = need_string(*v, "/run/trajectory_csv");
  if (const json* v = find(j, "summary_csv"))
    r.summary_csv = need_string(*v, "/run/summary_csv");
  return r;
}

struct TuneConfig {
  std::string method = "grid"; // "grid" | "random"
  int samples = 0;             // random only
  std::optional<bool> use_truth; // default: truth for the spatial variant
  TuningDomain domain;
  std::string result_csv = "tuning.csv";
};

TuneConfig parse_tune(const json& j) {
  if (!j.is_object()) fail("/tune", "must be an object");
  check_keys(j, "/tune", {"method", "samples", "use_truth", "parameters", "result_csv"});
  TuneConfig t;
  if (const json* v = find(j, "method")) {
    t.method = need_string(*v, "/tune/method");
    if (t.method != "grid" && t.method != "random")
      fail("/tune/method", "must be \"grid\" or \"random\"");
  }
  if (const json* v = find(j, "samples")) {
    t.samples = need_int(*v, "/tune/samples");
    if (t.samples < 1) fail("/tune/samples", "must be >= 1");
  }
  if (t.method == "random" && t.samples < 1)
    fail("/tune", "random search needs \"samples\"");
  if (const json* v = find(j, "use_truth"))
    t.use_truth = need_bool(*v, "/tune/use_truth");
  const json* params = find(j, "parameters");
  if (!params || !params->is_array() || params->empty())
    fail("/tune/parameters", "must be a nonempty array");
  int i = 0;
  for (const auto& pj : *params) {
    const std::string where = "/tune/parameters/" + std::to_string(i++);
    if (!pj.is_object()) fail(where, "must be an object");
    check_keys(pj, where, {"name", "grid", "lo", "hi"});
    TuningParameter p;
    const json* name = find(pj, "name");
    if (!name) fail(where, "missing \"name\"");
    p.name = need_string(*name, where + "/name");
    if (const json* v = find(pj, "grid"))
      p.grid_values = need_number_array(*v, where + "/grid");
    if (const json* v = find(pj, "lo")) p.lo = need_number(*v, where + "/lo");
    if (const json* v = find(pj, "hi")) p.hi = need_number(*v, where + "/hi");
    if (t.method == "grid" && p.grid_values.empty())
      fail(where, "grid search needs nonempty \"grid\"");
    if (t.method == "random" && p.lo > p.hi) fail(where, "needs lo <= hi");
    t.domain.parameters.push_back(std::move(p));
  }
  if (const json* v = find(j, "result_csv"))
    t.result_csv = need_string(*v, "/tune/result_csv");
  return t;
}

// ---------------------------------------------------------------------------
// Policy section

struct ParsedPolicy {
  bool energy_threshold = false;
  double theta_buy = 0.0, theta_sell = 0.0;
  PolicySpec spec; // flu families
};

ParsedPolicy parse_policy(const json& j, const std::string& where,
                          const std::string& family) {
  if (!j.is_object()) fail(where, "must be an object");
  ParsedPolicy p;
  if (family == "energy") {
    check_keys(j, where, {"tag", "params"});
    const json* tag = find(j, "tag");
    if (!tag || need_string(*tag, where + "/tag") != "Energy-Threshold")
      fail(where + "/tag", "energy runs use tag \"Energy-Threshold\"");
    const json* params = find(j, "params");
    if (!params || !params->is_object())
      fail(where + "/params", "must be an object with theta_buy and theta_sell");
    check_keys(*params, where + "/params", {"theta_buy", "theta_sell"});
    const json* buy = find(*params, "theta_buy");
    const json* sell = find(*params, "theta_sell");
    if (!buy || !sell) fail(where + "/params", "needs theta_buy and theta_sell");
    p.energy_threshold = true;
    p.theta_buy = need_number(*buy, where + "/params/theta_buy");
    p.theta_sell = need_number(*sell, where + "/params/theta_sell");
    return p;
  }
  try {
    p.spec = policy_spec_from_json(j.dump());
  } catch (const Error& e) {
    fail(where, e.what());
  }
  return p;
}

// ---------------------------------------------------------------------------
// Output plumbing

std::filesystem::path resolve_out(const std::filesystem::path& out_dir,
                                  const std::string& name) {
  std::filesystem::path p(name);
  if (p.is_absolute()) return p;
  return out_dir / p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
}

std::string trajectory_csv_text(const Trajectory& traj) {
  std::vector<std::string> header = {"t"};
  header.insert(header.end(), traj.state_fields.begin(), traj.state_fields.end());
  header.insert(header.end(), traj.decision_fields.begin(), traj.decision_fields.end());
  header.push_back("contribution");
  CsvWriter csv(std::move(header));
  for (const auto& rec : traj.records) {
    std::vector<std::string> row;
    row.push_back(std::to_string(rec.t));
    for (double v : rec.state) row.push_back(format_double(v));
    for (double v : rec.decision) row.push_back(format_double(v));
    row.push_back(format_double(rec.contribution));
    csv.add_row(std::move(row));
  }
  return csv.str();
}

std::string summary_csv_text(const std::vector<std::string>& ids,
                             const std::vector<EvalResult>& evals,
                             std::uint64_t master_seed) {
  CsvWriter csv({"policy_id", "mean", "std", "ci_half_width", "replications", "seed"});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    csv.add_row({ids[i], format_double(evals[i].mean), format_double(evals[i].stddev),
                 format_double(evals[i].ci_half_width),
                 std::to_string(evals[i].replications), std::to_string(master_seed)});
  }
  return csv.str();
}

// ---------------------------------------------------------------------------
// Commands

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  bool quiet = false;

  std::filesystem::path out() const {
    if (!out_dir.empty()) return out_dir;
    if (const char* env = std::getenv("SEQDEC_OUT_DIR"); env && *env) return env;
    return ".";
  }
};

json load_config(const CliOptions& opt) {
  if (opt.config_path.empty()) throw ConfigError("config error: --config is required");
  std::ifstream in(opt.config_path, std::ios::binary);
  if (!in) throw ConfigError("config error: cannot open " + opt.config_path);
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) fail("/", "not valid JSON");
  if (!j.is_object()) fail("/", "must be an object");
  const json* schema = find(j, "schema");
  if (!schema) fail("/", "missing \"schema\"");
  if (!schema->is_number_integer() || schema->get<int>() != kSchemaVersion)
    fail("/schema", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
  check_keys(j, "", {"schema", "problem", "policy", "policies", "run", "tune", "pomdp"});
  return j;
}

const json& need_section(const json& j, const std::string& key) {
  const json* s = find(j, key);
  if (!s) fail("/", "missing \"" + key + "\" section");
  return *s;
}

int cmd_run(const CliOptions& opt) {
  json j = load_config(opt);
  ProblemConfig problem = parse_problem(need_section(j, "problem"));
  RunConfig run = parse_run(need_section(j, "run"));
  if (opt.seed_override) run.master_seed = *opt.seed_override;
  ParsedPolicy policy = parse_policy(need_section(j, "policy"), "/policy", problem.family);

  Trajectory traj;
  EvalResult eval;
  std::string policy_id;
  if (problem.family == "flu") {
    FluPolicy fp = make_flu_policy(problem.flu, policy.spec);
    policy_id = policy_tag(policy.spec.kind);
    TwoAgentHarness harness(problem.flu);
    traj = harness
               .run(fp, policy_id, derive_stream(run.master_seed, 0, "replication"),
                    run.horizon)
               .trajectory;
    eval = harness.evaluate_cost(fp, policy_id, run.master_seed, run.replications,
                                 run.horizon);
  } else {
    auto model = make_energy_model(problem.energy);
    EnergyPolicy ep =
        make_energy_threshold_policy(problem.energy, policy.theta_buy, policy.theta_sell);
    policy_id = "Energy-Threshold";
    traj = simulate(model, ep, policy_id, derive_stream(run.master_seed, 0, "replication"),
                    run.horizon);
    eval = evaluate_cumulative(model, ep, policy_id, run.master_seed, run.replications,
                               run.horizon);
  }

  const auto out_dir = opt.out();
  write_text(resolve_out(out_dir, run.trajectory_csv), trajectory_csv_text(traj));
  write_text(resolve_out(out_dir, run.summary_csv),
             summary_csv_text({policy_id}, {eval}, run.master_seed));
  if (!opt.quiet)
    std::cout << policy_id << ": mean " << format_double(eval.mean) << " +/- "
              << format_double(eval.ci_half_width) << " (" << eval.replications
              << " replications)\n";
  return 0;
}

int cmd_tune(const CliOptions& opt) {
  json j = load_config(opt);
  ProblemConfig problem = parse_problem(need_section(j, "problem"));
  if (problem.family != "flu") fail("/problem/family", "tuning covers the flu family");
  RunConfig run = parse_run(need_section(j, "run"));
  if (opt.seed_override) run.master_seed = *opt.seed_override;
  TuneConfig tune = parse_tune(need_section(j, "tune"));
  ParsedPolicy base = parse_policy(need_section(j, "policy"), "/policy", problem.family);

  bool use_truth = tune.use_truth.value_or(flu_is_spatial(problem.flu.variant));
  TuningObjective objective = make_flu_tuning_objective(
      problem.flu, run.horizon, run.replications, run.master_seed, use_truth);
  TuningResult result = tune.method == "grid"
                            ? grid_search(base.spec, tune.domain, objective)
                            : random_search(base.spec, tune.domain, tune.samples, objective);

  write_text(resolve_out(opt.out(), tune.result_csv), result.to_csv());
  if (!opt.quiet) {
    std::cout << "best";
    for (std::size_t i = 0; i < result.parameter_names.size(); ++i)
      std::cout << " " << result.parameter_names[i] << "="
                << format_double(result.best().theta[i]);
    std::cout << " mean " << format_double(result.best().eval.mean) << "\n";
  }
  return 0;
}

int cmd_compare(const CliOptions& opt) {
  json j = load_config(opt);
  ProblemConfig problem = parse_problem(need_section(j, "problem"));
  if (problem.family != "flu") fail("/problem/family", "compare covers the flu family");
  RunConfig run = parse_run(need_section(j, "run"));
  if (opt.seed_override) run.master_seed = *opt.seed_override;
  const json* list = find(j, "policies");
  if (!list || !list->is_array() || list->size() < 2)
    fail("/policies", "must be an array of at least 2 policy specs");

  std::vector<PolicySpec> specs;
  int i = 0;
  for (const auto& pj : *list)
    specs.push_back(
        parse_policy(pj, "/policies/" + std::to_string(i++), problem.family).spec);

  TwoAgentHarness harness(problem.flu);
  std::vector<std::vector<double>> totals(specs.size());
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    FluPolicy fp = make_flu_policy(problem.flu, specs[k]);
    ids.push_back(policy_tag(specs[k].kind));
    totals[k].reserve(static_cast<std::size_t>(run.replications));
    for (int r = 0; r < run.replications; ++r) {
      const std::uint64_t seed =
          derive_stream(run.master_seed, static_cast<std::uint64_t>(r), "replication");
      totals[k].push_back(harness.run(fp, ids[k], seed, run.horizon).trajectory.total);
    }
  }

  CsvWriter csv({"policy_id", "mean", "std", "ci_half_width", "replications", "seed",
                 "diff_mean", "diff_ci_half_width"});
  for (std::size_t k = 0; k < specs.size(); ++k) {
    EvalResult eval = summarize(totals[k]);
    std::vector<double> diff(totals[k].size());
    for (std::size_t r = 0; r < diff.size(); ++r) diff[r] = totals[k][r] - totals[0][r];
    EvalResult diff_eval = summarize(diff);
    csv.add_row({ids[k], format_double(eval.mean), format_double(eval.stddev),
                 format_double(eval.ci_half_width), std::to_string(eval.replications),
                 std::to_string(run.master_seed), format_double(diff_eval.mean),
                 format_double(diff_eval.ci_half_width)});
    if (!opt.quiet)
      std::cout << ids[k] << ": mean " << format_double(eval.mean) << " diff "
                << format_double(diff_eval.mean) << "\n";
  }
  write_text(resolve_out(opt.out(), run.summary_csv), csv.str());
  return 0;
}

int cmd_solve_pomdp(const CliOptions& opt) {
  json j = load_config(opt);
  const json& section = need_section(j, "pomdp");
  if (!section.is_object()) fail("/pomdp", "must be an object");
  check_keys(section, "/pomdp",
             {"model", "belief", "horizon", "method", "resolution", "value_table_csv"});

  const json* model_j = find(section, "model");
  if (!model_j) fail("/pomdp", "missing \"model\"");
  DiscretePomdp model;
  try {
    if (model_j->is_string()) {
      std::filesystem::path p(model_j->get<std::string>());
      if (p.is_relative())
        p = std::filesystem::path(opt.config_path).parent_path() / p;
      model = load_pomdp_json(p.string());
    } else if (model_j->is_object()) {
      model = pomdp_from_json_text(model_j->dump());
    } else {
      fail("/pomdp/model", "must be a path or an inline model object");
    }
  } catch (const Error& e) {
    fail("/pomdp/model", e.what());
  }

  int horizon = model.horizon;
  if (const json* v = find(section, "horizon")) {
    horizon = need_int(*v, "/pomdp/horizon");
    if (horizon < 0) fail("/pomdp/horizon", "must be >= 0");
  }

  BeliefVector b0 = BeliefVector::Constant(model.num_states, 1.0 / model.num_states);
  if (const json* v = find(section, "belief")) {
    auto b = need_number_array(*v, "/pomdp/belief");
    if (static_cast<int>(b.size()) != model.num_states)
      fail("/pomdp/belief", "must have one entry per state");
    double sum = 0.0;
    for (double x : b) {
      if (x < 0.0) fail("/pomdp/belief", "entries must be nonnegative");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("/pomdp/belief", "must sum to 1");
    b0 = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<int>(b.size()));
  }

  std::string method = "exact";
  if (const json* v = find(section, "method")) {
    method = need_string(*v, "/pomdp/method");
    if (method != "exact" && method != "grid")
      fail("/pomdp/method", "must be \"exact\" or \"grid\"");
  }

  if (method == "exact") {
    ExactSolution sol = solve_exact_reachable(model, b0, horizon);
    std::cout << "value " << format_double(sol.value) << "\n"
              << "first_action " << model.action_names[static_cast<std::size_t>(sol.first_action)]
              << "\n";
    return 0;
  }

  int resolution = 200;
  if (const json* v = find(section, "resolution")) {
    resolution = need_int(*v, "/pomdp/resolution");
    if (resolution < 1) fail("/pomdp/resolution", "must be >= 1");
  }
  GridSolution sol = solve_belief_grid(model, resolution, horizon);
  std::cout << "value " << format_double(sol.value_at(b0)) << "\n"
            << "first_action "
            << model.action_names[static_cast<std::size_t>(sol.greedy_at(model, b0))] << "\n";
  if (const json* v = find(section, "value_table_csv")) {
    std::vector<std::string> header;
    for (const auto& name : model.state_names) header.push_back("b_" + name);
    header.push_back("value");
    CsvWriter csv(std::move(header));
    for (std::size_t i = 0; i < sol.grid.points.size(); ++i) {
      std::vector<std::string> row;
      for (int s = 0; s < model.num_states; ++s)
        row.push_back(format_double(sol.grid.points[i](s)));
      row.push_back(format_double(sol.value[i]));
      csv.add_row(std::move(row));
    }
    write_text(resolve_out(opt.out(), need_string(*v, "/pomdp/value_table_csv")), csv.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Oracle suite: self-contained cross-checks of the numerical core against
// independent formulations. Each check prints PASS or FAIL with its name.

bool oracle_conjugate() {
  RandomStream rng(411);
  for (int i = 0; i < 1000; ++i) {
    GaussianBelief prior{rng.uniform(-50.0, 50.0), rng.uniform(0.01, 5.0)};
    double w = rng.uniform(-50.0, 50.0);
    double bw = rng.uniform(0.01, 5.0);
    GaussianBelief post = conjugate_update(prior, w, bw);
    // Density product: quadratic coefficients of the log posterior.
    double a = prior.precision + bw;
    double b = prior.precision * prior.mean + bw * w;
    if (std::abs(post.precision - a) > 1e-12) return false;
    if (std::abs(post.mean - b / a) > 1e-12) return false;
  }
  return true;
}

bool oracle_rls() {
  RandomStream rng(412);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 1 + static_cast<int>(rng.uniform_int(4));
    const double lambda = 1e-4;
    RlsState state = RlsState::initial(d, lambda);
    Eigen::MatrixXd a = lambda * Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
    for (int n = 0; n < 60; ++n) {
      Eigen::VectorXd p(d);
      for (int k = 0; k < d; ++k) p(k) = rng.normal();
      double y = rng.normal();
      state = rls_update(state, p, y);
      a += p * p.transpose();
      rhs += p * y;
      Eigen::VectorXd batch = a.ldlt().solve(rhs);
      if ((state.theta - batch).cwiseAbs().maxCoeff() > 1e-8) return false;
    }
  }
  return true;
}

DiscretePomdp random_pomdp(RandomStream& rng, int k, int a, int o, int horizon) {
  DiscretePomdp m;
  m.num_states = k;
  m.num_actions = a;
  m.num_observations = o;
  m.horizon = horizon;
  for (int i = 0; i < k; ++i) m.state_names.push_back("s" + std::to_string(i));
  for (int i = 0; i < a; ++i) m.action_names.push_back("a" + std::to_string(i));
  for (int i = 0; i < o; ++i) m.observation_names.push_back("w" + std::to_string(i));
  auto random_stochastic = [&](int rows, int cols) {
    Eigen::MatrixXd mat(rows, cols);
    for (int r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (int c = 0; c < cols; ++c) {
        mat(r, c) = rng.uniform(0.05, 1.0);
        sum += mat(r, c);
      }
      mat.row(r) /= sum;
    }
    return mat;
  };
  for (int act = 0; act < a; ++act) {
    m.transition.push_back(random_stochastic(k, k));
    m.observation.push_back(random_stochastic(k, o));
  }
  m.contribution = Eigen::MatrixXd::Zero(k, a);
  for (int s = 0; s < k; ++s)
    for (int act = 0; act < a; ++act) m.contribution(s, act) = rng.uniform(-1.0, 1.0);
  return m;
}

bool oracle_pomdp_bayes() {
  RandomStream rng(413);
  for (int rep = 0; rep < 50; ++rep) {
    const int k = 2 + static_cast<int>(rng.uniform_int(4));
    const int a = 1 + static_cast<int>(rng.uniform_int(3));
    const int o = 2 + static_cast<int>(rng.uniform_int(3));
    DiscretePomdp m = random_pomdp(rng, k, a, o, 1);
    BeliefVector b(k);
    double sum = 0.0;
    for (int s = 0; s < k; ++s) {
      b(s) = rng.uniform(0.05, 1.0);
      sum += b(s);
    }
    b /= sum;
    for (int act = 0; act < a; ++act) {
      double like_sum = 0.0;
      for (int w = 0; w < o; ++w) {
        // Joint table p(s', w) = sum_s b(s) T(s, s') O(s', w).
        Eigen::VectorXd joint = Eigen::VectorXd::Zero(k);
        for (int sp = 0; sp < k; ++sp)
          for (int s = 0; s < k; ++s)
            joint(sp) += b(s) * m.transition[act](s, sp) * m.observation[act](sp, w);
        double norm = joint.sum();
        like_sum += norm;
        if (std::abs(observation_likelihood(m, b, act, w) - norm) > 1e-12) return false;
        BeliefVector post = belief_update(m, b, act, w);
        if ((post - joint / norm).cwiseAbs().maxCoeff() > 1e-12) return false;
      }
      if (std::abs(like_sum - 1.0) > 1e-12) return false;
    }
  }
  return true;
}

bool oracle_pomdp_exact() {
  RandomStream rng(414);
  for (int rep = 0; rep < 20; ++rep) {
    const int k = 2 + static_cast<int>(rng.uniform_int(2));
    const int a = 2;
    const int o = 2;
    const int horizon = 1 + static_cast<int>(rng.uniform_int(3));
    DiscretePomdp m = random_pomdp(rng, k, a, o, horizon);
    BeliefVector b0 = BeliefVector::Constant(k, 1.0 / k);
    double exact = solve_exact_reachable(m, b0, horizon).value;
    double brute = brute_force_value(m, b0, horizon);
    if (std::abs(exact - brute) > 1e-9) return false;
  }
  return true;
}

bool oracle_gauss_hermite() {
  GaussHermite gh = gauss_hermite(7);
  auto moment = [&](int p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i)
      acc += gh.weights[i] * std::pow(gh.nodes[i], p);
    return acc;
  };
  return std::abs(moment(0) - 1.0) < 1e-12 && std::abs(moment(1)) < 1e-12 &&
         std::abs(moment(2) - 1.0) < 1e-10 && std::abs(moment(4) - 3.0) < 1e-9 &&
         std::abs(moment(6) - 15.0) < 1e-8;
}

int cmd_oracle_check(const CliOptions& opt) {
  (void)opt;
  struct Check {
    const char* name;
    bool (*fn)();
  };
  const Check checks[] = {
      {"conjugate-update", oracle_conjugate},
      {"rls-batch", oracle_rls},
      {"pomdp-bayes", oracle_pomdp_bayes},
      {"pomdp-exact", oracle_pomdp_exact},
      {"gauss-hermite", oracle_gauss_hermite},
  };
  bool all = true;
  for (const auto& c : checks) {
    bool ok = c.fn();
    all = all && ok;
    std::cout << (ok ? "PASS " : "FAIL ") << c.name << "\n";
  }
  return all ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential decision experiments: simulate, tune, compare, solve"};
  app.require_subcommand(1);
  app.fallthrough();

  CliOptions opt;
  app.add_option("--config", opt.config_path, "Path to the JSON experiment config");
  app.add_option("--out", opt.out_dir, "Output directory (default: $SEQDEC_OUT_DIR or .)");
  app.add_option("--seed", opt.seed_override, "Override the config's master_seed");
  app.add_flag("--quiet", opt.quiet, "Suppress informational output");

  auto* run = app.add_subcommand("run", "Simulate a policy and write trajectory/summary CSVs");
  auto* tune = app.add_subcommand("tune", "Search a policy's parameter domain");
  auto* compare = app.add_subcommand("compare", "Evaluate several policies on shared seeds");
  auto* solve = app.add_subcommand("solve-pomdp", "Solve a discrete POMDP from belief b0");
  auto* oracle = app.add_subcommand("oracle-check", "Run the numerical cross-check suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(opt);
    if (tune->parsed()) return cmd_tune(opt);
    if (compare->parsed()) return cmd_compare(opt);
    if (solve->parsed()) return cmd_solve_pomdp(opt);
    if (oracle->parsed()) return cmd_oracle_check(opt);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
