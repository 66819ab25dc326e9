#include "seqdec/flu.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "seqdec/errors.hpp"

namespace seqdec {

bool flu_has_inventory(int variant) { return variant == 2 || variant == 5 || variant == 6; }
bool flu_has_vaccination(int variant) { return variant >= 2; }
bool flu_has_weather(int variant) { return variant == 2 || variant == 6; }
bool flu_has_drift(int variant) { return variant == 3; }
bool flu_is_spatial(int variant) { return variant == 6; }

namespace {

constexpr double kVacTol = 1e-9;

/// Precision stand-in for a noiseless channel. Large enough that the
/// posterior mean equals the observation to machine precision, finite so
/// the conjugate algebra stays well defined.
constexpr double kExactPrecision = 1e30;

double obs_precision(const FluConfig& cfg) {
  return cfg.sigma_w > 0.0 ? 1.0 / (cfg.sigma_w * cfg.sigma_w) : kExactPrecision;
}

/// A drift sample W_{t+1} - W_t enters with the observation precision.
/// Samples are only formed from observations one period apart, so the
/// increment measures one period of drift.
double drift_sample_precision(const FluConfig& cfg) { return obs_precision(cfg); }

/// Candidate doses for the enumerated decision set: 21 evenly spaced
/// points from zero to the cap. With inventory the cap is the stock on
/// hand; without it, twice the nominal dose.
std::vector<double> default_vac_grid(const FluConfig& cfg, const FluControllerState& s) {
  if (!cfg.vac_grid.empty()) return cfg.vac_grid;
  double cap = flu_has_inventory(cfg.variant) ? std::max(0.0, s.inventory)
                                              : 2.0 * cfg.vac_dose;
  if (cap <= 0.0) return {0.0};
  std::vector<double> grid(21);
  for (int i = 0; i < 21; ++i) grid[i] = cap * i / 20.0;
  return grid;
}

/// Vaccination actually administered: the previous period's decision,
/// scaled down if the stock on hand cannot cover it. Variants without
/// inventory administer the decision as is.
std::vector<double> effective_vaccination(const FluConfig& cfg, const FluDecision& prev,
                                          double inventory) {
  std::size_t n = static_cast<std::size_t>(cfg.regions);
  std::vector<double> out(n, 0.0);
  if (!flu_has_vaccination(cfg.variant)) return out;
  if (flu_is_spatial(cfg.variant)) {
    for (std::size_t i = 0; i < n && i < prev.vac_alloc.size(); ++i)
      out[i] = std::max(0.0, prev.vac_alloc[i]);
  } else {
    out[0] = std::max(0.0, prev.vaccinate);
  }
  if (!flu_has_inventory(cfg.variant)) return out;
  double total = 0.0;
  for (double v : out) total += v;
  double avail = std::max(0.0, inventory);
  if (total > avail && total > 0.0) {
    double scale = avail / total;
    for (double& v : out) v *= scale;
  }
  return out;
}

/// prev with its vaccination replaced by what was actually administered.
FluDecision with_applied_vaccination(const FluConfig& cfg, const FluDecision& prev,
                                     const std::vector<double>& applied) {
  FluDecision out = prev;
  if (flu_is_spatial(cfg.variant))
    out.vac_alloc = applied;
  else
    out.vaccinate = applied.empty() ? 0.0 : applied[0];
  return out;
}

} // namespace

FluSystemNoise draw_flu_noise(const FluConfig& cfg, RandomStream& rng) {
  FluSystemNoise w;
  if (flu_has_weather(cfg.variant)) {
    w.temp_eps = rng.normal();
    w.hum_eps = rng.normal();
  }
  if (cfg.variant >= 2) {
    w.mu_eps.resize(static_cast<std::size_t>(cfg.regions));
    for (double& e : w.mu_eps) e = rng.normal();
  }
  w.w_eps = rng.normal();
  return w;
}

void FluConfig::validate() const {
  if (variant < 1 || variant > 6) throw ModelError("flu: variant must be in 1..6");
  if (regions < 1) throw ModelError("flu: regions must be >= 1");
  if (!flu_is_spatial(variant) && regions != 1)
    throw ModelError("flu: only variant 6 supports several regions");
  if (sigma_w < 0.0) throw ModelError("flu: sigma_w must be nonnegative");
  if (sigma_mu < 0.0) throw ModelError("flu: sigma_mu must be nonnegative");
  if (prior_precision < 0.0 || drift_prior_precision < 0.0)
    throw ModelError("flu: prior precisions must be nonnegative");
  if (c_obs < 0.0 || c_unc < 0.0 || c_vac < 0.0 || c_inv < 0.0)
    throw ModelError("flu: costs must be nonnegative");
  if (theta_vac < 0.0 || theta_vac_hat < 0.0)
    throw ModelError("flu: vaccination effects must be nonnegative");
  if (inventory0 < 0.0 || inventory_rate < 0.0)
    throw ModelError("flu: inventory settings must be nonnegative");
  if (lag < 1) throw ModelError("flu: lag must be >= 1");
  if (vac_dose < 0.0) throw ModelError("flu: vac_dose must be nonnegative");
  if (!mu0_regions.empty() && static_cast<int>(mu0_regions.size()) != regions)
    throw ModelError("flu: mu0_regions must have one entry per region");
  for (double g : vac_grid)
    if (g < 0.0) throw ModelError("flu: vac_grid entries must be nonnegative");
}

// ---------------------------------------------------------------------------
// Environment.

FluEnvironment::FluEnvironment(const FluConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  std::size_t n = static_cast<std::size_t>(cfg.regions);
  mu_.assign(n, cfg.mu0);
  if (!cfg.mu0_regions.empty())
    for (std::size_t i = 0; i < n; ++i) mu_[i] = cfg.mu0_regions[i];
  temp_ = cfg.temp0;
  hum_ = cfg.hum0;
  if (flu_is_spatial(cfg.variant)) {
    mu_history_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      mu_history_[i].assign(static_cast<std::size_t>(cfg.lag), mu_[i]);
    double u = u_current();
    u_history_ = {u, u, u};
  }
}

double FluEnvironment::u_current() const {
  double excess = std::max(0.0, temp_ - cfg_.temp_threshold);
  return excess * excess;
}

void FluEnvironment::step(const std::vector<double>& vac_applied,
                          const FluSystemNoise& noise) {
  const int v = cfg_.variant;
  std::size_t n = mu_.size();
  std::vector<double> vac(n, 0.0);
  for (std::size_t i = 0; i < n && i < vac_applied.size(); ++i)
    vac[i] = std::max(0.0, vac_applied[i]);

  switch (v) {
    case 1:
      break;
    case 2:
    case 3: {
      double d = (v == 3) ? cfg_.drift : 0.0;
      mu_[0] = std::max(0.0, mu_[0] + d + cfg_.sigma_mu * noise.mu_eps.at(0));
      break;
    }
    case 4:
    case 5:
      mu_[0] = std::max(0.0, mu_[0] - cfg_.theta_vac * vac[0] +
                                 cfg_.sigma_mu * noise.mu_eps.at(0));
      break;
    case 6: {
      // The lag buffer holds mu_{t-lag} .. mu_{t-1}; the U history is
      // (U_t, U_{t-1}, U_{t-2}) from the weather before this step.
      for (std::size_t i = 0; i < n; ++i) {
        double lagged = mu_history_[i].front();
        double seasonal = cfg_.th_temp[0] * u_history_[0] +
                          cfg_.th_temp[1] * u_history_[1] +
                          cfg_.th_temp[2] * u_history_[2];
        double dose = vac[i];
        double next = cfg_.th_mu0 * mu_[i] + cfg_.th_mu_lag * lagged + seasonal -
                      (cfg_.th_vac1 * dose + cfg_.th_vac2 * dose * dose) +
                      cfg_.sigma_mu * noise.mu_eps.at(i);
        mu_history_[i].pop_front();
        mu_history_[i].push_back(mu_[i]);
        mu_[i] = std::max(0.0, next);
      }
      break;
    }
    default:
      throw ModelError("flu: variant out of range");
  }

  if (flu_has_weather(v)) {
    temp_ = cfg_.temp_mean + cfg_.temp_rho * (temp_ - cfg_.temp_mean) +
            cfg_.temp_sd * std::sqrt(1.0 - cfg_.temp_rho * cfg_.temp_rho) * noise.temp_eps;
    hum_ = cfg_.hum_mean + cfg_.hum_rho * (hum_ - cfg_.hum_mean) +
           cfg_.hum_sd * std::sqrt(1.0 - cfg_.hum_rho * cfg_.hum_rho) * noise.hum_eps;
    if (flu_is_spatial(v)) u_history_ = {u_current(), u_history_[0], u_history_[1]};
  }
}

double FluEnvironment::observe(int region, double noise) const {
  if (region < 0 || region >= regions())
    throw ModelError("flu: observation region out of range");
  return mu_[static_cast<std::size_t>(region)] + noise;
}

// ---------------------------------------------------------------------------
// Controller.

FluControllerState flu_initial_controller(const FluConfig& cfg) {
  cfg.validate();
  FluControllerState s;
  s.variant = cfg.variant;
  s.beliefs.assign(static_cast<std::size_t>(cfg.regions),
                   GaussianBelief{cfg.prior_mean, cfg.prior_precision});
  if (flu_has_drift(cfg.variant))
    s.drift = DriftBelief{cfg.drift_prior_mean, cfg.drift_prior_precision};
  if (flu_has_inventory(cfg.variant)) s.inventory = cfg.inventory0;
  if (cfg.variant == 2) {
    s.temp = cfg.temp0;
    s.hum = cfg.hum0;
  }
  s.window_active = cfg.use_approx_model;
  return s;
}

std::vector<std::string> FluControllerState::field_names() const {
  std::vector<std::string> f;
  switch (variant) {
    case 1:
    case 4:
      f = {"mu_bar", "beta"};
      break;
    case 2:
      f = {"R", "I_temp", "I_hum", "mu_bar", "beta"};
      break;
    case 3:
      f = {"mu_bar", "beta", "delta_bar", "beta_delta"};
      break;
    case 5:
      f = {"R", "mu_bar", "beta"};
      break;
    case 6: {
      f = {"R"};
      for (std::size_t i = 0; i < beliefs.size(); ++i) {
        f.push_back("mu_bar_" + std::to_string(i));
        f.push_back("beta_" + std::to_string(i));
      }
      break;
    }
    default:
      throw ModelError("flu: variant out of range");
  }
  if (window_active) {
    f.push_back("w0");
    f.push_back("w1");
    f.push_back("w2");
  }
  return f;
}

std::vector<double> FluControllerState::field_values() const {
  std::vector<double> v;
  switch (variant) {
    case 1:
    case 4:
      v = {beliefs[0].mean, beliefs[0].precision};
      break;
    case 2:
      v = {inventory, temp, hum, beliefs[0].mean, beliefs[0].precision};
      break;
    case 3:
      v = {beliefs[0].mean, beliefs[0].precision, drift.mean, drift.precision};
      break;
    case 5:
      v = {inventory, beliefs[0].mean, beliefs[0].precision};
      break;
    case 6: {
      v = {inventory};
      for (const auto& b : beliefs) {
        v.push_back(b.mean);
        v.push_back(b.precision);
      }
      break;
    }
    default:
      throw ModelError("flu: variant out of range");
  }
  if (window_active) {
    v.push_back(window[0]);
    v.push_back(window[1]);
    v.push_back(window[2]);
  }
  return v;
}

double FluControllerState::sigma_bar_total() const {
  double s = 0.0;
  for (const auto& b : beliefs) s += b.sigma();
  return s;
}

double FluControllerState::mu_bar_total() const {
  double s = 0.0;
  for (const auto& b : beliefs) s += b.mean;
  return s;
}

double FluDecision::total_vaccinate(int variant) const {
  if (flu_is_spatial(variant)) {
    double s = 0.0;
    for (double v : vac_alloc) s += v;
    return s;
  }
  return vaccinate;
}

std::vector<std::string> flu_decision_fields(const FluConfig& cfg) {
  switch (cfg.variant) {
    case 1:
      return {"x_obs"};
    case 3:
    case 4:
      return {"x_obs", "x_vac"};
    case 2:
    case 5:
      return {"x_obs", "x_vac", "x_inv"};
    case 6: {
      std::vector<std::string> f = {"x_obs", "x_obs_region"};
      for (int i = 0; i < cfg.regions; ++i) f.push_back("x_vac_" + std::to_string(i));
      f.push_back("x_inv");
      return f;
    }
    default:
      throw ModelError("flu: variant out of range");
  }
}

std::vector<double> flu_decision_values(const FluConfig& cfg, const FluDecision& x) {
  switch (cfg.variant) {
    case 1:
      return {static_cast<double>(x.observe)};
    case 3:
    case 4:
      return {static_cast<double>(x.observe), x.vaccinate};
    case 2:
    case 5:
      return {static_cast<double>(x.observe), x.vaccinate, x.inventory_order};
    case 6: {
      std::vector<double> v = {static_cast<double>(x.observe),
                               static_cast<double>(x.obs_region)};
      for (int i = 0; i < cfg.regions; ++i)
        v.push_back(i < static_cast<int>(x.vac_alloc.size())
                        ? x.vac_alloc[static_cast<std::size_t>(i)]
                        : 0.0);
      v.push_back(x.inventory_order);
      return v;
    }
    default:
      throw ModelError("flu: variant out of range");
  }
}

double flu_cost(const FluConfig& cfg, const FluControllerState& s, const FluDecision& x) {
  double cost = cfg.c_obs * x.observe;
  if (cfg.variant <= 3) {
    cost += cfg.c_unc * s.sigma_bar_total();
  } else {
    for (const auto& b : s.beliefs) cost += cfg.c_vac * std::max(0.0, b.mean);
  }
  if (flu_has_inventory(cfg.variant)) cost += cfg.c_inv * x.inventory_order;
  return cost;
}

bool flu_feasible(const FluConfig& cfg, const FluControllerState& s, const FluDecision& x) {
  return flu_violation(cfg, s, x).empty();
}

std::string flu_violation(const FluConfig& cfg, const FluControllerState& s,
                          const FluDecision& x) {
  if (x.observe != 0 && x.observe != 1) return "x_obs must be 0 or 1";
  if (flu_is_spatial(cfg.variant)) {
    if (x.obs_region < 0 || x.obs_region >= cfg.regions)
      return "x_obs_region out of range";
    if (static_cast<int>(x.vac_alloc.size()) > cfg.regions)
      return "vaccination allocation has too many regions";
    for (double v : x.vac_alloc)
      if (v < 0.0) return "vaccination amounts must be nonnegative";
    if (x.vaccinate != 0.0) return "spatial variant uses the per-region allocation";
  } else {
    if (x.obs_region != 0) return "x_obs_region is only meaningful for the spatial variant";
    if (!x.vac_alloc.empty()) return "per-region allocation is only for the spatial variant";
    if (x.vaccinate < 0.0) return "x_vac must be nonnegative";
    if (!flu_has_vaccination(cfg.variant) && x.vaccinate != 0.0)
      return "variant 1 has no vaccination decision";
  }
  if (flu_has_inventory(cfg.variant)) {
    if (x.inventory_order < 0.0) return "x_inv must be nonnegative";
    double total = x.total_vaccinate(cfg.variant);
    if (total > s.inventory + kVacTol)
      return "vaccination " + std::to_string(total) + " exceeds inventory " +
             std::to_string(s.inventory);
  } else if (x.inventory_order != 0.0) {
    return "this variant has no inventory decision";
  }
  return {};
}

std::vector<FluDecision> flu_candidates(const FluConfig& cfg, const FluControllerState& s) {
  std::vector<FluDecision> out;
  std::vector<double> grid = default_vac_grid(cfg, s);
  double inv = flu_has_inventory(cfg.variant) ? cfg.inventory_rate : 0.0;

  auto push_if_feasible = [&](FluDecision d) {
    if (flu_feasible(cfg, s, d)) out.push_back(std::move(d));
  };

  for (int obs = 0; obs <= 1; ++obs) {
    if (cfg.variant == 1) {
      FluDecision d;
      d.observe = obs;
      push_if_feasible(std::move(d));
      continue;
    }
    if (!flu_is_spatial(cfg.variant)) {
      for (double v : grid) {
        FluDecision d;
        d.observe = obs;
        d.vaccinate = v;
        d.inventory_order = inv;
        push_if_feasible(std::move(d));
      }
      continue;
    }
    int obs_regions = obs == 1 ? cfg.regions : 1;
    for (int r = 0; r < obs_regions; ++r)
      for (int k = 0; k < cfg.regions; ++k)
        for (double v : grid) {
          if (v == 0.0 && k > 0) continue; // zero dose is the same everywhere
          FluDecision d;
          d.observe = obs;
          d.obs_region = obs == 1 ? r : 0;
          d.vac_alloc.assign(static_cast<std::size_t>(cfg.regions), 0.0);
          d.vac_alloc[static_cast<std::size_t>(k)] = v;
          d.inventory_order = inv;
          push_if_feasible(std::move(d));
        }
  }
  return out;
}

FluControllerState controller_step_flu(const FluConfig& cfg, const FluControllerState& s,
                                       const FluDecision& x_now, const FluDecision& x_prev,
                                       std::optional<double> w, double temp, double hum) {
  FluControllerState n = s;
  const int v = cfg.variant;
  const double bw = obs_precision(cfg);

  // Effects of the previous decision land now: inventory movement and the
  // believed vaccination shift both run one period behind the decision.
  if (flu_has_inventory(v))
    n.inventory = s.inventory + x_prev.inventory_order - x_prev.total_vaccinate(v);

  std::vector<double> shift(s.beliefs.size(), 0.0);
  if (v >= 4) {
    if (flu_is_spatial(v)) {
      for (std::size_t i = 0; i < shift.size() && i < x_prev.vac_alloc.size(); ++i)
        shift[i] = cfg.theta_vac_hat * x_prev.vac_alloc[i];
    } else {
      shift[0] = cfg.theta_vac_hat * x_prev.vaccinate;
    }
  }

  int obs_region = flu_is_spatial(v) ? x_now.obs_region : 0;
  for (std::size_t i = 0; i < n.beliefs.size(); ++i) {
    bool observed = w.has_value() && static_cast<int>(i) == obs_region;
    if (observed)
      n.beliefs[i] = conjugate_update_controlled(s.beliefs[i], *w, bw, shift[i]);
    else
      n.beliefs[i] = shifted(s.beliefs[i], shift[i]);
  }

  if (flu_has_drift(v) && w.has_value() && s.prev_w_valid && s.prev_w_age == 1)
    n.drift = drift_update(s.drift, s.prev_w, *w, drift_sample_precision(cfg));

  if (w.has_value()) {
    n.prev_w = *w;
    n.prev_w_valid = true;
    n.prev_w_age = 1;
    if (n.window_active) {
      n.window = {*w, s.window[0], s.window[1]};
      n.window_count = std::min(s.window_count + 1, 3);
    }
  } else if (s.prev_w_valid) {
    n.prev_w_age = s.prev_w_age + 1;
  }

  if (v == 2) {
    n.temp = temp;
    n.hum = hum;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Harness.

TwoAgentHarness::TwoAgentHarness(FluConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

namespace {

struct StepOutcome {
  FluDecision decision;
  double cost = 0.0;
};

/// One period of the paired loop, shared by every entry point. Mutates env,
/// ctrl and prev in place and returns the decision with its cost.
StepOutcome flu_step(const FluConfig& cfg, const FluPolicy& policy, int t,
                     FluEnvironment& env, FluControllerState& ctrl, FluDecision& prev,
                     RandomStream& exo_rng) {
  FluDecision x = policy(ctrl, t);
  std::string viol = flu_violation(cfg, ctrl, x);
  if (!viol.empty()) throw FeasibilityError(t, viol);
  double cost = flu_cost(cfg, ctrl, x);

  std::vector<double> applied = effective_vaccination(cfg, prev, ctrl.inventory);
  FluDecision prev_applied = with_applied_vaccination(cfg, prev, applied);

  FluSystemNoise noise = draw_flu_noise(cfg, exo_rng);
  env.step(applied, noise);
  std::optional<double> w;
  if (x.observe == 1)
    w = env.observe(flu_is_spatial(cfg.variant) ? x.obs_region : 0,
                    cfg.sigma_w * noise.w_eps);

  ctrl = controller_step_flu(cfg, ctrl, x, prev_applied, w, env.temperature(),
                             env.humidity());
  prev = x;
  return {std::move(x), cost};
}

} // namespace

FluEpisode TwoAgentHarness::run(const FluPolicy& policy, const std::string& policy_id,
                                std::uint64_t master_seed, int horizon) const {
  RandomStream exo_rng(derive_stream(master_seed, 0, "exogenous"));
  FluEnvironment env(cfg_);
  FluControllerState ctrl = flu_initial_controller(cfg_);
  FluDecision prev;

  FluEpisode ep;
  ep.trajectory.policy_id = policy_id;
  ep.trajectory.master_seed = master_seed;
  ep.trajectory.state_fields = ctrl.field_names();
  ep.trajectory.decision_fields = flu_decision_fields(cfg_);

  double total = 0.0;
  for (int t = 0; t < horizon; ++t) {
    FluEnvRecord er;
    er.t = t;
    er.mu = FluTruthAccess::mu(env);
    er.temp = env.temperature();
    er.hum = env.humidity();
    for (double m : er.mu) ep.truth_objective += m;
    ep.env.push_back(std::move(er));

    Trajectory::Record rec;
    rec.t = t;
    rec.state = ctrl.field_values();
    StepOutcome so = flu_step(cfg_, policy, t, env, ctrl, prev, exo_rng);
    rec.decision = flu_decision_values(cfg_, so.decision);
    rec.contribution = so.cost;
    total += so.cost;
    ep.trajectory.records.push_back(std::move(rec));
  }
  ep.trajectory.total = total;
  return ep;
}

FluTypedEpisode TwoAgentHarness::run_typed(const FluPolicy& policy,
                                           std::uint64_t master_seed, int horizon) const {
  RandomStream exo_rng(derive_stream(master_seed, 0, "exogenous"));
  FluEnvironment env(cfg_);
  FluControllerState ctrl = flu_initial_controller(cfg_);
  FluDecision prev;

  FluTypedEpisode ep;
  for (int t = 0; t < horizon; ++t) {
    ep.states.push_back(ctrl);
    StepOutcome so = flu_step(cfg_, policy, t, env, ctrl, prev, exo_rng);
    ep.decisions.push_back(std::move(so.decision));
    ep.costs.push_back(so.cost);
  }
  ep.states.push_back(ctrl);
  return ep;
}

EvalResult TwoAgentHarness::evaluate_cost(const FluPolicy& policy,
                                          const std::string& policy_id,
                                          std::uint64_t master_seed, int replications,
                                          int horizon) const {
  if (replications <= 0) throw Error("evaluate_cost: replications must be positive");
  std::vector<double> totals;
  totals.reserve(static_cast<std::size_t>(replications));
  for (int r = 0; r < replications; ++r) {
    std::uint64_t seed =
        derive_stream(master_seed, static_cast<std::uint64_t>(r), "replication");
    totals.push_back(run(policy, policy_id, seed, horizon).trajectory.total);
  }
  return summarize(totals);
}

EvalResult TwoAgentHarness::evaluate_truth(const FluPolicy& policy,
                                           std::uint64_t master_seed, int replications,
                                           int horizon) const {
  if (replications <= 0) throw Error("evaluate_truth: replications must be positive");
  std::vector<double> totals;
  totals.reserve(static_cast<std::size_t>(replications));
  for (int r = 0; r < replications; ++r) {
    std::uint64_t seed =
        derive_stream(master_seed, static_cast<std::uint64_t>(r), "replication");
    totals.push_back(run(policy, "", seed, horizon).truth_objective);
  }
  return summarize(totals);
}

// ---------------------------------------------------------------------------
// Canonical wrapper.

CanonicalModel<FluSystemState, FluDecision, FluSystemNoise> make_flu_model(
    const FluConfig& cfg) {
  cfg.validate();
  CanonicalModel<FluSystemState, FluDecision, FluSystemNoise> m;
  m.sense = Sense::Minimize;

  m.initial_state = [cfg](RandomStream&) {
    FluSystemState s;
    s.env = FluEnvironment(cfg);
    s.ctrl = flu_initial_controller(cfg);
    return s;
  };

  m.feasible = [cfg](const FluSystemState& s, const FluDecision& x) {
    return flu_feasible(cfg, s.ctrl, x);
  };
  m.violation = [cfg](const FluSystemState& s, const FluDecision& x) {
    return flu_violation(cfg, s.ctrl, x);
  };
  m.candidates = [cfg](const FluSystemState& s) { return flu_candidates(cfg, s.ctrl); };

  m.exogenous = [cfg](const FluSystemState&, const FluDecision&, RandomStream& rng) {
    return draw_flu_noise(cfg, rng);
  };

  m.transition = [cfg](const FluSystemState& s, const FluDecision& x,
                       const FluSystemNoise& noise) {
    FluSystemState n = s;
    std::vector<double> applied = effective_vaccination(cfg, s.prev, s.ctrl.inventory);
    FluDecision prev_applied = with_applied_vaccination(cfg, s.prev, applied);
    n.env.step(applied, noise);
    std::optional<double> w;
    if (x.observe == 1)
      w = n.env.observe(flu_is_spatial(cfg.variant) ? x.obs_region : 0,
                        cfg.sigma_w * noise.w_eps);
    n.ctrl = controller_step_flu(cfg, s.ctrl, x, prev_applied, w, n.env.temperature(),
                                 n.env.humidity());
    n.prev = x;
    return n;
  };

  // The cost is assessed on what the controller knows, before the draw.
  m.contribution = [cfg](const FluSystemState& s, const FluDecision& x,
                         const FluSystemNoise&) { return flu_cost(cfg, s.ctrl, x); };

  // Logged state is the controller-visible part; the truth stays private to
  // the environment and is only reachable through the harness episode log.
  m.state_fields = flu_initial_controller(cfg).field_names();
  m.decision_fields = flu_decision_fields(cfg);
  if (flu_has_weather(cfg.variant)) {
    m.noise_fields.push_back("eps_temp");
    m.noise_fields.push_back("eps_hum");
  }
  if (cfg.variant >= 2) {
    if (cfg.regions == 1) {
      m.noise_fields.push_back("eps_mu");
    } else {
      for (int i = 0; i < cfg.regions; ++i)
        m.noise_fields.push_back("eps_mu_" + std::to_string(i));
    }
  }
  m.noise_fields.push_back("eps_w");

  m.state_values = [](const FluSystemState& s) { return s.ctrl.field_values(); };
  m.decision_values = [cfg](const FluDecision& x) { return flu_decision_values(cfg, x); };
  m.noise_values = [cfg](const FluSystemNoise& w) {
    std::vector<double> v;
    if (flu_has_weather(cfg.variant)) {
      v.push_back(w.temp_eps);
      v.push_back(w.hum_eps);
    }
    for (double e : w.mu_eps) v.push_back(e);
    v.push_back(w.w_eps);
    return v;
  };

  return m;
}

} // namespace seqdec
