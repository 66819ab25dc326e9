#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seqdec/belief.hpp"
#include "seqdec/model.hpp"
#include "seqdec/rng.hpp"
#include "seqdec/stats.hpp"

namespace seqdec {

/// Flu surveillance and vaccination, in six variants of increasing richness:
///   1  static hidden prevalence, observe-or-not
///   2  time-varying prevalence, weather as exogenous observable state,
///      vaccine inventory (vaccination spends stock but cannot move the truth)
///   3  time-varying prevalence with an unknown drift
///   4  vaccination lowers true prevalence (one period later)
///   5  variant 4 plus a vaccine inventory
///   6  several regions, a richer ground-truth model, one region observable
///      per period, inventory shared across regions
struct FluConfig {
  int variant = 1;
  int regions = 1; // > 1 only for variant 6

  // Hidden truth.
  double mu0 = 40.0;
  std::vector<double> mu0_regions; // variant 6; defaults to mu0 everywhere
  double sigma_mu = 2.0;           // process noise (variants 2..6)
  double drift = 0.0;              // true drift of the prevalence (variant 3)
  double theta_vac = 0.1;          // true per-unit vaccination effect (4, 5)

  // Observation channel.
  double sigma_w = 4.0;

  // Controller priors.
  double prior_mean = 40.0;
  double prior_precision = 0.01;
  double drift_prior_mean = 0.0;
  double drift_prior_precision = 0.25;
  /// Controller's assumed per-unit vaccination effect (variants 4..6).
  double theta_vac_hat = 0.1;

  // Costs.
  double c_obs = 1.0;  // per observation
  double c_unc = 1.0;  // per unit of posterior standard deviation (1..3)
  double c_vac = 1.0;  // per unit of believed prevalence (4..6)
  double c_inv = 0.0;  // per unit of inventory ordered (2, 5, 6)

  // Inventory (variants 2, 5, 6).
  double inventory0 = 0.0;
  /// Replenishment rate used by the built-in policies as their x_inv.
  double inventory_rate = 0.0;

  // Weather process, shared across regions (variants 2 and 6).
  double temp0 = 22.0, temp_mean = 22.0, temp_sd = 4.0, temp_rho = 0.7;
  double hum0 = 50.0, hum_mean = 50.0, hum_sd = 8.0, hum_rho = 0.7;

  // Variant 6 ground-truth model:
  //   mu' = max{0, th_mu0 mu + th_mu_lag mu_{t-lag}
  //               + th_temp . (U_t, U_{t-1}, U_{t-2})
  //               - (th_vac1 v + th_vac2 v^2) + eps},
  // with U = (max{0, temp - temp_threshold})^2.
  double th_mu0 = 0.97;
  double th_mu_lag = 0.05;
  int lag = 24;
  std::array<double, 3> th_temp = {0.02, 0.01, 0.005};
  double th_vac1 = 0.2;
  double th_vac2 = 0.002;
  double temp_threshold = 25.0;

  // Controller's optional observation window for its own time-series model.
  bool use_approx_model = false;
  std::array<double, 3> theta_w = {0.6, 0.25, 0.1};

  /// Dose used by the argmax vaccination rules and candidate grids.
  double vac_dose = 20.0;
  /// Candidate vaccination amounts for policies that score a finite set.
  std::vector<double> vac_grid;

  void validate() const;
};

bool flu_has_inventory(int variant);   // 2, 5, 6
bool flu_has_vaccination(int variant); // 2..6
bool flu_has_weather(int variant);     // 2, 6
bool flu_has_drift(int variant);       // 3
bool flu_is_spatial(int variant);      // 6

struct FluSystemNoise;

/// Ground truth. Policies never get their hands on an instance of this
/// class; the prevalence itself is private and read only by the harness
/// logging hooks.
class FluEnvironment {
public:
  FluEnvironment() = default;
  explicit FluEnvironment(const FluConfig& cfg);

  /// Advances the truth one period. vac_applied holds the per-region
  /// vaccination decided in the previous period (already clamped to the
  /// available stock by the harness). The noise comes from the one shared
  /// per-period draw, so the step itself is deterministic.
  void step(const std::vector<double>& vac_applied, const FluSystemNoise& noise);

  /// Observation of one region's prevalence with the supplied noise.
  /// Called by the harness only when the controller pays for an observation.
  double observe(int region, double noise) const;

  // Weather is public information.
  double temperature() const { return temp_; }
  double humidity() const { return hum_; }

  int regions() const { return static_cast<int>(mu_.size()); }

private:
  friend struct FluTruthAccess;

  FluConfig cfg_;
  std::vector<double> mu_;
  std::vector<std::deque<double>> mu_history_; // per region, oldest first
  double temp_ = 0.0, hum_ = 0.0;
  std::array<double, 3> u_history_ = {0.0, 0.0, 0.0}; // U_t, U_{t-1}, U_{t-2}

  double u_current() const;
};

/// Harness-side hook for reading the hidden prevalence when logging.
struct FluTruthAccess {
  static const std::vector<double>& mu(const FluEnvironment& env) { return env.mu_; }
};

/// Everything the controlling agent knows. Field layout per variant:
///   1  (mu_bar, beta)
///   2  (R, I_temp, I_hum, mu_bar, beta)
///   3  (mu_bar, beta, delta_bar, beta_delta)
///   4  (mu_bar, beta)
///   5  (R, mu_bar, beta)
///   6  (R, mu_bar_i, beta_i per region)
/// plus (w0, w1, w2) when the approximate observation model is enabled.
struct FluControllerState {
  int variant = 1;
  double inventory = 0.0;
  double temp = 0.0, hum = 0.0;
  std::vector<GaussianBelief> beliefs;
  DriftBelief drift;

  // Bookkeeping derived from observations only; not part of the declared
  // state layout. prev_w supports drift estimation from consecutive
  // observations, the window feeds the approximate observation model.
  bool prev_w_valid = false;
  double prev_w = 0.0;
  int prev_w_age = 0;
  bool window_active = false;
  std::array<double, 3> window = {0.0, 0.0, 0.0};
  int window_count = 0;

  std::vector<std::string> field_names() const;
  std::vector<double> field_values() const;

  double sigma_bar_total() const;
  double mu_bar_total() const;
};

/// Decision of the controlling agent. Components not meaningful for a
/// variant stay at their defaults and are not part of its flattened layout.
struct FluDecision {
  int observe = 0;    // x_obs in {0, 1}
  int obs_region = 0; // variant 6
  double vaccinate = 0.0;
  std::vector<double> vac_alloc; // variant 6, one entry per region
  double inventory_order = 0.0;  // x_inv

  double total_vaccinate(int variant) const;
};

std::vector<std::string> flu_decision_fields(const FluConfig& cfg);
std::vector<double> flu_decision_values(const FluConfig& cfg, const FluDecision& x);

/// Declared per-period cost:
///   variants 1..3  c_obs x_obs + c_unc sigma_bar (+ c_inv x_inv in 2)
///   variants 4..6  c_obs x_obs + c_vac max{0, mu_bar} (+ c_inv x_inv in 5, 6)
/// For variant 6 the belief terms sum over regions.
double flu_cost(const FluConfig& cfg, const FluControllerState& s, const FluDecision& x);

/// Feasibility of a decision in a controller state. The inventory coupling
/// constraint sum_i x_vac_i <= R applies to variants with inventory;
/// vaccination amounts and orders must be nonnegative everywhere.
bool flu_feasible(const FluConfig& cfg, const FluControllerState& s, const FluDecision& x);
std::string flu_violation(const FluConfig& cfg, const FluControllerState& s,
                          const FluDecision& x);

/// Candidate decisions for policies that score a finite set.
std::vector<FluDecision> flu_candidates(const FluConfig& cfg, const FluControllerState& s);

/// Belief-side transition. x_now gates the observation; x_prev is the
/// decision whose effects land this period (inventory movement and the
/// vaccination shift both run one period behind). w is the observation of
/// region x_now.obs_region, when one was made.
FluControllerState controller_step_flu(const FluConfig& cfg, const FluControllerState& s,
                                       const FluDecision& x_now, const FluDecision& x_prev,
                                       std::optional<double> w, double temp, double hum);

/// Initial controller state from the configured priors.
FluControllerState flu_initial_controller(const FluConfig& cfg);

using FluPolicy = std::function<FluDecision(const FluControllerState&, int)>;

struct FluEnvRecord {
  int t = 0;
  std::vector<double> mu;
  double temp = 0.0;
  double hum = 0.0;
};

struct FluEpisode {
  Trajectory trajectory;          // controller-side view
  std::vector<FluEnvRecord> env;  // truth log, decision epochs 0..T-1
  /// Sum over logged epochs and regions of the true prevalence. The tuning
  /// objective for the spatial variant; policies never see it.
  double truth_objective = 0.0;
};

/// Typed episode capture for fitting routines that need states, not rows.
struct FluTypedEpisode {
  std::vector<FluControllerState> states; // S_0 .. S_T
  std::vector<FluDecision> decisions;     // x_0 .. x_{T-1}
  std::vector<double> costs;              // C(S_t, x_t)
};

/// Runs environment and controller side by side. Per period: the policy
/// reads the controller state, the cost is assessed on (state, decision),
/// the environment advances under the previous period's vaccination, the
/// observation (if bought) is taken on the post-step truth, and the
/// controller state updates. Vaccination applied to the environment is
/// clamped to the stock on hand; the controller applies the same clamp to
/// its belief shift, so both sides see one consistent decision.
class TwoAgentHarness {
public:
  explicit TwoAgentHarness(FluConfig cfg);

  const FluConfig& config() const { return cfg_; }

  FluEpisode run(const FluPolicy& policy, const std::string& policy_id,
                 std::uint64_t master_seed, int horizon) const;

  FluTypedEpisode run_typed(const FluPolicy& policy, std::uint64_t master_seed,
                            int horizon) const;

  /// Mean and spread of the declared cost over replications.
  EvalResult evaluate_cost(const FluPolicy& policy, const std::string& policy_id,
                           std::uint64_t master_seed, int replications, int horizon) const;

  /// Mean and spread of the truth objective over replications.
  EvalResult evaluate_truth(const FluPolicy& policy, std::uint64_t master_seed,
                            int replications, int horizon) const;

private:
  FluConfig cfg_;
};

/// Canonical-form wrapper around the paired system. The state bundles the
/// environment, the controller state and the pending decision; policies
/// written against it still only read the controller part.
struct FluSystemState {
  FluEnvironment env;
  FluControllerState ctrl;
  FluDecision prev;
};

/// Standard-normal draws for one period, scaled at the point of use.
struct FluSystemNoise {
  std::vector<double> mu_eps; // one per region, variants 2..6
  double temp_eps = 0.0;      // variants with weather
  double hum_eps = 0.0;
  double w_eps = 0.0; // observation noise, drawn every period
};

/// The per-period draw shared by the harness and the canonical wrapper.
/// Order: weather, then one prevalence shock per region, then observation
/// noise. Both entry points consume draws identically, so a fixed seed
/// yields one exogenous world no matter which loop runs it.
FluSystemNoise draw_flu_noise(const FluConfig& cfg, RandomStream& rng);

CanonicalModel<FluSystemState, FluDecision, FluSystemNoise> make_flu_model(
    const FluConfig& cfg);

} // namespace seqdec
