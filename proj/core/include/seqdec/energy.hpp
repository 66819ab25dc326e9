#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "seqdec/model.hpp"
#include "seqdec/rls.hpp"
#include "seqdec/rng.hpp"

namespace seqdec {

/// Battery arbitrage family. Variants add structure one piece at a time:
///   Base             exogenous price draws around a fixed mean
///   ArPrice          third order autoregressive price
///   PassiveLearning  AR price plus recursive least squares on its
///                    coefficients
///   ActiveLearning   the decision itself moves the price (one extra
///                    coefficient), estimated the same way
///   RollingForecast  adds an energy supply process driven by a rolling
///                    forecast vector
enum class EnergyVariant { Base, ArPrice, PassiveLearning, ActiveLearning, RollingForecast };

struct EnergyConfig {
  EnergyVariant variant = EnergyVariant::Base;

  double storage0 = 50.0;
  double storage_max = 100.0;
  double efficiency = 0.9;

  /// Initial price lags: p_t, p_{t-1}, p_{t-2}.
  std::array<double, 3> price0 = {30.0, 30.0, 30.0};

  // Base variant: iid Normal(price_mean, price_sigma^2) draws.
  double price_mean = 30.0;
  double price_sigma = 5.0;

  // AR variants: p_{t+1} = ar[0] p_t + ar[1] p_{t-1} + ar[2] p_{t-2} + eps.
  std::array<double, 3> ar = {0.7, 0.2, 0.05};
  double ar_sigma = 1.0;
  /// ActiveLearning: coefficient of the decision in the price equation.
  double impact = -0.01;

  double rls_lambda = 1e-4;

  // RollingForecast.
  int forecast_leads = 8;
  double forecast_sigma = 1.0;
  double energy0 = 0.0;
  /// Initial forecast vector (lead 1..H). Defaults to energy0 everywhere.
  std::vector<double> forecast0;

  /// Candidate charge rates offered to lookup policies. Filtered for
  /// feasibility per state.
  std::vector<double> decision_grid;
};

struct EnergyState {
  double storage = 0.0;
  std::array<double, 3> prices = {0.0, 0.0, 0.0};
  RlsState rls;           // PassiveLearning, ActiveLearning
  double energy = 0.0;    // RollingForecast
  std::vector<double> forecast;
};

struct EnergyNoise {
  double price_next = 0.0;
  double energy_next = 0.0;
  std::vector<double> forecast_next;
};

/// Advances a rolling forecast one period:
///   realized value    = f[lead 1] + Normal(0, sigma^2)
///   new lead k        = old lead k+1 + Normal(0, k sigma^2), k < H
///   new lead H        = old lead H (flat extrapolation) + Normal(0, H sigma^2)
/// Every lead keeps its conditional mean, so the forecast is a martingale
/// target by target.
std::pair<double, std::vector<double>> forecast_roll(const std::vector<double>& forecast,
                                                     double sigma, RandomStream& rng);

/// Assembles the canonical model for a variant. Decisions are scalar charge
/// rates x: storage moves by efficiency * x, the contribution is the cash
/// flow p_t * x (positive = money spent buying), and the model is minimized.
CanonicalModel<EnergyState, double, EnergyNoise> make_energy_model(const EnergyConfig& cfg);

/// Number of price coefficients estimated in the learning variants
/// (3 lags, plus the impact term for ActiveLearning).
int energy_learning_dim(EnergyVariant v);

using EnergyPolicy = std::function<double(const EnergyState&, int)>;

/// Buy-low/sell-high threshold rule: fill the battery when the price is at
/// or below theta_buy, empty it when the price is at or above theta_sell,
/// hold otherwise. The buy branch is checked first, so overlapping
/// thresholds buy. Both moves land exactly on the storage bounds.
EnergyPolicy make_energy_threshold_policy(const EnergyConfig& cfg, double theta_buy,
                                          double theta_sell);

} // namespace seqdec
