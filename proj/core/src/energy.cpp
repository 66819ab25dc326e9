#include "seqdec/energy.hpp"

#include <cmath>

#include "seqdec/errors.hpp"

namespace seqdec {

namespace {

bool learns(EnergyVariant v) {
  return v == EnergyVariant::PassiveLearning || v == EnergyVariant::ActiveLearning ||
         v == EnergyVariant::RollingForecast;
}

bool ar_price(EnergyVariant v) { return v != EnergyVariant::Base; }

bool has_forecast(EnergyVariant v) { return v == EnergyVariant::RollingForecast; }

constexpr double kStorageTol = 1e-9;

} // namespace

int energy_learning_dim(EnergyVariant v) {
  return v == EnergyVariant::ActiveLearning ? 4 : 3;
}

std::pair<double, std::vector<double>> forecast_roll(const std::vector<double>& forecast,
                                                     double sigma, RandomStream& rng) {
  if (forecast.empty()) throw ModelError("forecast_roll: empty forecast vector");
  if (sigma < 0.0) throw ModelError("forecast_roll: sigma must be nonnegative");
  std::size_t H = forecast.size();
  double realized = forecast[0] + rng.normal(0.0, sigma);
  std::vector<double> next(H);
  for (std::size_t i = 0; i + 1 < H; ++i) {
    double lead = static_cast<double>(i + 1);
    next[i] = forecast[i + 1] + rng.normal(0.0, sigma * std::sqrt(lead));
  }
  next[H - 1] = forecast[H - 1] + rng.normal(0.0, sigma * std::sqrt(static_cast<double>(H)));
  return {realized, std::move(next)};
}

CanonicalModel<EnergyState, double, EnergyNoise> make_energy_model(const EnergyConfig& cfg) {
  if (cfg.storage_max <= 0.0) throw ModelError("energy: storage_max must be positive");
  if (cfg.storage0 < 0.0 || cfg.storage0 > cfg.storage_max)
    throw ModelError("energy: storage0 outside [0, storage_max]");
  if (!(cfg.efficiency > 0.0)) throw ModelError("energy: efficiency must be positive");
  if (cfg.price_sigma < 0.0 || cfg.ar_sigma < 0.0)
    throw ModelError("energy: noise scales must be nonnegative");
  if (has_forecast(cfg.variant) && cfg.forecast_leads < 1)
    throw ModelError("energy: forecast_leads must be >= 1");
  if (!cfg.forecast0.empty() &&
      static_cast<int>(cfg.forecast0.size()) != cfg.forecast_leads)
    throw ModelError("energy: forecast0 must have forecast_leads entries");

  EnergyVariant v = cfg.variant;
  CanonicalModel<EnergyState, double, EnergyNoise> m;
  m.sense = Sense::Minimize;

  m.initial_state = [cfg, v](RandomStream&) {
    EnergyState s;
    s.storage = cfg.storage0;
    s.prices = cfg.price0;
    if (learns(v)) s.rls = RlsState::initial(energy_learning_dim(v), cfg.rls_lambda);
    if (has_forecast(v)) {
      s.energy = cfg.energy0;
      s.forecast = cfg.forecast0.empty()
                       ? std::vector<double>(static_cast<std::size_t>(cfg.forecast_leads),
                                             cfg.energy0)
                       : cfg.forecast0;
    }
    return s;
  };

  m.feasible = [cfg](const EnergyState& s, const double& x) {
    double next = s.storage + cfg.efficiency * x;
    return next >= -kStorageTol && next <= cfg.storage_max + kStorageTol;
  };
  m.violation = [cfg](const EnergyState& s, const double& x) {
    return "storage bound: storage + efficiency*x = " +
           std::to_string(s.storage + cfg.efficiency * x) + " outside [0, " +
           std::to_string(cfg.storage_max) + "]";
  };

  std::vector<double> grid = cfg.decision_grid;
  if (grid.empty()) {
    for (int i = 0; i <= 20; ++i) grid.push_back(-10.0 + i);
  }
  m.candidates = [cfg, grid](const EnergyState& s) {
    std::vector<double> out;
    for (double x : grid) {
      double next = s.storage + cfg.efficiency * x;
      if (next >= -kStorageTol && next <= cfg.storage_max + kStorageTol) out.push_back(x);
    }
    return out;
  };

  m.exogenous = [cfg, v](const EnergyState& s, const double& x, RandomStream& rng) {
    EnergyNoise w;
    if (ar_price(v)) {
      double mean = cfg.ar[0] * s.prices[0] + cfg.ar[1] * s.prices[1] + cfg.ar[2] * s.prices[2];
      if (v == EnergyVariant::ActiveLearning) mean += cfg.impact * x;
      w.price_next = mean + (cfg.ar_sigma > 0.0 ? rng.normal(0.0, cfg.ar_sigma) : 0.0);
    } else {
      w.price_next = rng.normal(cfg.price_mean, cfg.price_sigma);
    }
    if (has_forecast(v)) {
      auto [realized, next] = forecast_roll(s.forecast, cfg.forecast_sigma, rng);
      w.energy_next = realized;
      w.forecast_next = std::move(next);
    }
    return w;
  };

  m.transition = [cfg, v](const EnergyState& s, const double& x, const EnergyNoise& w) {
    EnergyState n = s;
    n.storage = s.storage + cfg.efficiency * x;
    if (n.storage < 0.0) n.storage = 0.0;
    if (n.storage > cfg.storage_max) n.storage = cfg.storage_max;
    n.prices = {w.price_next, s.prices[0], s.prices[1]};
    if (learns(v)) {
      int d = energy_learning_dim(v);
      Eigen::VectorXd p(d);
      p(0) = s.prices[0];
      p(1) = s.prices[1];
      p(2) = s.prices[2];
      if (d == 4) p(3) = x;
      n.rls = rls_update(s.rls, p, w.price_next);
    }
    if (has_forecast(v)) {
      n.energy = w.energy_next;
      n.forecast = w.forecast_next;
    }
    return n;
  };

  m.contribution = [](const EnergyState& s, const double& x, const EnergyNoise&) {
    return s.prices[0] * x;
  };

  m.horizon = 0; // callers pass the horizon to simulate/evaluate

  // Flattened logging schema.
  std::vector<std::string> sf = {"storage", "price", "price_lag1", "price_lag2"};
  if (v == EnergyVariant::Base) sf = {"storage", "price"};
  if (learns(v))
    for (int i = 0; i < energy_learning_dim(v); ++i) sf.push_back("theta" + std::to_string(i));
  if (has_forecast(v)) {
    sf.push_back("energy");
    for (int k = 1; k <= cfg.forecast_leads; ++k) sf.push_back("forecast" + std::to_string(k));
  }
  m.state_fields = sf;
  m.decision_fields = {"x"};
  m.noise_fields = {"price_next"};

  m.state_values = [cfg, v](const EnergyState& s) {
    std::vector<double> out;
    out.push_back(s.storage);
    out.push_back(s.prices[0]);
    if (v != EnergyVariant::Base) {
      out.push_back(s.prices[1]);
      out.push_back(s.prices[2]);
    }
    if (learns(v))
      for (int i = 0; i < s.rls.dim(); ++i) out.push_back(s.rls.theta(i));
    if (has_forecast(v)) {
      out.push_back(s.energy);
      for (double f : s.forecast) out.push_back(f);
    }
    return out;
  };
  m.decision_values = [](const double& x) { return std::vector<double>{x}; };
  m.noise_values = [](const EnergyNoise& w) { return std::vector<double>{w.price_next}; };

  return m;
}

EnergyPolicy make_energy_threshold_policy(const EnergyConfig& cfg, double theta_buy,
                                          double theta_sell) {
  if (!(cfg.efficiency > 0.0)) throw ModelError("energy: efficiency must be positive");
  if (cfg.storage_max <= 0.0) throw ModelError("energy: storage_max must be positive");
  const double eta = cfg.efficiency;
  const double cap = cfg.storage_max;
  return [eta, cap, theta_buy, theta_sell](const EnergyState& s, int) {
    if (s.prices[0] <= theta_buy) return (cap - s.storage) / eta;
    if (s.prices[0] >= theta_sell) return -s.storage / eta;
    return 0.0;
  };
}

} // namespace seqdec
