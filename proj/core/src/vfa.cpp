#include "seqdec/vfa.hpp"

#include <cmath>
#include <memory>

#include <Eigen/Dense>

#include "seqdec/errors.hpp"
#include "seqdec/model.hpp"

namespace seqdec {

double vfa_value(const FeatureSet& fs, const std::vector<double>& theta,
                 const FluControllerState& s) {
  if (theta.size() != fs.size())
    throw ModelError("vfa_value: " + std::to_string(theta.size()) + " weights for " +
                     std::to_string(fs.size()) + " features");
  std::vector<double> phi = fs.values(s);
  double v = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) v += theta[i] * phi[i];
  return v;
}

FluControllerState flu_post_decision(const FluConfig& cfg, const FluControllerState& s,
                                     const FluDecision& x) {
  FluControllerState n = s;
  const int v = cfg.variant;
  const double bw = cfg.sigma_w > 0.0 ? 1.0 / (cfg.sigma_w * cfg.sigma_w) : 1e30;

  if (flu_has_inventory(v))
    n.inventory = s.inventory + x.inventory_order - x.total_vaccinate(v);

  if (v >= 4) {
    if (flu_is_spatial(v)) {
      for (std::size_t i = 0; i < n.beliefs.size() && i < x.vac_alloc.size(); ++i)
        n.beliefs[i].mean -= cfg.theta_vac_hat * x.vac_alloc[i];
    } else {
      n.beliefs[0].mean -= cfg.theta_vac_hat * x.vaccinate;
    }
  }

  if (x.observe == 1) {
    std::size_t r = flu_is_spatial(v) ? static_cast<std::size_t>(x.obs_region) : 0;
    // The predictive mean of the observation is the current mean, so the
    // expected posterior mean is unchanged; the precision gain is certain.
    n.beliefs[r].precision += bw;
  }
  return n;
}

FluDecision vfa_decision(const FluConfig& cfg, const FeatureSet& fs,
                         const std::vector<double>& theta, const FluControllerState& s) {
  std::vector<FluDecision> candidates = flu_candidates(cfg, s);
  if (candidates.empty()) throw ModelError("vfa_decision: no feasible candidate");

  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double cost = flu_cost(cfg, s, candidates[i]);
    double value = vfa_value(fs, theta, flu_post_decision(cfg, s, candidates[i]));
    double score = signed_score(Sense::Minimize, cost + value);
    if (i == 0 || score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return candidates[best];
}

FluPolicy make_random_candidate_policy(const FluConfig& cfg, std::uint64_t master_seed) {
  auto rng = std::make_shared<RandomStream>(derive_stream(master_seed, 0, "vfa-explore"));
  return [cfg, rng](const FluControllerState& s, int) {
    std::vector<FluDecision> candidates = flu_candidates(cfg, s);
    if (candidates.empty()) throw ModelError("exploration: no feasible candidate");
    return candidates[static_cast<std::size_t>(rng->uniform_int(candidates.size()))];
  };
}

VfaFitResult vfa_fit(const FluConfig& cfg, const FeatureSet& fs,
                     const FluPolicy& exploration, std::uint64_t master_seed,
                     int replications, int sweeps, int horizon) {
  if (sweeps < 1) throw ModelError("vfa_fit: sweeps must be >= 1");
  if (replications < 1) throw ModelError("vfa_fit: replications must be >= 1");
  if (horizon < 1) throw ModelError("vfa_fit: horizon must be >= 1");

  TwoAgentHarness harness(cfg);
  std::vector<FluTypedEpisode> episodes;
  episodes.reserve(static_cast<std::size_t>(replications));
  for (int r = 0; r < replications; ++r) {
    std::uint64_t seed =
        derive_stream(master_seed, static_cast<std::uint64_t>(r), "replication");
    episodes.push_back(harness.run_typed(exploration, seed, horizon));
  }

  const std::size_t dim = fs.size();
  const std::size_t rows = episodes.size() * static_cast<std::size_t>(horizon);
  Eigen::MatrixXd X(rows, dim);
  Eigen::VectorXd y(rows);

  // Feature rows are fixed across sweeps; only the targets move.
  std::size_t row = 0;
  for (const auto& ep : episodes)
    for (int t = 0; t < horizon; ++t, ++row) {
      std::vector<double> phi = fs.values(ep.states[static_cast<std::size_t>(t)]);
      for (std::size_t j = 0; j < dim; ++j) X(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) = phi[j];
    }

  VfaFitResult result;
  result.feature_names = fs.feature_names();
  result.theta.assign(dim, 0.0);
  result.sweeps = sweeps;
  result.samples = static_cast<int>(rows);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    row = 0;
    for (const auto& ep : episodes)
      for (int t = 0; t < horizon; ++t, ++row) {
        double target = ep.costs[static_cast<std::size_t>(t)];
        if (t + 1 < horizon) {
          std::vector<double> phi_next = fs.values(ep.states[static_cast<std::size_t>(t) + 1]);
          for (std::size_t j = 0; j < dim; ++j)
            target += theta(static_cast<Eigen::Index>(j)) * phi_next[j];
        }
        y(static_cast<Eigen::Index>(row)) = target;
      }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() == static_cast<Eigen::Index>(dim)) {
      theta = qr.solve(y);
    } else {
      Eigen::MatrixXd A = X.transpose() * X;
      A.diagonal().array() += 1e-6;
      theta = A.ldlt().solve(X.transpose() * y);
      result.ridge_fallback = true;
    }
  }

  for (std::size_t j = 0; j < dim; ++j) result.theta[j] = theta(static_cast<Eigen::Index>(j));
  Eigen::VectorXd resid = X * theta - y;
  result.rmse = std::sqrt(resid.squaredNorm() / static_cast<double>(rows));
  return result;
}

} // namespace seqdec
