#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqdec/features.hpp"
#include "seqdec/flu.hpp"

namespace seqdec {

struct VfaFitResult {
  std::vector<std::string> feature_names;
  std::vector<double> theta;
  /// Set when the regression was rank deficient and the solve fell back to
  /// a ridge penalty of 1e-6.
  bool ridge_fallback = false;
  double rmse = 0.0; // in-sample, final sweep
  int sweeps = 0;
  int samples = 0; // regression rows per sweep
};

/// theta' phi(s). A non-finite feature raises ModelError naming it.
double vfa_value(const FeatureSet& fs, const std::vector<double>& theta,
                 const FluControllerState& s);

/// Expected next controller state under a candidate decision. The
/// candidate's own delayed effects (inventory movement, believed
/// vaccination shift) are pulled forward one period, and an observation
/// contributes its deterministic precision gain while leaving the mean at
/// its predictive value. This is the deterministic skeleton the value
/// approximation is evaluated on when scoring candidates.
FluControllerState flu_post_decision(const FluConfig& cfg, const FluControllerState& s,
                                     const FluDecision& x);

/// Candidate minimizing cost(s, x) + theta' phi(post_decision(s, x)).
/// Ties go to the lowest candidate index. theta = 0 reduces to the myopic
/// rule.
FluDecision vfa_decision(const FluConfig& cfg, const FeatureSet& fs,
                         const std::vector<double>& theta, const FluControllerState& s);

/// Picks uniformly among the feasible candidates each period; the draw
/// stream is derived from master_seed with purpose "vfa-explore".
FluPolicy make_random_candidate_policy(const FluConfig& cfg, std::uint64_t master_seed);

/// Fitted value iteration. Simulates `replications` episodes under the
/// exploration policy (episode seeds derive_stream(master_seed, r,
/// "replication")), then for each sweep regresses
///
///   v_t = c_t + theta_prev' phi(S_{t+1})   (v_{T-1} = c_{T-1})
///
/// on phi(S_t) by least squares, starting from theta_prev = 0. A rank
/// deficient system falls back to a ridge solve (lambda = 1e-6) and flags
/// the result.
VfaFitResult vfa_fit(const FluConfig& cfg, const FeatureSet& fs,
                     const FluPolicy& exploration, std::uint64_t master_seed,
                     int replications, int sweeps, int horizon);

} // namespace seqdec
