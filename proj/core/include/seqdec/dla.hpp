#pragma once

#include <array>
#include <map>
#include <vector>

#include "seqdec/flu.hpp"

namespace seqdec {

/// Quadrature rule for expectations under a standard normal:
/// E[f(Z)] ~ sum_i weights[i] * f(nodes[i]). Weights sum to 1.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights computed from the eigendecomposition of the Hermite
/// Jacobi matrix. Exact for polynomials up to degree 2n-1.
GaussHermite gauss_hermite(int n);

struct DlaConfig {
  int mu_points = 61;   // mean grid on [0, 3 * prior mean]
  int beta_points = 31; // geometric precision grid
  int lookahead = 5;    // modeled future periods
  int gh_points = 7;

  void validate() const;
};

/// Lookahead policy for the belief-state variants (1..3). The drift belief
/// is frozen at its current value, the (mean, precision) belief is
/// discretized, and the resulting finite-horizon model is solved exactly by
/// backward recursion. The decision is the argmin of immediate cost plus
/// the interpolated lookahead value at the successor belief; observation
/// outcomes enter through Gauss-Hermite quadrature over the predictive
/// distribution.
///
/// Solutions are memoized per frozen-belief key; the memo belongs to this
/// instance and is not shared across threads.
class DlaPolicy {
public:
  DlaPolicy(FluConfig cfg, DlaConfig lookahead_cfg);

  FluDecision operator()(const FluControllerState& s, int t);

  /// Set once a queried state fell outside the grid and was clamped.
  bool clamped() const { return clamped_; }
  /// Number of grid solves performed (memo misses), for tests.
  int solves() const { return solves_; }

private:
  struct Solved {
    std::vector<double> mu_grid;
    std::vector<double> beta_grid;
    std::vector<double> value; // final layer, mu-major
  };

  const Solved& solve_for(double delta_bar, double drift_var, double beta0);
  double interpolate(const Solved& sv, double mu, double beta);

  FluConfig cfg_;
  DlaConfig la_;
  GaussHermite gh_;
  double beta_w_ = 0.0;
  std::map<std::array<double, 3>, Solved> memo_;
  bool clamped_ = false;
  int solves_ = 0;
};

} // namespace seqdec
