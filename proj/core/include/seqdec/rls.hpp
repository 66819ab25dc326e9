#pragma once

#include <Eigen/Dense>

namespace seqdec {

/// Recursive least squares state: coefficient estimate theta and the
/// covariance-form matrix M. With M0 = (1/lambda) * I and theta0 = 0, the
/// estimate after any number of updates equals the ridge regression solution
///   theta_n = (lambda * I + sum_i p_i p_i^T)^{-1} sum_i p_i y_i,
/// which is the anchor the tests check against.
struct RlsState {
  Eigen::VectorXd theta;
  Eigen::MatrixXd M;

  /// Dimension d, theta = 0, M = (1/lambda) * I.
  static RlsState initial(int dim, double lambda = 1e-4);

  int dim() const { return static_cast<int>(theta.size()); }
};

/// One recursive least squares step with regressors p and response y:
///
///   gamma  = 1 + p^T M p
///   eps    = y - theta^T p
///   M'     = M - (M p p^T M) / gamma
///   theta' = theta + (M p eps) / gamma
///
/// gamma >= 1 always, so the recursion cannot divide by zero. M stays
/// symmetric positive definite; the implementation re-symmetrizes to keep
/// rounding from accumulating.
RlsState rls_update(const RlsState& state, const Eigen::VectorXd& p, double y);

} // namespace seqdec
