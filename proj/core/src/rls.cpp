#include "seqdec/rls.hpp"

#include "seqdec/errors.hpp"

namespace seqdec {

RlsState RlsState::initial(int dim, double lambda) {
  if (dim <= 0) throw ModelError("RlsState: dimension must be positive");
  if (!(lambda > 0.0)) throw ModelError("RlsState: lambda must be positive");
  RlsState s;
  s.theta = Eigen::VectorXd::Zero(dim);
  s.M = Eigen::MatrixXd::Identity(dim, dim) / lambda;
  return s;
}

RlsState rls_update(const RlsState& state, const Eigen::VectorXd& p, double y) {
  if (p.size() != state.theta.size())
    throw ModelError("rls_update: regressor dimension mismatch");
  Eigen::VectorXd Mp = state.M * p;
  double gamma = 1.0 + p.dot(Mp);
  double eps = y - state.theta.dot(p);
  RlsState next;
  next.M = state.M - (Mp * Mp.transpose()) / gamma;
  next.M = ((next.M + next.M.transpose()) * 0.5).eval();
  next.theta = state.theta + Mp * (eps / gamma);
  return next;
}

} // namespace seqdec
