#include "seqdec/belief.hpp"

#include "seqdec/errors.hpp"

namespace seqdec {

GaussianBelief conjugate_update(const GaussianBelief& prior, double w, double obs_precision) {
  if (!(obs_precision > 0.0)) throw ModelError("conjugate_update: obs_precision must be > 0");
  if (prior.precision < 0.0) throw ModelError("conjugate_update: negative prior precision");
  GaussianBelief post;
  post.precision = prior.precision + obs_precision;
  // With a diffuse prior the first term vanishes and the result is exactly
  // (w, obs_precision); the denominator is obs_precision > 0.
  post.mean = (prior.precision * prior.mean + obs_precision * w) / post.precision;
  return post;
}

GaussianBelief conjugate_update_controlled(const GaussianBelief& prior, double w,
                                           double obs_precision, double control_shift) {
  GaussianBelief shifted_prior = prior;
  shifted_prior.mean -= control_shift;
  return conjugate_update(shifted_prior, w, obs_precision);
}

GaussianBelief shifted(const GaussianBelief& prior, double control_shift) {
  GaussianBelief b = prior;
  b.mean -= control_shift;
  return b;
}

DriftBelief drift_update(const DriftBelief& prior, double w_prev, double w_next,
                         double obs_precision) {
  if (!(obs_precision > 0.0)) throw ModelError("drift_update: obs_precision must be > 0");
  if (prior.precision < 0.0) throw ModelError("drift_update: negative prior precision");
  double sample = w_next - w_prev;
  DriftBelief post;
  post.precision = prior.precision + obs_precision;
  post.mean = (prior.precision * prior.mean + obs_precision * sample) / post.precision;
  return post;
}

} // namespace seqdec
