#pragma once

#include <cmath>
#include <limits>

namespace seqdec {

/// Gaussian belief about a scalar quantity, stored as (mean, precision).
/// precision == 0 encodes a diffuse prior; its standard deviation is +inf.
struct GaussianBelief {
  double mean = 0.0;
  double precision = 0.0;

  double variance() const {
    return precision > 0.0 ? 1.0 / precision : std::numeric_limits<double>::infinity();
  }
  double sigma() const { return std::sqrt(variance()); }
};

/// Belief about a slowly moving trend, tracked with the same conjugate form.
struct DriftBelief {
  double mean = 0.0;
  double precision = 0.0;

  double variance() const {
    return precision > 0.0 ? 1.0 / precision : std::numeric_limits<double>::infinity();
  }
  double sigma() const { return std::sqrt(variance()); }
};

/// Precision-weighted update of a Gaussian belief with an observation W of
/// precision obs_precision:
///
///   mean'      = (precision * mean + obs_precision * W) / (precision + obs_precision)
///   precision' = precision + obs_precision
///
/// A diffuse prior (precision == 0) returns exactly (W, obs_precision).
/// obs_precision must be positive.
GaussianBelief conjugate_update(const GaussianBelief& prior, double w, double obs_precision);

/// Same update, but the prior mean is first shifted down by control_shift
/// (the effect the controller attributes to its own previous decision).
/// Precision is unaffected by the shift.
GaussianBelief conjugate_update_controlled(const GaussianBelief& prior, double w,
                                           double obs_precision, double control_shift);

/// The no-observation counterpart of the controlled update: shift the mean,
/// leave the precision alone.
GaussianBelief shifted(const GaussianBelief& prior, double control_shift);

/// Updates a drift belief from two consecutive observations. The drift sample
/// is w_next - w_prev; it enters with precision obs_precision.
DriftBelief drift_update(const DriftBelief& prior, double w_prev, double w_next,
                         double obs_precision);

} // namespace seqdec
