#pragma once

#include <cstdint>
#include <vector>

namespace seqdec {

/// Aggregate of a set of replication totals: sample mean, sample standard
/// deviation (n-1 denominator, zero when n == 1) and a normal-approximation
/// 95% confidence half-width.
struct EvalResult {
  double mean = 0.0;
  double stddev = 0.0;
  double ci_half_width = 0.0;
  std::int64_t replications = 0;
};

/// z such that P(|Z| <= z) = 0.95 for standard normal Z.
inline constexpr double kZ95 = 1.959963984540054;

EvalResult summarize(const std::vector<double>& totals);

double sample_mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);

} // namespace seqdec
