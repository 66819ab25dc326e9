#include "seqdec/stats.hpp"

#include <cmath>

#include "seqdec/errors.hpp"

namespace seqdec {

double sample_mean(const std::vector<double>& xs) {
  if (xs.empty()) throw Error("sample_mean: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double m = sample_mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

EvalResult summarize(const std::vector<double>& totals) {
  EvalResult r;
  r.replications = static_cast<std::int64_t>(totals.size());
  r.mean = sample_mean(totals);
  r.stddev = std::sqrt(sample_variance(totals));
  r.ci_half_width = kZ95 * r.stddev / std::sqrt(static_cast<double>(totals.size()));
  return r;
}

} // namespace seqdec
