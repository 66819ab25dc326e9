#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "seqdec/flu.hpp"
#include "seqdec/model.hpp"
#include "seqdec/policies.hpp"
#include "seqdec/stats.hpp"

namespace seqdec {

/// One free parameter of a policy family. `name` is routed through
/// set_policy_param, so dotted names reach hybrid components and
/// "weight.f" reaches linear weights. Grid search walks grid_values;
/// random search draws uniformly from [lo, hi].
struct TuningParameter {
  std::string name;
  std::vector<double> grid_values;
  double lo = 0.0;
  double hi = 0.0;
};

struct TuningDomain {
  std::vector<TuningParameter> parameters;
};

/// Maps a fully instantiated policy spec to its estimated objective.
/// Implementations must use the same replication seeds for every spec so
/// candidates are compared under common random numbers.
struct TuningObjective {
  std::function<EvalResult(const PolicySpec&)> evaluate;
  Sense sense = Sense::Minimize;
  std::uint64_t master_seed = 0;
  int replications = 0;
};

struct TuningRow {
  std::vector<double> theta;
  EvalResult eval;
};

struct TuningResult {
  std::vector<std::string> parameter_names;
  std::vector<TuningRow> table;
  std::size_t best_index = 0;
  Sense sense = Sense::Minimize;
  std::uint64_t master_seed = 0;

  const TuningRow& best() const { return table.at(best_index); }

  /// The base spec with the best row's parameters applied.
  PolicySpec best_spec(const PolicySpec& base) const;

  /// Columns: one per parameter, then mean, std, ci_half_width,
  /// replications, master_seed. Rows in evaluation order.
  std::string to_csv() const;
};

/// Evaluates every point of the cartesian grid (first parameter outermost)
/// and returns the full table. Best row under the objective's sense; ties
/// go to the lexicographically smallest theta.
TuningResult grid_search(const PolicySpec& base, const TuningDomain& domain,
                         const TuningObjective& objective);

/// Evaluates `samples` uniform draws from the parameter box. The draw
/// stream is derived from the objective's master seed with purpose
/// "tune-draw", so the sample set is reproducible and independent of the
/// evaluation seeds.
TuningResult random_search(const PolicySpec& base, const TuningDomain& domain,
                           int samples, const TuningObjective& objective);

/// Objective for the flu problem: `replications` episodes with seeds
/// derive_stream(master_seed, r, "tune"), scored on the controller's cost,
/// or on the environment's true prevalence when use_truth is set (the
/// spatial variant tunes against truth; the controller never sees it).
TuningObjective make_flu_tuning_objective(const FluConfig& cfg, int horizon,
                                          int replications, std::uint64_t master_seed,
                                          bool use_truth);

} // namespace seqdec
