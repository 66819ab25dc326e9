#include "seqdec/tuning.hpp"

#include <algorithm>
#include <utility>

#include "seqdec/csv.hpp"
#include "seqdec/errors.hpp"

namespace seqdec {

namespace {

std::string theta_label(const std::vector<std::string>& names,
                        const std::vector<double>& theta) {
  std::string out = "theta (";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ", ";
    out += names[i] + "=" + format_double(theta[i]);
  }
  return out + ")";
}

/// Strictly better under the sense; equal means fall back to the
/// lexicographically smaller theta so ties resolve the same way on every
/// platform.
bool better(Sense sense, const TuningRow& candidate, const TuningRow& incumbent) {
  const double c = signed_score(sense, candidate.eval.mean);
  const double b = signed_score(sense, incumbent.eval.mean);
  if (c != b) return c > b;
  return std::lexicographical_compare(candidate.theta.begin(), candidate.theta.end(),
                                      incumbent.theta.begin(), incumbent.theta.end());
}

TuningResult evaluate_points(const PolicySpec& base,
                             const std::vector<std::string>& names,
                             const std::vector<std::vector<double>>& points,
                             const TuningObjective& objective) {
  TuningResult result;
  result.parameter_names = names;
  result.sense = objective.sense;
  result.master_seed = objective.master_seed;
  result.table.reserve(points.size());
  for (const auto& theta : points) {
    PolicySpec spec = base;
    for (std::size_t i = 0; i < names.size(); ++i)
      set_policy_param(spec, names[i], theta[i]);
    TuningRow row;
    row.theta = theta;
    try {
      row.eval = objective.evaluate(spec);
    } catch (const Error& e) {
      throw ModelError(theta_label(names, theta) + ": " + e.what());
    }
    if (result.table.empty() || better(result.sense, row, result.table[result.best_index]))
      result.best_index = result.table.size();
    result.table.push_back(std::move(row));
  }
  return result;
}

} // namespace

PolicySpec TuningResult::best_spec(const PolicySpec& base) const {
  PolicySpec spec = base;
  const TuningRow& row = best();
  for (std::size_t i = 0; i < parameter_names.size(); ++i)
    set_policy_param(spec, parameter_names[i], row.theta[i]);
  return spec;
}

std::string TuningResult::to_csv() const {
  std::vector<std::string> header = parameter_names;
  header.insert(header.end(),
                {"mean", "std", "ci_half_width", "replications", "master_seed"});
  CsvWriter csv(std::move(header));
  for (const auto& row : table) {
    std::vector<std::string> cells;
    cells.reserve(row.theta.size() + 5);
    for (double v : row.theta) cells.push_back(format_double(v));
    cells.push_back(format_double(row.eval.mean));
    cells.push_back(format_double(row.eval.stddev));
    cells.push_back(format_double(row.eval.ci_half_width));
    cells.push_back(std::to_string(row.eval.replications));
    cells.push_back(std::to_string(master_seed));
    csv.add_row(std::move(cells));
  }
  return csv.str();
}

TuningResult grid_search(const PolicySpec& base, const TuningDomain& domain,
                         const TuningObjective& objective) {
  if (domain.parameters.empty()) throw ModelError("tuning domain has no parameters");
  std::vector<std::string> names;
  for (const auto& p : domain.parameters) {
    if (p.grid_values.empty())
      throw ModelError("tuning parameter " + p.name + " has an empty grid");
    names.push_back(p.name);
  }

  // Odometer over the grid, first parameter outermost.
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> idx(domain.parameters.size(), 0);
  bool done = false;
  while (!done) {
    std::vector<double> theta(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      theta[i] = domain.parameters[i].grid_values[idx[i]];
    points.push_back(std::move(theta));
    std::size_t i = idx.size();
    for (;;) {
      if (i == 0) {
        done = true;
        break;
      }
      --i;
      if (++idx[i] < domain.parameters[i].grid_values.size()) break;
      idx[i] = 0;
    }
  }

  return evaluate_points(base, names, points, objective);
}

TuningResult random_search(const PolicySpec& base, const TuningDomain& domain,
                           int samples, const TuningObjective& objective) {
  if (domain.parameters.empty()) throw ModelError("tuning domain has no parameters");
  if (samples < 1) throw ModelError("random search needs at least one sample");
  std::vector<std::string> names;
  for (const auto& p : domain.parameters) {
    if (p.lo > p.hi)
      throw ModelError("tuning parameter " + p.name + " has an empty range");
    names.push_back(p.name);
  }

  RandomStream rng(derive_stream(objective.master_seed, 0, "tune-draw"));
  std::vector<std::vector<double>> points;
  points.reserve(static_cast<std::size_t>(samples));
  for (int n = 0; n < samples; ++n) {
    std::vector<double> theta(domain.parameters.size());
    for (std::size_t i = 0; i < theta.size(); ++i)
      theta[i] = rng.uniform(domain.parameters[i].lo, domain.parameters[i].hi);
    points.push_back(std::move(theta));
  }

  return evaluate_points(base, names, points, objective);
}

TuningObjective make_flu_tuning_objective(const FluConfig& cfg, int horizon,
                                          int replications, std::uint64_t master_seed,
                                          bool use_truth) {
  if (replications < 1) throw ModelError("tuning needs at least one replication");
  if (horizon < 0) throw ModelError("horizon must be nonnegative");
  TuningObjective objective;
  objective.sense = Sense::Minimize;
  objective.master_seed = master_seed;
  objective.replications = replications;
  TwoAgentHarness harness(cfg);
  objective.evaluate = [harness = std::move(harness), horizon, replications, master_seed,
                        use_truth](const PolicySpec& spec) {
    FluPolicy policy = make_flu_policy(harness.config(), spec);
    std::vector<double> totals(static_cast<std::size_t>(replications));
    for (int r = 0; r < replications; ++r) {
      const std::uint64_t seed =
          derive_stream(master_seed, static_cast<std::uint64_t>(r), "tune");
      FluEpisode ep = harness.run(policy, policy_tag(spec.kind), seed, horizon);
      totals[static_cast<std::size_t>(r)] =
          use_truth ? ep.truth_objective : ep.trajectory.total;
    }
    return summarize(totals);
  };
  return objective;
}

} // namespace seqdec
