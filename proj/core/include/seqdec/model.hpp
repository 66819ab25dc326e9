#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "seqdec/rng.hpp"

namespace seqdec {

/// Whether larger totals are better or worse for a model's objective.
enum class Sense { Maximize, Minimize };

/// +v for Maximize, -v for Minimize. Policies that pick an argmax over a
/// score use this so one code path serves both senses.
inline double signed_score(Sense sense, double v) {
  return sense == Sense::Maximize ? v : -v;
}

/// How a run is scored: accumulate contributions along the trajectory, or
/// judge only the final design chosen after the experiment budget is spent.
enum class ObjectiveKind { Cumulative, FinalReward };

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::Cumulative;
  /// Final-reward only: number of fresh evaluation draws of the chosen design.
  int test_samples = 1;
};

/// A sequential decision problem in canonical form. The six pieces are plain
/// std::functions so problem families can assemble variants at runtime.
///
/// Timing convention: the decision at t sees only the state at t; the
/// exogenous draw for t+1 happens after the decision and feeds the
/// transition. Contributions are C(S_t, x_t, W_{t+1}).
template <class State, class Decision, class Noise>
struct CanonicalModel {
  std::function<State(RandomStream&)> initial_state;
  std::function<bool(const State&, const Decision&)> feasible;
  /// Human-readable name of the constraint set, used in feasibility errors.
  std::function<std::string(const State&, const Decision&)> violation;
  /// Enumerable candidate decisions, for policies that score a finite set.
  /// May be empty for models whose policies construct decisions directly.
  std::function<std::vector<Decision>(const State&)> candidates;
  std::function<Noise(const State&, const Decision&, RandomStream&)> exogenous;
  std::function<State(const State&, const Decision&, const Noise&)> transition;
  std::function<double(const State&, const Decision&, const Noise&)> contribution;

  int horizon = 0;
  Sense sense = Sense::Maximize;

  /// Flattened numeric views of states/decisions/noise for logging. Field
  /// name vectors and value vectors must agree in length.
  std::vector<std::string> state_fields;
  std::vector<std::string> decision_fields;
  std::vector<std::string> noise_fields;
  std::function<std::vector<double>(const State&)> state_values;
  std::function<std::vector<double>(const Decision&)> decision_values;
  std::function<std::vector<double>(const Noise&)> noise_values;
};

/// One simulated episode, stored in flattened numeric form so trajectories
/// from different problem families share one CSV path.
struct Trajectory {
  struct Record {
    int t = 0;
    std::vector<double> state;
    std::vector<double> decision;
    std::vector<double> noise;
    double contribution = 0.0;
  };

  std::string policy_id;
  std::uint64_t master_seed = 0;
  std::vector<std::string> state_fields;
  std::vector<std::string> decision_fields;
  std::vector<std::string> noise_fields;
  std::vector<Record> records;
  double total = 0.0;
};

} // namespace seqdec
