#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "seqdec/errors.hpp"
#include "seqdec/model.hpp"
#include "seqdec/rng.hpp"
#include "seqdec/stats.hpp"

namespace seqdec {

/// Runs one episode of `model` under `policy` for `horizon` steps.
///
/// Two substreams are derived from master_seed: "init" for the initial state
/// and "exogenous" for the per-step draws. The loop is: read state, ask the
/// policy, check feasibility, draw noise, record contribution, transition.
/// An infeasible decision raises FeasibilityError naming the step.
template <class State, class Decision, class Noise, class Policy>
Trajectory simulate(const CanonicalModel<State, Decision, Noise>& model, Policy&& policy,
                    const std::string& policy_id, std::uint64_t master_seed, int horizon) {
  RandomStream init_rng(derive_stream(master_seed, 0, "init"));
  RandomStream exo_rng(derive_stream(master_seed, 0, "exogenous"));

  Trajectory traj;
  traj.policy_id = policy_id;
  traj.master_seed = master_seed;
  traj.state_fields = model.state_fields;
  traj.decision_fields = model.decision_fields;
  traj.noise_fields = model.noise_fields;
  traj.records.reserve(static_cast<std::size_t>(horizon));

  State state = model.initial_state(init_rng);
  double total = 0.0;
  for (int t = 0; t < horizon; ++t) {
    Decision x = policy(state, t);
    if (model.feasible && !model.feasible(state, x)) {
      std::string what = model.violation ? model.violation(state, x) : "constraint violated";
      throw FeasibilityError(t, what);
    }
    Noise w = model.exogenous(state, x, exo_rng);
    double c = model.contribution(state, x, w);

    Trajectory::Record rec;
    rec.t = t;
    rec.state = model.state_values(state);
    rec.decision = model.decision_values(x);
    rec.noise = model.noise_values ? model.noise_values(w) : std::vector<double>{};
    rec.contribution = c;
    traj.records.push_back(std::move(rec));

    total += c;
    state = model.transition(state, x, w);
  }
  traj.total = total;
  return traj;
}

/// Mean cumulative contribution over `replications` independent episodes.
/// Episode r uses the substream seed derive_stream(master_seed, r,
/// "replication"), so a fixed (master_seed, r) pair always reproduces the
/// same episode no matter how many replications surround it.
template <class State, class Decision, class Noise, class Policy>
EvalResult evaluate_cumulative(const CanonicalModel<State, Decision, Noise>& model,
                               Policy&& policy, const std::string& policy_id,
                               std::uint64_t master_seed, int replications, int horizon) {
  if (replications <= 0) throw Error("evaluate_cumulative: replications must be positive");
  std::vector<double> totals;
  totals.reserve(static_cast<std::size_t>(replications));
  for (int r = 0; r < replications; ++r) {
    std::uint64_t seed = derive_stream(master_seed, static_cast<std::uint64_t>(r), "replication");
    totals.push_back(simulate(model, policy, policy_id, seed, horizon).total);
  }
  return summarize(totals);
}

} // namespace seqdec
