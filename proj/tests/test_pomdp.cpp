#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "seqdec/errors.hpp"
#include "seqdec/pomdp.hpp"
#include "seqdec/pomdp_io.hpp"
#include "seqdec/rng.hpp"

using namespace seqdec;
using testsupport::random_belief;
using testsupport::random_pomdp;

namespace {

// Classic two-state instance used across several cases: a machine that is
// either fine or broken, with a noisy inspection signal.
DiscretePomdp machine_pomdp() {
  DiscretePomdp m;
  m.num_states = 2;
  m.num_actions = 2; // 0 = run, 1 = repair
  m.num_observations = 2;
  m.state_names = {"fine", "broken"};
  m.action_names = {"run", "repair"};
  m.observation_names = {"good", "bad"};
  m.transition.resize(2, Eigen::MatrixXd(2, 2));
  m.transition[0] << 0.9, 0.1, 0.0, 1.0;
  m.transition[1] << 1.0, 0.0, 0.8, 0.2;
  m.observation.resize(2, Eigen::MatrixXd(2, 2));
  m.observation[0] << 0.8, 0.2, 0.3, 0.7;
  m.observation[1] << 0.6, 0.4, 0.4, 0.6;
  m.contribution = Eigen::MatrixXd(2, 2);
  m.contribution << 1.0, -0.5, -1.0, -0.5;
  m.horizon = 3;
  return m;
}

} // namespace

// ---------------------------------------------------------------------------
// validation and construction

TEST_CASE("validate accepts a well-formed model") {
  CHECK_NOTHROW(machine_pomdp().validate());
}

TEST_CASE("validate names the offending tensor and row") {
  DiscretePomdp m = machine_pomdp();
  m.transition[1](0, 0) = 0.5;
  try {
    m.validate();
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    const std::string what = e.what();
    CHECK(what.find("transition") != std::string::npos);
  }

  DiscretePomdp neg = machine_pomdp();
  neg.observation[0](1, 0) = -0.1;
  neg.observation[0](1, 1) = 1.1;
  CHECK_THROWS_AS(neg.validate(), ModelError);

  DiscretePomdp shape = machine_pomdp();
  shape.contribution = Eigen::MatrixXd::Zero(3, 2);
  CHECK_THROWS_AS(shape.validate(), ModelError);

  DiscretePomdp missing = machine_pomdp();
  missing.transition.pop_back();
  CHECK_THROWS_AS(missing.validate(), ModelError);
}

TEST_CASE("transition_from_function pushes noise outcomes through a step map") {
  // Two states, one action, noise outcome 0 keeps the state, outcome 1 flips.
  auto tensors = transition_from_function(2, 1, {0.75, 0.25}, [](int s, int, int k) {
    return k == 0 ? s : 1 - s;
  });
  REQUIRE(tensors.size() == 1);
  CHECK(tensors[0](0, 0) == doctest::Approx(0.75));
  CHECK(tensors[0](0, 1) == doctest::Approx(0.25));
  CHECK(tensors[0](1, 0) == doctest::Approx(0.25));
  CHECK(tensors[0](1, 1) == doctest::Approx(0.75));

  CHECK_THROWS_AS(transition_from_function(2, 1, {0.5, 0.4}, [](int s, int, int) { return s; }),
                  ModelError);
  CHECK_THROWS_AS(transition_from_function(2, 1, {0.5, 0.5}, [](int, int, int) { return 5; }),
                  ModelError);
}

// ---------------------------------------------------------------------------
// Bayes update

TEST_CASE("belief_update matches joint enumeration on random instances") {
  RandomStream rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.uniform_int(4));
    const int a = 1 + static_cast<int>(rng.uniform_int(3));
    const int o = 2 + static_cast<int>(rng.uniform_int(3));
    const DiscretePomdp m = random_pomdp(rng, k, a, o, 1);
    m.validate();
    const BeliefVector b = random_belief(rng, k);
    const int action = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(a)));

    // Oracle: build the joint table p(s', w) = sum_s b(s) T(s, s') O(s', w),
    // then condition on w by a row slice and a division.
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(k, o);
    for (int sp = 0; sp < k; ++sp)
      for (int w = 0; w < o; ++w)
        for (int s = 0; s < k; ++s)
          joint(sp, w) += b(s) * m.transition[action](s, sp) * m.observation[action](sp, w);
    CHECK(joint.sum() == doctest::Approx(1.0).epsilon(1e-12));

    double likelihood_total = 0.0;
    for (int w = 0; w < o; ++w) {
      const double lw = observation_likelihood(m, b, action, w);
      likelihood_total += lw;
      CHECK(lw == doctest::Approx(joint.col(w).sum()).epsilon(1e-12));
      const BeliefVector post = belief_update(m, b, action, w);
      CHECK(post.sum() == doctest::Approx(1.0).epsilon(1e-12));
      for (int sp = 0; sp < k; ++sp)
        CHECK(post(sp) == doctest::Approx(joint(sp, w) / joint.col(w).sum()).epsilon(1e-12));
    }
    CHECK(likelihood_total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("conditioning on an impossible observation throws") {
  DiscretePomdp m = machine_pomdp();
  // Under the repair action, make observation 1 impossible from every state.
  m.observation[1] << 1.0, 0.0, 1.0, 0.0;
  BeliefVector b(2);
  b << 0.5, 0.5;
  CHECK_THROWS_AS(belief_update(m, b, 1, 1), ImpossibleObservationError);
  CHECK(observation_likelihood(m, b, 1, 1) == 0.0);
}

TEST_CASE("belief_contribution is the belief-weighted contribution row") {
  const DiscretePomdp m = machine_pomdp();
  BeliefVector b(2);
  b << 0.25, 0.75;
  CHECK(belief_contribution(m, b, 0) == doctest::Approx(0.25 * 1.0 + 0.75 * -1.0));
  CHECK(belief_contribution(m, b, 1) == doctest::Approx(-0.5));
}

// ---------------------------------------------------------------------------
// exact solver

TEST_CASE("horizon zero has value zero") {
  const DiscretePomdp m = machine_pomdp();
  BeliefVector b(2);
  b << 0.5, 0.5;
  const ExactSolution s = solve_exact_reachable(m, b, 0);
  CHECK(s.value == 0.0);
}

TEST_CASE("horizon one picks the best immediate contribution") {
  const DiscretePomdp m = machine_pomdp();
  BeliefVector b(2);
  b << 0.9, 0.1;
  const ExactSolution s = solve_exact_reachable(m, b, 1);
  CHECK(s.value == doctest::Approx(0.9 * 1.0 + 0.1 * -1.0));
  CHECK(s.first_action == 0);
}

TEST_CASE("exact solver matches brute-force enumeration on random tiny instances") {
  RandomStream rng(707);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + static_cast<int>(rng.uniform_int(2));
    const int a = 2;
    const int o = 2;
    const int t = 1 + static_cast<int>(rng.uniform_int(3));
    const DiscretePomdp m = random_pomdp(rng, k, a, o, t);
    const BeliefVector b = random_belief(rng, k);
    const ExactSolution s = solve_exact_reachable(m, b, t);
    const double brute = brute_force_value(m, b, t);
    CHECK(s.value == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("action ties break to the lowest index") {
  DiscretePomdp m = machine_pomdp();
  // Make both actions identical; any tie must resolve to action 0.
  m.transition[1] = m.transition[0];
  m.observation[1] = m.observation[0];
  m.contribution.col(1) = m.contribution.col(0);
  BeliefVector b(2);
  b << 0.4, 0.6;
  CHECK(solve_exact_reachable(m, b, 3).first_action == 0);
}

TEST_CASE("the exact solver refuses oversized instances") {
  const DiscretePomdp m = machine_pomdp();
  BeliefVector b(2);
  b << 0.5, 0.5;
  CHECK_THROWS_AS(solve_exact_reachable(m, b, 30, 100), SizeError);
  CHECK_THROWS_AS(brute_force_value(m, b, 30, 1000.0), SizeError);
}

TEST_CASE("observing helps: value with informative signal at least matches a blind one") {
  RandomStream rng(808);
  for (int trial = 0; trial < 10; ++trial) {
    DiscretePomdp informative = random_pomdp(rng, 3, 2, 3, 3);
    DiscretePomdp blind = informative;
    for (auto& obs : blind.observation) {
      obs.setZero();
      obs.col(0).setOnes(); // every state emits the same symbol
    }
    const BeliefVector b = random_belief(rng, 3);
    const double vi = solve_exact_reachable(informative, b, 3).value;
    const double vb = solve_exact_reachable(blind, b, 3).value;
    CHECK(vi >= vb - 1e-9);
  }
}

// ---------------------------------------------------------------------------
// grid solver

TEST_CASE("belief grid covers the simplex with unit-sum points") {
  const BeliefGrid g2 = BeliefGrid::make(2, 10);
  CHECK(g2.points.size() == 11);
  const BeliefGrid g3 = BeliefGrid::make(3, 10);
  CHECK(g3.points.size() == 66); // (r+1)(r+2)/2
  for (const auto& p : g3.points) {
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.minCoeff() >= 0.0);
  }
  CHECK_THROWS_AS(BeliefGrid::make(4, 10), ModelError);
}

TEST_CASE("interpolation weights form a convex combination reproducing the query") {
  const BeliefGrid g = BeliefGrid::make(3, 7);
  RandomStream rng(909);
  for (int trial = 0; trial < 50; ++trial) {
    const BeliefVector b = random_belief(rng, 3);
    const auto ws = g.interpolation_weights(b);
    double total = 0.0;
    BeliefVector recon = BeliefVector::Zero(3);
    for (const auto& [idx, w] : ws) {
      CHECK(w >= -1e-12);
      total += w;
      recon += w * g.points[static_cast<std::size_t>(idx)];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((recon - b).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("grid solution approximates the exact value") {
  const DiscretePomdp m = machine_pomdp();
  const GridSolution sol = solve_belief_grid(m, 200, 3);
  const double max_c = m.contribution.cwiseAbs().maxCoeff();
  const double budget = 0.02 * 3 * max_c;
  for (double p = 0.0; p <= 1.0 + 1e-12; p += 0.1) {
    BeliefVector b(2);
    b << 1.0 - p, p;
    const double exact = solve_exact_reachable(m, b, 3).value;
    CHECK(std::abs(sol.value_at(b) - exact) <= budget);
  }
}

TEST_CASE("grid greedy action matches exact at beliefs far from the decision boundary") {
  const DiscretePomdp m = machine_pomdp();
  const GridSolution sol = solve_belief_grid(m, 400, 3);
  BeliefVector sure_fine(2), sure_broken(2);
  sure_fine << 1.0, 0.0;
  sure_broken << 0.0, 1.0;
  CHECK(sol.greedy_at(m, sure_fine) == solve_exact_reachable(m, sure_fine, 3).first_action);
  CHECK(sol.greedy_at(m, sure_broken) == solve_exact_reachable(m, sure_broken, 3).first_action);
}

TEST_CASE("grid value at a grid point equals the stored table entry") {
  const DiscretePomdp m = machine_pomdp();
  const GridSolution sol = solve_belief_grid(m, 50, 2);
  for (std::size_t i = 0; i < sol.grid.points.size(); i += 7)
    CHECK(sol.value_at(sol.grid.points[i]) == doctest::Approx(sol.value[i]).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// JSON round-trip

TEST_CASE("pomdp json round-trips exactly") {
  RandomStream rng(1010);
  const DiscretePomdp m = random_pomdp(rng, 3, 2, 4, 5);
  const std::string text = pomdp_to_json_text(m);
  const DiscretePomdp back = pomdp_from_json_text(text);
  CHECK(back.num_states == m.num_states);
  CHECK(back.num_actions == m.num_actions);
  CHECK(back.num_observations == m.num_observations);
  CHECK(back.horizon == m.horizon);
  CHECK(back.state_names == m.state_names);
  for (int a = 0; a < m.num_actions; ++a) {
    CHECK((back.transition[a] - m.transition[a]).norm() == 0.0);
    CHECK((back.observation[a] - m.observation[a]).norm() == 0.0);
  }
  CHECK((back.contribution - m.contribution).norm() == 0.0);
  // Serialize again: byte-identical.
  CHECK(pomdp_to_json_text(back) == text);
}

TEST_CASE("pomdp json parse errors carry the field name") {
  const std::string good = pomdp_to_json_text(machine_pomdp());
  CHECK_THROWS_AS(pomdp_from_json_text("{"), ModelError);

  std::string no_horizon = good;
  const std::size_t pos = no_horizon.find("\"horizon\"");
  REQUIRE(pos != std::string::npos);
  no_horizon.replace(pos, 9, "\"horizno\"");
  try {
    pomdp_from_json_text(no_horizon);
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    CHECK(std::string(e.what()).find("horiz") != std::string::npos);
  }
}

TEST_CASE("pomdp json file save and load agree with the in-memory model") {
  testsupport::ScratchDir dir("pomdp-io");
  const DiscretePomdp m = machine_pomdp();
  const std::string path = dir.path + "/machine.json";
  save_pomdp_json(m, path);
  const DiscretePomdp back = load_pomdp_json(path);
  BeliefVector b(2);
  b << 0.5, 0.5;
  CHECK(solve_exact_reachable(back, b, 3).value ==
        doctest::Approx(solve_exact_reachable(m, b, 3).value).epsilon(1e-15));
}
