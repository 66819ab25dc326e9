#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace seqdec {

using BeliefVector = Eigen::VectorXd;

/// Finite-horizon discrete POMDP. Everything is dense:
///   transition[a](s, s')   state transition given action a
///   observation[a](s', w)  observation probabilities, conditioned on the
///                          post-transition state and the action
///   contribution(s, a)     per-step contribution, maximized
///
/// "No observation" is modeled by a dedicated observation symbol that some
/// action emits with probability one; the solvers need no special case.
struct DiscretePomdp {
  int num_states = 0;
  int num_actions = 0;
  int num_observations = 0;
  std::vector<Eigen::MatrixXd> transition;
  std::vector<Eigen::MatrixXd> observation;
  Eigen::MatrixXd contribution;
  int horizon = 0;

  std::vector<std::string> state_names;
  std::vector<std::string> action_names;
  std::vector<std::string> observation_names;

  /// Checks shapes, row sums (tolerance 1e-12) and nonnegativity.
  /// Throws ModelError naming the offending tensor and row.
  void validate() const;
};

/// Builds transition tensors by pushing every outcome of a finite noise
/// distribution through a deterministic step function.
/// noise_probs must sum to one; step(s, a, k) returns the successor state
/// under noise outcome k.
std::vector<Eigen::MatrixXd> transition_from_function(
    int num_states, int num_actions, const std::vector<double>& noise_probs,
    const std::function<int(int, int, int)>& step);

/// P(w | b, a): the normalizing constant of the Bayes update.
double observation_likelihood(const DiscretePomdp& m, const BeliefVector& b, int action,
                              int obs);

/// Posterior belief after taking `action` in belief `b` and seeing `obs`:
///   b'(s') proportional to P(w | s', a) * sum_s p(s' | s, a) b(s).
/// Entries below 1e-15 are clamped to zero and the vector renormalized.
/// Throws ImpossibleObservationError when the likelihood is zero.
BeliefVector belief_update(const DiscretePomdp& m, const BeliefVector& b, int action, int obs);

/// Expected one-step contribution sum_s b(s) c(s, a).
double belief_contribution(const DiscretePomdp& m, const BeliefVector& b, int action);

/// Conditional plan: an action now plus one subtree per observation.
/// Children of zero-probability observations are null.
struct PolicyTreeNode {
  int action = 0;
  std::vector<std::unique_ptr<PolicyTreeNode>> children;
};

struct ExactSolution {
  double value = 0.0;
  int first_action = 0;
  std::unique_ptr<PolicyTreeNode> plan;
  std::size_t nodes_expanded = 0;
};

/// Optimal finite-horizon value by backward recursion over the reachable
/// belief tree rooted at b0. Ties in the action argmax break to the lowest
/// index. Throws SizeError if more than node_cap beliefs would be expanded.
ExactSolution solve_exact_reachable(const DiscretePomdp& m, const BeliefVector& b0,
                                    int horizon, std::size_t node_cap = 1000000);

/// Independent check of solve_exact_reachable: enumerates every assignment of
/// actions to observation histories and evaluates each plan by exact
/// expectation, carrying unnormalized state distributions so no Bayes
/// normalization is involved. Exponential; meant for tiny instances only
/// (throws SizeError beyond work_cap elementary operations).
double brute_force_value(const DiscretePomdp& m, const BeliefVector& b0, int horizon,
                         double work_cap = 2e9);

/// Fixed-resolution simplex grid over beliefs, for 2 or 3 states.
/// Grid points are multiples of 1/resolution.
struct BeliefGrid {
  int num_states = 0;
  int resolution = 0;
  std::vector<BeliefVector> points;

  /// index/weight pairs of the grid simplex containing b (barycentric
  /// interpolation; weights are nonnegative and sum to one).
  std::vector<std::pair<int, double>> interpolation_weights(const BeliefVector& b) const;

  static BeliefGrid make(int num_states, int resolution);
};

struct GridSolution {
  BeliefGrid grid;
  std::vector<double> value;       // optimal value at each grid point
  std::vector<double> value_prev;  // value with one step fewer, for greedy_at
  std::vector<int> greedy_action;  // first-step greedy at each grid point
  int horizon = 0;

  double value_at(const BeliefVector& b) const;
  /// One-step greedy action at an arbitrary belief, using the stored
  /// next-layer values. Ties break to the lowest action index.
  int greedy_at(const DiscretePomdp& m, const BeliefVector& b) const;
};

/// Approximate solver: value iteration on the simplex grid, off-grid
/// successors handled by barycentric interpolation. num_states must be 2 or 3.
GridSolution solve_belief_grid(const DiscretePomdp& m, int resolution, int horizon);

} // namespace seqdec
