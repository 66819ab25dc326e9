#include "seqdec/pomdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqdec/errors.hpp"

namespace seqdec {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kBeliefClamp = 1e-15;

void check_row_stochastic(const Eigen::MatrixXd& mat, const std::string& what, int action) {
  for (int r = 0; r < mat.rows(); ++r) {
    double sum = 0.0;
    for (int c = 0; c < mat.cols(); ++c) {
      if (mat(r, c) < 0.0)
        throw ModelError(what + ": negative entry at action " + std::to_string(action) +
                         ", row " + std::to_string(r));
      sum += mat(r, c);
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
      throw ModelError(what + ": row " + std::to_string(r) + " of action " +
                       std::to_string(action) + " sums to " + std::to_string(sum));
  }
}

void check_belief(const DiscretePomdp& m, const BeliefVector& b) {
  if (b.size() != m.num_states) throw ModelError("belief dimension does not match model");
  double sum = 0.0;
  for (int s = 0; s < b.size(); ++s) {
    if (b(s) < -1e-12) throw ModelError("belief has a negative entry");
    sum += b(s);
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ModelError("belief does not sum to one");
}

void check_action(const DiscretePomdp& m, int action) {
  if (action < 0 || action >= m.num_actions) throw ModelError("action index out of range");
}

void check_obs(const DiscretePomdp& m, int obs) {
  if (obs < 0 || obs >= m.num_observations) throw ModelError("observation index out of range");
}

} // namespace

void DiscretePomdp::validate() const {
  if (num_states <= 0 || num_actions <= 0 || num_observations <= 0)
    throw ModelError("DiscretePomdp: all dimensions must be positive");
  if (horizon < 0) throw ModelError("DiscretePomdp: negative horizon");
  if (static_cast<int>(transition.size()) != num_actions)
    throw ModelError("DiscretePomdp: transition tensor must have one matrix per action");
  if (static_cast<int>(observation.size()) != num_actions)
    throw ModelError("DiscretePomdp: observation tensor must have one matrix per action");
  for (int a = 0; a < num_actions; ++a) {
    if (transition[a].rows() != num_states || transition[a].cols() != num_states)
      throw ModelError("DiscretePomdp: transition matrix of action " + std::to_string(a) +
                       " has wrong shape");
    if (observation[a].rows() != num_states || observation[a].cols() != num_observations)
      throw ModelError("DiscretePomdp: observation matrix of action " + std::to_string(a) +
                       " has wrong shape");
    check_row_stochastic(transition[a], "transition", a);
    check_row_stochastic(observation[a], "observation_probs", a);
  }
  if (contribution.rows() != num_states || contribution.cols() != num_actions)
    throw ModelError("DiscretePomdp: contribution matrix has wrong shape");
}

std::vector<Eigen::MatrixXd> transition_from_function(
    int num_states, int num_actions, const std::vector<double>& noise_probs,
    const std::function<int(int, int, int)>& step) {
  if (num_states <= 0 || num_actions <= 0)
    throw ModelError("transition_from_function: dimensions must be positive");
  double total = 0.0;
  for (double p : noise_probs) {
    if (p < 0.0) throw ModelError("transition_from_function: negative noise probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kRowSumTol)
    throw ModelError("transition_from_function: noise probabilities sum to " +
                     std::to_string(total));

  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(num_actions),
                                   Eigen::MatrixXd::Zero(num_states, num_states));
  for (int a = 0; a < num_actions; ++a)
    for (int s = 0; s < num_states; ++s)
      for (std::size_t k = 0; k < noise_probs.size(); ++k) {
        int next = step(s, a, static_cast<int>(k));
        if (next < 0 || next >= num_states)
          throw ModelError("transition_from_function: step returned state out of range");
        out[static_cast<std::size_t>(a)](s, next) += noise_probs[k];
      }
  return out;
}

double observation_likelihood(const DiscretePomdp& m, const BeliefVector& b, int action,
                              int obs) {
  check_belief(m, b);
  check_action(m, action);
  check_obs(m, obs);
  const auto& T = m.transition[static_cast<std::size_t>(action)];
  const auto& O = m.observation[static_cast<std::size_t>(action)];
  Eigen::VectorXd pushed = T.transpose() * b;
  return pushed.dot(O.col(obs));
}

BeliefVector belief_update(const DiscretePomdp& m, const BeliefVector& b, int action, int obs) {
  check_belief(m, b);
  check_action(m, action);
  check_obs(m, obs);
  const auto& T = m.transition[static_cast<std::size_t>(action)];
  const auto& O = m.observation[static_cast<std::size_t>(action)];
  Eigen::VectorXd pushed = T.transpose() * b;
  Eigen::VectorXd unnorm = pushed.cwiseProduct(O.col(obs));
  double like = unnorm.sum();
  if (like <= 0.0)
    throw ImpossibleObservationError("belief_update: observation " + std::to_string(obs) +
                                     " has zero probability under action " +
                                     std::to_string(action));
  BeliefVector post = unnorm / like;
  bool clamped = false;
  for (int s = 0; s < post.size(); ++s)
    if (post(s) < kBeliefClamp && post(s) != 0.0) {
      post(s) = 0.0;
      clamped = true;
    }
  if (clamped) post /= post.sum();
  return post;
}

double belief_contribution(const DiscretePomdp& m, const BeliefVector& b, int action) {
  check_belief(m, b);
  check_action(m, action);
  return b.dot(m.contribution.col(action));
}

namespace {

struct ExactSolver {
  const DiscretePomdp& m;
  std::size_t node_cap;
  std::size_t expanded = 0;

  std::pair<double, std::unique_ptr<PolicyTreeNode>> solve(const BeliefVector& b, int left) {
    if (left == 0) return {0.0, nullptr};
    if (++expanded > node_cap)
      throw SizeError("solve_exact_reachable: belief tree exceeds node cap of " +
                      std::to_string(node_cap));
    double best = 0.0;
    std::unique_ptr<PolicyTreeNode> best_node;
    for (int a = 0; a < m.num_actions; ++a) {
      double q = belief_contribution(m, b, a);
      auto node = std::make_unique<PolicyTreeNode>();
      node->action = a;
      node->children.resize(static_cast<std::size_t>(m.num_observations));
      for (int w = 0; w < m.num_observations; ++w) {
        double like = observation_likelihood(m, b, a, w);
        if (like <= 0.0) continue;
        BeliefVector next = belief_update(m, b, a, w);
        auto [v, child] = solve(next, left - 1);
        q += like * v;
        node->children[static_cast<std::size_t>(w)] = std::move(child);
      }
      if (!best_node || q > best) {
        best = q;
        best_node = std::move(node);
      }
    }
    return {best, std::move(best_node)};
  }
};

} // namespace

ExactSolution solve_exact_reachable(const DiscretePomdp& m, const BeliefVector& b0, int horizon,
                                    std::size_t node_cap) {
  m.validate();
  check_belief(m, b0);
  if (horizon < 0) throw ModelError("solve_exact_reachable: negative horizon");
  ExactSolution sol;
  if (horizon == 0) {
    sol.plan = nullptr;
    sol.first_action = 0;
    sol.value = 0.0;
    return sol;
  }
  ExactSolver solver{m, node_cap};
  auto [v, plan] = solver.solve(b0, horizon);
  sol.value = v;
  sol.first_action = plan->action;
  sol.plan = std::move(plan);
  sol.nodes_expanded = solver.expanded;
  return sol;
}

namespace {

/// Value of a fixed plan, accumulated over unnormalized state distributions.
/// sigma carries P(reach this history, state = s); no normalization happens
/// anywhere on this path.
double plan_value(const DiscretePomdp& m, const std::vector<int>& actions,
                  const std::vector<std::size_t>& level_base, std::size_t node,
                  int depth, int horizon, const Eigen::VectorXd& sigma) {
  int a = actions[node];
  double val = sigma.dot(m.contribution.col(a));
  if (depth + 1 >= horizon) return val;
  const auto& T = m.transition[static_cast<std::size_t>(a)];
  const auto& O = m.observation[static_cast<std::size_t>(a)];
  Eigen::VectorXd pushed = T.transpose() * sigma;
  std::size_t O_count = static_cast<std::size_t>(m.num_observations);
  std::size_t child_base =
      level_base[static_cast<std::size_t>(depth) + 1] +
      (node - level_base[static_cast<std::size_t>(depth)]) * O_count;
  for (int w = 0; w < m.num_observations; ++w) {
    Eigen::VectorXd next = pushed.cwiseProduct(O.col(w));
    if (next.sum() <= 0.0) continue;
    val += plan_value(m, actions, level_base, child_base + static_cast<std::size_t>(w),
                      depth + 1, horizon, next);
  }
  return val;
}

} // namespace

double brute_force_value(const DiscretePomdp& m, const BeliefVector& b0, int horizon,
                         double work_cap) {
  m.validate();
  check_belief(m, b0);
  if (horizon < 0) throw ModelError("brute_force_value: negative horizon");
  if (horizon == 0) return 0.0;

  // History nodes: one per observation prefix of length < horizon.
  std::vector<std::size_t> level_base;
  std::size_t num_nodes = 0;
  std::size_t level_size = 1;
  for (int d = 0; d < horizon; ++d) {
    level_base.push_back(num_nodes);
    num_nodes += level_size;
    level_size *= static_cast<std::size_t>(m.num_observations);
  }

  double plans = std::pow(static_cast<double>(m.num_actions), static_cast<double>(num_nodes));
  if (plans * static_cast<double>(num_nodes) > work_cap)
    throw SizeError("brute_force_value: enumeration would exceed the work cap");

  std::vector<int> actions(num_nodes, 0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    double v = plan_value(m, actions, level_base, 0, 0, horizon, b0);
    if (v > best) best = v;
    // Odometer increment over the action assignment.
    std::size_t i = 0;
    while (i < num_nodes) {
      if (++actions[i] < m.num_actions) break;
      actions[i] = 0;
      ++i;
    }
    if (i == num_nodes) break;
  }
  return best;
}

BeliefGrid BeliefGrid::make(int num_states, int resolution) {
  if (num_states != 2 && num_states != 3)
    throw ModelError("BeliefGrid: only 2 or 3 states are supported");
  if (resolution < 1) throw ModelError("BeliefGrid: resolution must be >= 1");
  BeliefGrid g;
  g.num_states = num_states;
  g.resolution = resolution;
  int n = resolution;
  if (num_states == 2) {
    for (int i = 0; i <= n; ++i) {
      BeliefVector b(2);
      b << static_cast<double>(i) / n, static_cast<double>(n - i) / n;
      g.points.push_back(b);
    }
  } else {
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n - i; ++j) {
        BeliefVector b(3);
        b << static_cast<double>(i) / n, static_cast<double>(j) / n,
            static_cast<double>(n - i - j) / n;
        g.points.push_back(b);
      }
  }
  return g;
}

namespace {

/// Index of grid point (i, j) in the 3-state lattice enumerated as
/// i = 0..n, j = 0..n-i. Points with i + j > n do not exist.
int tri_index(int n, int i, int j) {
  // Row i starts after rows 0..i-1, which hold (n+1) + n + ... + (n+2-i)
  // points.
  int before = i * (n + 1) - i * (i - 1) / 2;
  return before + j;
}

} // namespace

std::vector<std::pair<int, double>> BeliefGrid::interpolation_weights(
    const BeliefVector& b) const {
  if (b.size() != num_states) throw ModelError("interpolation_weights: dimension mismatch");
  int n = resolution;
  std::vector<std::pair<int, double>> out;
  if (num_states == 2) {
    double y = b(0) * n;
    int i0 = static_cast<int>(std::floor(y));
    if (i0 < 0) i0 = 0;
    if (i0 >= n) i0 = n - 1;
    double u = y - i0;
    if (u < 0.0) u = 0.0;
    if (u > 1.0) u = 1.0;
    if (1.0 - u > 0.0) out.emplace_back(i0, 1.0 - u);
    if (u > 0.0) out.emplace_back(i0 + 1, u);
    if (out.empty()) out.emplace_back(i0, 1.0);
    return out;
  }
  // 3 states: locate the cell of the triangular lattice containing
  // (b0, b1) in units of 1/n, then split the cell into its two triangles.
  double y0 = b(0) * n;
  double y1 = b(1) * n;
  int i0 = static_cast<int>(std::floor(y0));
  int j0 = static_cast<int>(std::floor(y1));
  if (i0 < 0) i0 = 0;
  if (j0 < 0) j0 = 0;
  if (i0 > n) i0 = n;
  if (j0 > n - i0) j0 = n - i0;
  double u = y0 - i0;
  double v = y1 - j0;
  if (u < 0.0) u = 0.0;
  if (v < 0.0) v = 0.0;

  auto push = [&](int i, int j, double w) {
    if (w > 0.0) out.emplace_back(tri_index(n, i, j), w);
  };
  if (u + v <= 1.0) {
    push(i0, j0, 1.0 - u - v);
    if (i0 + 1 + j0 <= n) push(i0 + 1, j0, u);
    if (i0 + j0 + 1 <= n) push(i0, j0 + 1, v);
  } else {
    push(i0 + 1, j0 + 1, u + v - 1.0);
    push(i0, j0 + 1, 1.0 - u);
    push(i0 + 1, j0, 1.0 - v);
  }
  if (out.empty()) out.emplace_back(tri_index(n, i0, j0), 1.0);
  // Guard against boundary rounding: renormalize the weights.
  double sum = 0.0;
  for (auto& [idx, w] : out) sum += w;
  for (auto& [idx, w] : out) w /= sum;
  return out;
}

double GridSolution::value_at(const BeliefVector& b) const {
  double v = 0.0;
  for (auto [idx, w] : grid.interpolation_weights(b))
    v += w * value[static_cast<std::size_t>(idx)];
  return v;
}

int GridSolution::greedy_at(const DiscretePomdp& m, const BeliefVector& b) const {
  auto interp_prev = [&](const BeliefVector& nb) {
    double v = 0.0;
    for (auto [idx, w] : grid.interpolation_weights(nb))
      v += w * value_prev[static_cast<std::size_t>(idx)];
    return v;
  };
  int best_a = 0;
  double best_q = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < m.num_actions; ++a) {
    double q = belief_contribution(m, b, a);
    if (horizon > 1) {
      for (int w = 0; w < m.num_observations; ++w) {
        double like = observation_likelihood(m, b, a, w);
        if (like <= 0.0) continue;
        q += like * interp_prev(belief_update(m, b, a, w));
      }
    }
    if (q > best_q) {
      best_q = q;
      best_a = a;
    }
  }
  return best_a;
}

GridSolution solve_belief_grid(const DiscretePomdp& m, int resolution, int horizon) {
  m.validate();
  if (m.num_states != 2 && m.num_states != 3)
    throw ModelError("solve_belief_grid: only 2 or 3 states are supported");
  if (horizon < 0) throw ModelError("solve_belief_grid: negative horizon");

  GridSolution sol;
  sol.grid = BeliefGrid::make(m.num_states, resolution);
  sol.horizon = horizon;
  std::size_t P = sol.grid.points.size();
  sol.value.assign(P, 0.0);
  sol.value_prev.assign(P, 0.0);
  sol.greedy_action.assign(P, 0);

  std::vector<double> prev(P, 0.0);
  std::vector<double> cur(P, 0.0);
  for (int tau = 1; tau <= horizon; ++tau) {
    for (std::size_t g = 0; g < P; ++g) {
      const BeliefVector& b = sol.grid.points[g];
      double best_q = -std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (int a = 0; a < m.num_actions; ++a) {
        double q = belief_contribution(m, b, a);
        if (tau > 1) {
          for (int w = 0; w < m.num_observations; ++w) {
            double like = observation_likelihood(m, b, a, w);
            if (like <= 0.0) continue;
            BeliefVector nb = belief_update(m, b, a, w);
            double v = 0.0;
            for (auto [idx, wt] : sol.grid.interpolation_weights(nb))
              v += wt * prev[static_cast<std::size_t>(idx)];
            q += like * v;
          }
        }
        if (q > best_q) {
          best_q = q;
          best_a = a;
        }
      }
      cur[g] = best_q;
      if (tau == horizon) sol.greedy_action[g] = best_a;
    }
    if (tau == horizon) sol.value_prev = prev;
    std::swap(prev, cur);
  }
  if (horizon > 0) sol.value = prev;
  return sol;
}

} // namespace seqdec
