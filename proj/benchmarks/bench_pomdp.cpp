#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "seqdec/pomdp.hpp"
#include "seqdec/rng.hpp"

namespace {

using namespace seqdec;

DiscretePomdp bench_model(int k, int a, int o, int horizon) {
  RandomStream rng(17);
  DiscretePomdp m;
  m.num_states = k;
  m.num_actions = a;
  m.num_observations = o;
  m.horizon = horizon;
  for (int i = 0; i < k; ++i) m.state_names.push_back("s" + std::to_string(i));
  for (int i = 0; i < a; ++i) m.action_names.push_back("a" + std::to_string(i));
  for (int i = 0; i < o; ++i) m.observation_names.push_back("w" + std::to_string(i));
  auto stochastic = [&rng](int rows, int cols) {
    Eigen::MatrixXd mat(rows, cols);
    for (int r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (int c = 0; c < cols; ++c) {
        mat(r, c) = rng.uniform(0.05, 1.0);
        sum += mat(r, c);
      }
      mat.row(r) /= sum;
    }
    return mat;
  };
  for (int act = 0; act < a; ++act) {
    m.transition.push_back(stochastic(k, k));
    m.observation.push_back(stochastic(k, o));
  }
  m.contribution = Eigen::MatrixXd::Zero(k, a);
  for (int s = 0; s < k; ++s)
    for (int act = 0; act < a; ++act) m.contribution(s, act) = rng.uniform(-1.0, 1.0);
  return m;
}

void BM_BeliefUpdate(benchmark::State& state) {
  const DiscretePomdp m = bench_model(static_cast<int>(state.range(0)), 2, 3, 1);
  const BeliefVector b =
      BeliefVector::Constant(m.num_states, 1.0 / m.num_states);
  int w = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(belief_update(m, b, 0, w));
    w = (w + 1) % m.num_observations;
  }
}
BENCHMARK(BM_BeliefUpdate)->Arg(2)->Arg(5)->Arg(20);

void BM_SolveExactReachable(benchmark::State& state) {
  const DiscretePomdp m = bench_model(3, 2, 2, static_cast<int>(state.range(0)));
  const BeliefVector b0 = BeliefVector::Constant(3, 1.0 / 3.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_exact_reachable(m, b0, m.horizon).value);
}
BENCHMARK(BM_SolveExactReachable)->Arg(3)->Arg(5);

void BM_SolveBeliefGrid(benchmark::State& state) {
  const DiscretePomdp m = bench_model(2, 2, 2, 10);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        solve_belief_grid(m, static_cast<int>(state.range(0)), m.horizon).value.size());
}
BENCHMARK(BM_SolveBeliefGrid)->Arg(50)->Arg(200);

} // namespace
