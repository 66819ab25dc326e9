#include <benchmark/benchmark.h>

#include <memory>

#include "seqdec/flu.hpp"
#include "seqdec/policies.hpp"
#include "seqdec/rng.hpp"

namespace {

using namespace seqdec;

PolicySpec observe_spec(double theta) {
  PolicySpec spec;
  spec.kind = PolicyKind::PfaObserve;
  spec.params["theta_obs"] = theta;
  return spec;
}

void BM_FluEpisodeBeliefVariant(benchmark::State& state) {
  FluConfig cfg;
  cfg.variant = 1;
  TwoAgentHarness harness(cfg);
  const FluPolicy policy = make_flu_policy(cfg, observe_spec(0.1));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        harness.run_typed(policy, ++seed, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_FluEpisodeBeliefVariant)->Arg(50)->Arg(200);

void BM_FluEpisodeSpatial(benchmark::State& state) {
  FluConfig cfg;
  cfg.variant = 6;
  cfg.regions = 3;
  cfg.inventory0 = 40.0;
  cfg.inventory_rate = 20.0;
  PolicySpec spec;
  spec.kind = PolicyKind::CfaIe;
  spec.params["theta_ie"] = 1.0;
  TwoAgentHarness harness(cfg);
  const FluPolicy policy = make_flu_policy(cfg, spec);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        harness.run_typed(policy, ++seed, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_FluEpisodeSpatial)->Arg(50);

void BM_FluCandidateScan(benchmark::State& state) {
  FluConfig cfg;
  cfg.variant = 5;
  cfg.inventory0 = 40.0;
  const FluControllerState s = flu_initial_controller(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(flu_candidates(cfg, s));
}
BENCHMARK(BM_FluCandidateScan);

} // namespace
