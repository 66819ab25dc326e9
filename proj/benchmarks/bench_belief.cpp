#include <benchmark/benchmark.h>

#include "seqdec/belief.hpp"
#include "seqdec/rng.hpp"

namespace {

using namespace seqdec;

void BM_ConjugateUpdate(benchmark::State& state) {
  RandomStream rng(1);
  GaussianBelief b{40.0, 0.01};
  for (auto _ : state) {
    b = conjugate_update(b, rng.normal(40.0, 4.0), 1.0 / 16.0);
    benchmark::DoNotOptimize(b);
    if (b.precision > 1e6) b = {40.0, 0.01};
  }
}
BENCHMARK(BM_ConjugateUpdate);

void BM_ControlledUpdate(benchmark::State& state) {
  RandomStream rng(2);
  GaussianBelief b{40.0, 0.01};
  for (auto _ : state) {
    b = conjugate_update_controlled(b, rng.normal(38.0, 4.0), 1.0 / 16.0, 2.0);
    benchmark::DoNotOptimize(b);
    if (b.precision > 1e6) b = {40.0, 0.01};
  }
}
BENCHMARK(BM_ControlledUpdate);

void BM_DriftUpdate(benchmark::State& state) {
  RandomStream rng(3);
  DriftBelief d{0.0, 0.25};
  double prev = 40.0;
  for (auto _ : state) {
    const double next = prev + rng.normal(0.5, 1.0);
    d = drift_update(d, prev, next, 1.0 / 16.0);
    prev = next;
    benchmark::DoNotOptimize(d);
    if (d.precision > 1e6) d = {0.0, 0.25};
  }
}
BENCHMARK(BM_DriftUpdate);

} // namespace
