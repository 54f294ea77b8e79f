#include <benchmark/benchmark.h>

#include <oldroyd/integrator.hpp>
#include <oldroyd/lab.hpp>
#include <oldroyd/random_fields.hpp>

using namespace oldroyd;

namespace {

State sample_state(int n) {
  const Grid g(2, n);
  return State(random_divfree_field(g, 1, -1.0, {1.0, 4.0}), random_symmetric_tensor(g, 2, -1.0, {1.0, 4.0}));
}

void BM_ForwardTransform(benchmark::State& st) {
  const Grid g(2, static_cast<int>(st.range(0)));
  const auto u = as_physical(random_divfree_field(g, 3, -1.0, {1.0, 8.0}));
  for (auto _ : st) benchmark::DoNotOptimize(to_spectral(u));
}
BENCHMARK(BM_ForwardTransform)->RangeMultiplier(2)->Range(64, 512);

void BM_Rhs(benchmark::State& st) {
  const auto s = sample_state(static_cast<int>(st.range(0)));
  ModelParams p;
  p.variant = Variant::generalized_no_damping;
  p.nu = 0.01;
  p.alpha = 1.5;
  for (auto _ : st) benchmark::DoNotOptimize(rhs(s, p));
}
BENCHMARK(BM_Rhs)->RangeMultiplier(2)->Range(64, 256);

void BM_Step(benchmark::State& st) {
  const auto s = sample_state(static_cast<int>(st.range(0)));
  ModelParams p;
  p.variant = Variant::viscous_diffusive;
  p.nu = 0.01;
  StepperConfig c;
  c.dt = 1e-3;
  const Stepper stepper(s.grid(), p, c);
  for (auto _ : st) benchmark::DoNotOptimize(stepper.step(s));
}
BENCHMARK(BM_Step)->RangeMultiplier(2)->Range(64, 256);

void BM_BesovNorm(benchmark::State& st) {
  const Grid g(2, static_cast<int>(st.range(0)));
  const auto u = random_divfree_field(g, 4, -1.0, {1.0, 16.0});
  for (auto _ : st) benchmark::DoNotOptimize(lp::besov_norm(u, 1.0));
}
BENCHMARK(BM_BesovNorm)->RangeMultiplier(2)->Range(64, 256);

void BM_CommutatorRatio(benchmark::State& st) {
  lab::EnsembleSpec spec;
  spec.grid = Grid(2, 64);
  const auto [u, v] = lab::ensemble_pair(spec, 5);
  for (auto _ : st) benchmark::DoNotOptimize(lab::besov_commutator_ratio(u, v, 1.0));
}
BENCHMARK(BM_CommutatorRatio);

}  // namespace

BENCHMARK_MAIN();
