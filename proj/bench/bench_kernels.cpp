#include <benchmark/benchmark.h>

#include <vector>

#include "neckflow/evolution.hpp"
#include "neckflow/geometry.hpp"
#include "neckflow/kernels.hpp"

using namespace neckflow;

namespace {

ProfileCurve dumbbell(std::size_t n) {
  return cassini_profile(CassiniShape::from_lambda(0.96), n);
}

kernels::Backend backend_of(const benchmark::State& state) {
  return state.range(1) != 0 ? kernels::Backend::OpenMP : kernels::Backend::Serial;
}

void BM_FlowVelocity(benchmark::State& state) {
  const auto c = dumbbell(static_cast<std::size_t>(state.range(0)));
  std::vector<double> vS(c.size()), vR(c.size());
  const auto backend = backend_of(state);
  for (auto _ : state) {
    auto s = kernels::flow_velocity(c.S, c.R, c.dtheta(), vS, vR, backend);
    benchmark::DoNotOptimize(s);
    benchmark::DoNotOptimize(vS.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CurvatureField(benchmark::State& state) {
  const auto c = dumbbell(static_cast<std::size_t>(state.range(0)));
  const std::size_t n = c.size();
  std::vector<double> ku(n), kp(n), H(n), A2(n), Rsc(n);
  const auto backend = backend_of(state);
  for (auto _ : state) {
    kernels::curvature_field(c.S, c.R, c.dtheta(), ku, kp, H, A2, Rsc, backend);
    benchmark::DoNotOptimize(H.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EulerUpdate(benchmark::State& state) {
  auto c = dumbbell(static_cast<std::size_t>(state.range(0)));
  std::vector<double> vS(c.size()), vR(c.size());
  const auto backend = backend_of(state);
  kernels::flow_velocity(c.S, c.R, c.dtheta(), vS, vR, kernels::Backend::Serial);
  // Tiny step with alternating sign so the curve stays put.
  double dt = 1e-12;
  for (auto _ : state) {
    kernels::euler_update(c.S, c.R, vS, vR, dt, backend);
    dt = -dt;
    benchmark::DoNotOptimize(c.R.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// A full flow step including the reductions and dt selection.
void BM_Step(benchmark::State& state) {
  const auto c = dumbbell(static_cast<std::size_t>(state.range(0)));
  StepControl control;
  control.backend = backend_of(state);
  for (auto _ : state) {
    auto r = step(c, control);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int backend : {0, 1}) {
    for (int n : {400, 1000, 2000, 10000, 100000}) b->Args({n, backend});
  }
  b->ArgNames({"n", "omp"});
}

}  // namespace

BENCHMARK(BM_FlowVelocity)->Apply(sizes);
BENCHMARK(BM_CurvatureField)->Apply(sizes);
BENCHMARK(BM_EulerUpdate)->Apply(sizes);
BENCHMARK(BM_Step)->Apply(sizes);

BENCHMARK_MAIN();
