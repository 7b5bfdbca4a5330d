#include "entropylab/collapse.hpp"
#include "entropylab/fem.hpp"
#include "entropylab/flow.hpp"
#include "entropylab/mesh.hpp"
#include "entropylab/minimizer.hpp"

#include <benchmark/benchmark.h>

using namespace elab;

static void BM_CsfStep(benchmark::State& state) {
  const Curve c = Curve::ellipse(1.2, 0.8, static_cast<int>(state.range(0)));
  const double dt = max_stable_dt(c);
  for (auto _ : state) benchmark::DoNotOptimize(csf_step(c, dt));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CsfStep)->RangeMultiplier(2)->Range(128, 2048)->Complexity();

static void BM_Triangulate(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const Curve c = Curve::circle(1.0, static_cast<int>(2.0 * kPi / h));
  for (auto _ : state) benchmark::DoNotOptimize(triangulate(c, h));
}
BENCHMARK(BM_Triangulate)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_Assemble(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const TriMesh mesh = triangulate(Curve::circle(1.0, static_cast<int>(2.0 * kPi / h)), h);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(mesh));
  state.counters["nodes"] = mesh.size();
}
BENCHMARK(BM_Assemble)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_Minimize(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const TriMesh mesh = triangulate(Curve::ellipse(1.2, 0.8, static_cast<int>(6.3 / h)), h);
  const FemOperators ops = assemble(mesh);
  const Field beta = curvature_beta(mesh);
  for (auto _ : state) benchmark::DoNotOptimize(minimize(mesh, ops, 0.1, beta));
  state.counters["nodes"] = mesh.size();
}
BENCHMARK(BM_Minimize)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_BallVolumeCatenoid(benchmark::State& state) {
  const CollapseDomain d = AnalyticDomain{Catenoid3D{}};
  for (auto _ : state) benchmark::DoNotOptimize(ball_intersection_volume(d, {0.0, 0.0, 0.0}, 16.0, state.range(0)));
}
BENCHMARK(BM_BallVolumeCatenoid)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_BallVolumeSlab(benchmark::State& state) {
  const CollapseDomain d = AnalyticDomain{Slab{1.0, 2}};
  for (auto _ : state) benchmark::DoNotOptimize(ball_intersection_volume(d, {0.0, 0.0, 0.0}, 64.0));
}
BENCHMARK(BM_BallVolumeSlab)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
