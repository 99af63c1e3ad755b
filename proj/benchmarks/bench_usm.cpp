#include <benchmark/benchmark.h>

#include "usm/bdris.hpp"
#include "usm/optim.hpp"
#include "usm/rng.hpp"

using namespace usm;

namespace {

CMatrix random_symmetric(int n, uint64_t seed) {
  CounterRng rng(seed);
  CMatrix h = rng.cgaussian_matrix(n, n);
  return h + h.transpose();
}

MimoChannel channel_for(int m) {
  Scenario scn;
  scn.m = m;
  return gen_channels(scn, 1);
}

void bm_takagi(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CMatrix a = random_symmetric(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(takagi(a));
}

void bm_retract(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CMatrix a = random_symmetric(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(retract(a));
}

void bm_geodesic_point(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  UsPoint u = random_point(n, 3);
  CounterRng rng(4);
  TangentDirection dir{&u, RealSym::symmetrize(rng.gaussian_matrix(n, n))};
  GeodesicFrame frame = geodesic_frame(u, dir);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        geodesic_point(frame, RealVector(0.5 * frame.thetas)));
}

void bm_project_tangent(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  UsPoint u = random_point(n, 5);
  CounterRng rng(6);
  CMatrix j = rng.cgaussian_matrix(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(project_tangent(u, j));
}

// One PO outer iteration (gradient, frame, full phase sweep) on the
// full-rank rate problem of size M.
void bm_po_iteration_full(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  MimoChannel ch = channel_for(m);
  auto cost = rate_cost(ch);
  UsPoint u0 = random_point(m, 7);
  OptimConfig cfg;
  cfg.max_iters = 1;
  cfg.eps = 1e-300;
  for (auto _ : state) benchmark::DoNotOptimize(optimize_po(*cost, u0, cfg));
}

// Same iteration on the r = N_t + N_r reduced problem.
void bm_po_iteration_low(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  MimoChannel ch = channel_for(m);
  LowRankReduction red = low_rank_reduce(ch);
  MimoChannel chr = reduced_channel(ch, red);
  auto cost = rate_cost(chr);
  UsPoint u0 = random_point(red.r, 8);
  OptimConfig cfg;
  cfg.max_iters = 1;
  cfg.eps = 1e-300;
  for (auto _ : state) benchmark::DoNotOptimize(optimize_po(*cost, u0, cfg));
}

void bm_low_rank_reduce(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  MimoChannel ch = channel_for(m);
  for (auto _ : state) benchmark::DoNotOptimize(low_rank_reduce(ch));
}

}  // namespace

BENCHMARK(bm_takagi)->Arg(8)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(bm_retract)->Arg(8)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(bm_geodesic_point)->Arg(8)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(bm_project_tangent)->Arg(8)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(bm_po_iteration_full)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(bm_po_iteration_low)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(bm_low_rank_reduce)->Arg(16)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
