#include <benchmark/benchmark.h>

#include "idconc/certify.hpp"

namespace {

using namespace idconc;

void BM_PoissonCdfLarge(benchmark::State& state) {
  const Breakpoint bp = breakpoint(629, BreakpointKind::Upper);
  for (auto _ : state) {
    benchmark::DoNotOptimize(poisson_cdf(bp.lambda, 628).value);
  }
}
BENCHMARK(BM_PoissonCdfLarge);

void BM_SkellamPmf(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(skellam_pmf(lambda, 3).value);
  }
}
BENCHMARK(BM_SkellamPmf)->Arg(2)->Arg(20)->Arg(200);

void BM_QTruncated(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(q_truncated(lambda, 250).value);
  }
}
BENCHMARK(BM_QTruncated)->Arg(2)->Arg(50)->Arg(200);

void BM_GridChunk(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_scan_q(0.5, 2.5, 0.0005, 250, 1).min_value);
  }
}
BENCHMARK(BM_GridChunk);

void BM_ScanG1(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan_g1(8, 119).extremum);
  }
}
BENCHMARK(BM_ScanG1);

void BM_NormalCdf(benchmark::State& state) {
  double x = 0.0;
  for (auto _ : state) {
    x += 1e-6;
    benchmark::DoNotOptimize(normal_cdf(1.0 + x).value);
  }
}
BENCHMARK(BM_NormalCdf);

}  // namespace

BENCHMARK_MAIN();
