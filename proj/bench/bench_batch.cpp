#include <benchmark/benchmark.h>

#include "offo/batch.hpp"
#include "offo/subsolver.hpp"

namespace {

std::vector<offo::RunSpec> specs() {
  offo::BenchConfig c;
  c.problems = {"beale", "cube", "helix", "tridia", "woods"};
  c.algorithms = {offo::Algorithm::Ar2, offo::Algorithm::Offar2a};
  c.levels = {0.05};
  c.seeds = {1, 2, 3, 4};
  c.max_iter = 5000;
  return offo::expand(c);
}

void BM_BatchSerial(benchmark::State& state) {
  const auto s = specs();
  for (auto _ : state) benchmark::DoNotOptimize(offo::run_batch_serial(s));
}
BENCHMARK(BM_BatchSerial)->Unit(benchmark::kMillisecond);

void BM_BatchParallel(benchmark::State& state) {
  const auto s = specs();
  for (auto _ : state) benchmark::DoNotOptimize(offo::run_batch_parallel(s));
}
BENCHMARK(BM_BatchParallel)->Unit(benchmark::kMillisecond);

void BM_CubicStep(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const offo::Vector g = offo::Vector::LinSpaced(n, -1.0, 1.0);
  offo::Matrix H = offo::Matrix::Identity(n, n);
  H(0, 0) = -2.0;
  for (auto _ : state) benchmark::DoNotOptimize(offo::solve_p2(g, H, 1.5));
}
BENCHMARK(BM_CubicStep)->Arg(2)->Arg(12)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
