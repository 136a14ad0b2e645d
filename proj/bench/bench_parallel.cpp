// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "mpmab/harness.hpp"
#include "mpmab/metagame.hpp"

using namespace mpmab;

namespace {

ExperimentConfig batch() {
  ExperimentConfig c;
  c.T = 20000;
  c.t0 = 3000;
  c.runs = 16;
  return c;
}

void BM_RunsParallel(benchmark::State& state) {
  const auto c = batch();
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c));
}

void BM_RunsSerial(benchmark::State& state) {
  const auto c = batch();
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(c));
}

void BM_AggregateParallel(benchmark::State& state) {
  const auto runs = run_experiment(batch()).runs;
  for (auto _ : state) benchmark::DoNotOptimize(aggregate(runs));
}

void BM_AggregateSerial(benchmark::State& state) {
  const auto runs = run_experiment(batch()).runs;
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_serial(runs));
}

void BM_MetagameParallel(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(verify_bound(h, h));
}

void BM_MetagameSerial(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(verify_bound_serial(h, h));
}

}  // namespace

BENCHMARK(BM_RunsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AggregateParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AggregateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MetagameParallel)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MetagameSerial)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
