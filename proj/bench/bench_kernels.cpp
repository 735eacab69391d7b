// Serial reference vs streamed OpenMP Monte Carlo kernels.
//
// Arguments are {width, replicates}; the OpenMP variants also take a worker
// count. Throughput is reported in network weights drawn per second.

#include <benchmark/benchmark.h>

#include "stablentk/inputs.hpp"
#include "stablentk/montecarlo.hpp"

namespace {

using namespace stablentk;

mc::Batch batch_for(const benchmark::State& state) {
  mc::Batch b;
  b.seed = 7;
  b.tag = 0x6263;
  b.width = static_cast<std::size_t>(state.range(0));
  b.replicates = static_cast<std::size_t>(state.range(1));
  return b;
}

void set_counters(benchmark::State& state, const InputSet& x) {
  const double weights = static_cast<double>(state.range(0)) * static_cast<double>(state.range(1)) *
                         static_cast<double>(x.dim() + 1);
  state.counters["weights/s"] =
      benchmark::Counter(weights * static_cast<double>(state.iterations()), benchmark::Counter::kIsRate);
}

void BM_OutputsSerial(benchmark::State& state) {
  const InputSet x = axis_aligned_inputs(4, 4);
  const mc::Batch b = batch_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(mc::serial::network_outputs(x, 1.5, b));
  set_counters(state, x);
}

void BM_OutputsParallel(benchmark::State& state) {
  const InputSet x = axis_aligned_inputs(4, 4);
  const mc::Batch b = batch_for(state);
  const int workers = static_cast<int>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(mc::network_outputs(x, 1.5, b, workers));
  set_counters(state, x);
}

void BM_KernelsSerial(benchmark::State& state) {
  const InputSet x = axis_aligned_inputs(4, 4);
  const mc::Batch b = batch_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(mc::serial::init_kernels(x, 1.5, b));
  set_counters(state, x);
}

void BM_KernelsParallel(benchmark::State& state) {
  const InputSet x = axis_aligned_inputs(4, 4);
  const mc::Batch b = batch_for(state);
  const int workers = static_cast<int>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(mc::init_kernels(x, 1.5, b, workers));
  set_counters(state, x);
}

BENCHMARK(BM_OutputsSerial)->Args({4096, 64})->Args({65536, 16})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OutputsParallel)->Args({4096, 64, 1})->Args({4096, 64, 0})->Args({65536, 16, 1})->Args({65536, 16, 0})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelsSerial)->Args({4096, 64})->Args({65536, 16})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelsParallel)->Args({4096, 64, 1})->Args({4096, 64, 0})->Args({65536, 16, 1})->Args({65536, 16, 0})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
