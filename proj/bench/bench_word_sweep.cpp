#include "anosov/certify.hpp"
#include "anosov/io.hpp"

#include <benchmark/benchmark.h>

#ifndef ANOSOV_DATA_DIR
#define ANOSOV_DATA_DIR "data"
#endif

using namespace anosov;

namespace {

const SymmetricSet& sl3_set() {
  static const SymmetricSet s = load_matrix_set(std::string(ANOSOV_DATA_DIR) + "/sl3_example.json").power(6);
  return s;
}

void BM_BenoistParallel(benchmark::State& state) {
  const int len = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(benoist_check(sl3_set(), 0.2, len));
}

void BM_BenoistSerial(benchmark::State& state) {
  const int len = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(benoist_check_serial(sl3_set(), 0.2, len));
}

void BM_Alpha1Parallel(benchmark::State& state) {
  const int len = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(alpha1_growth_check(sl3_set(), 0.2, len));
}

void BM_Alpha1Serial(benchmark::State& state) {
  const int len = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(alpha1_growth_check_serial(sl3_set(), 0.2, len));
}

}  // namespace

BENCHMARK(BM_BenoistParallel)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BenoistSerial)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Alpha1Parallel)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Alpha1Serial)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
