// Microbenchmarks for the exact-arithmetic hot paths.
#include <benchmark/benchmark.h>

#include "fk/algebra/parse.hpp"
#include "fk/algebra/qfunc.hpp"

using fk::algebra::MultiLaurent;

static void BM_LaurentMultiply(benchmark::State& state) {
  MultiLaurent a = fk::algebra::qq_pochhammer(state.range(0));
  MultiLaurent b = fk::algebra::quantum_factorial(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(a * b);
  }
}
BENCHMARK(BM_LaurentMultiply)->Arg(8)->Arg(16)->Arg(32);

static void BM_PochhammerBuild(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(fk::algebra::qq_pochhammer(state.range(0)));
  }
}
BENCHMARK(BM_PochhammerBuild)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
