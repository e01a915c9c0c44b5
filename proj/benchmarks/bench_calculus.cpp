#include <benchmark/benchmark.h>

#include "dinicert/calculus.hpp"
#include "dinicert/problems.hpp"

using namespace dinicert;

static void BM_ExactDerivative(benchmark::State& state) {
  const auto inst = example1(static_cast<std::size_t>(state.range(0)));
  const FuncExpr f = inst.spec.family.at(3);
  const TailSeq u = TailSeq::basis(inst.spec.dim(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(dir_deriv_exact(f, *inst.xhat, u));
}
BENCHMARK(BM_ExactDerivative)->Arg(16)->Arg(64);

static void BM_NumericDerivative(benchmark::State& state) {
  const auto inst = example2(static_cast<std::size_t>(state.range(0)));
  const TailSeq u = sample_directions(inst.spec.dim(), 1, 7).back();
  for (auto _ : state) {
    benchmark::DoNotOptimize(dini_upper_numeric(inst.spec.objective, *inst.xhat, u).value);
  }
}
BENCHMARK(BM_NumericDerivative)->Arg(1)->Arg(10);

static void BM_LipschitzSeminorm(benchmark::State& state) {
  const auto inst = example1(16);
  const FuncExpr f = inst.spec.family.at(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lipschitz_seminorm(f, *inst.xhat, 0.5, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_LipschitzSeminorm)->Arg(128)->Arg(512);
