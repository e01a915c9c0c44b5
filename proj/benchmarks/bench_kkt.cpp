#include <benchmark/benchmark.h>

#include "dinicert/kkt.hpp"
#include "dinicert/problems.hpp"

using namespace dinicert;

static void BM_VerifyExample2(benchmark::State& state) {
  const auto inst = example2(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_kkt_certificate(inst.spec, *inst.xhat, *inst.cert).verdict);
  }
}
BENCHMARK(BM_VerifyExample2)->Arg(0)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_VerifyExample1(benchmark::State& state) {
  const auto inst = example1(16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_kkt_certificate(inst.spec, *inst.xhat, *inst.cert).verdict);
  }
}
BENCHMARK(BM_VerifyExample1)->Unit(benchmark::kMillisecond);

static void BM_FindCertificate(benchmark::State& state) {
  const auto inst = example2(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(find_kkt_certificate(inst.spec, *inst.xhat).found());
}
BENCHMARK(BM_FindCertificate)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_SolveTruncated(benchmark::State& state) {
  const auto inst = example2(static_cast<std::size_t>(state.range(0)));
  SolveConfig cfg;
  cfg.starts = 8;
  for (auto _ : state) benchmark::DoNotOptimize(solve_truncated(inst.spec, cfg).objective);
}
BENCHMARK(BM_SolveTruncated)->Arg(2)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_Alternative(benchmark::State& state) {
  const auto inst = random_convex_instance(static_cast<std::uint64_t>(state.range(0)), 3, 2);
  const auto sys = AlternativeSystem::from_problem(inst.spec);
  for (auto _ : state) benchmark::DoNotOptimize(solve_alternative(sys).index());
}
BENCHMARK(BM_Alternative)->Arg(3)->Arg(38)->Unit(benchmark::kMillisecond);
