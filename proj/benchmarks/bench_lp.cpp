#include <random>

#include <benchmark/benchmark.h>

#include "dinicert/alternative.hpp"
#include "dinicert/lp.hpp"

using namespace dinicert;

namespace {

std::vector<Vector> random_payoffs(std::size_t rows, std::size_t cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Vector> H(rows, Vector(cols));
  for (auto& r : H) {
    for (double& v : r) v = U(rng);
  }
  return H;
}

}  // namespace

static void BM_SolveGame(benchmark::State& state) {
  const auto H = random_payoffs(static_cast<std::size_t>(state.range(0)), 4, 11);
  for (auto _ : state) benchmark::DoNotOptimize(solve_game(H).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveGame)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_FindMultipliers(benchmark::State& state) {
  const auto H = random_payoffs(static_cast<std::size_t>(state.range(0)), 6, 5);
  for (auto _ : state) benchmark::DoNotOptimize(find_multipliers(H).has_value());
}
BENCHMARK(BM_FindMultipliers)->Arg(64)->Arg(256);
