#include <benchmark/benchmark.h>

#include "advforge/rng.hpp"
#include "advforge/select/selection.hpp"

namespace {

advforge::AccuracyMatrix matrix(std::size_t m, std::size_t n) {
  advforge::AccuracyMatrix a;
  advforge::Rng rng(5);
  for (std::size_t i = 0; i < m; ++i) a.row_strengths.push_back(0.05 * static_cast<double>(i + 1));
  for (std::size_t j = 0; j < n; ++j) a.col_attacks.push_back(0.05 * static_cast<double>(j));
  for (std::size_t k = 0; k < m * n; ++k) a.values.push_back(rng.uniform(0.3, 1.0));
  return a;
}

void BM_RandomWalk(benchmark::State& state) {
  const auto a = matrix(static_cast<std::size_t>(state.range(0)), 7);
  advforge::RandomWalkConfig cfg;
  cfg.threads = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(advforge::random_walk_select(a, cfg));
}
BENCHMARK(BM_RandomWalk)->Args({6, 1})->Args({12, 1})->Args({12, 4});

void BM_BruteForce(benchmark::State& state) {
  const auto a = matrix(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(advforge::brute_force_select(a, 0.01, advforge::CoverageMode::kParallel));
  }
}
BENCHMARK(BM_BruteForce)->Arg(6)->Arg(12);

}  // namespace
