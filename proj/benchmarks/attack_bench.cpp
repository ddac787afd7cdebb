#include <benchmark/benchmark.h>

#include "advforge/attack/fgsm.hpp"
#include "advforge/attack/mssim.hpp"
#include "advforge/rng.hpp"

namespace {

advforge::Tensor images(std::size_t n, std::uint64_t seed) {
  advforge::Tensor x({n, 1, 28, 28});
  advforge::Rng rng(seed);
  for (double& v : x.values()) v = rng.uniform();
  return x;
}

void BM_Fgsm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto net = advforge::init_network(advforge::default_victim_spec(), 1);
  const auto x = images(n, 3);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % 10);
  for (auto _ : state) benchmark::DoNotOptimize(advforge::fgsm(net, x, y, advforge::AttackConfig{0.1}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Fgsm)->Arg(64)->Arg(1024);

void BM_Mssim28(benchmark::State& state) {
  const auto a = images(1, 1).reshaped({28, 28});
  const auto b = images(1, 2).reshaped({28, 28});
  for (auto _ : state) benchmark::DoNotOptimize(advforge::mssim(a, b));
}
BENCHMARK(BM_Mssim28);

}  // namespace
