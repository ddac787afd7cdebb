#include <benchmark/benchmark.h>

#include "advforge/nn/loss.hpp"
#include "advforge/nn/network.hpp"
#include "advforge/nn/optimizer.hpp"
#include "advforge/rng.hpp"

namespace {

advforge::Tensor images(std::size_t n) {
  advforge::Tensor x({n, 1, 28, 28});
  advforge::Rng rng(7);
  for (double& v : x.values()) v = rng.uniform();
  return x;
}

std::vector<int> labels(std::size_t n) {
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % 10);
  return y;
}

void BM_VictimForward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto net = advforge::init_network(advforge::default_victim_spec(), 1);
  const auto x = images(n);
  for (auto _ : state) benchmark::DoNotOptimize(advforge::infer_logits(net, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_VictimForward)->Arg(1)->Arg(64)->Arg(1024);

// One SGD step: forward, loss, parameter backward, update.
void BM_VictimTrainStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto net = advforge::init_network(advforge::default_victim_spec(), 1);
  advforge::OptimizerState opt;
  const auto x = images(n);
  const auto y = labels(n);
  for (auto _ : state) {
    const auto acts = advforge::forward(net, x);
    const auto loss = advforge::softmax_cross_entropy(acts.logits(), y);
    const auto grads = advforge::backward(net, acts, loss.dlogits, advforge::GradTarget::kParameters);
    advforge::sgd_step(net, grads, 0.01, 0.9, opt);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_VictimTrainStep)->Arg(64)->Arg(256);

void BM_SmallCnnForward(benchmark::State& state) {
  advforge::NetworkSpec spec;
  spec.input_shape = {1, 28, 28};
  spec.class_count = 10;
  spec.layers = {advforge::Conv2D{1, 8, 3, 1, 0}, advforge::ReLU{}, advforge::MaxPool{2, 2},
                 advforge::Conv2D{8, 16, 3, 1, 0}, advforge::ReLU{}, advforge::MaxPool{2, 2},
                 advforge::Flatten{}, advforge::Dense{400, 10}};
  const auto net = advforge::init_network(spec, 1);
  const auto x = images(64);
  for (auto _ : state) benchmark::DoNotOptimize(advforge::infer_logits(net, x));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_SmallCnnForward);

}  // namespace
