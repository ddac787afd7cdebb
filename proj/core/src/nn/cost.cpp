#include "advforge/nn/cost.hpp"

#include <numeric>

namespace advforge {

std::vector<CostReport> layer_costs(const NetworkSpec& spec) {
  const auto shapes = infer_shapes(spec);
  std::vector<CostReport> costs;
  costs.reserve(spec.layers.size());
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    CostReport cost;
    if (const auto* d = std::get_if<Dense>(&spec.layers[i])) {
      cost.macc_ops = d->in * d->out;
      cost.param_count = d->in * d->out + d->out;
    } else if (const auto* c = std::get_if<Conv2D>(&spec.layers[i])) {
      const Shape& out = shapes[i + 1];
      const std::uint64_t taps = c->kernel * c->kernel * c->in_channels * c->out_channels;
      cost.macc_ops = taps * out[1] * out[2];
      cost.param_count = taps + c->out_channels;
    }
    costs.push_back(cost);
  }
  return costs;
}

CostReport estimate_cost(const NetworkSpec& spec) {
  const auto costs = layer_costs(spec);
  return std::accumulate(costs.begin(), costs.end(), CostReport{});
}

}  // namespace advforge
