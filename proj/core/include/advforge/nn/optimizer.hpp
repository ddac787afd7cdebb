#pragma once

#include <vector>

#include "advforge/nn/network.hpp"

namespace advforge {

/// Momentum buffers, lazily shaped on the first step.
struct OptimizerState {
  std::vector<LayerParams> velocity;
};

/// velocity = momentum * velocity - lr * grad; param += velocity.
void sgd_step(Network& net, const Gradients& grads, double lr, double momentum,
              OptimizerState& state);

}  // namespace advforge
