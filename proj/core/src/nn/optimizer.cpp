#include "advforge/nn/optimizer.hpp"

#include "advforge/error.hpp"

namespace advforge {

void sgd_step(Network& net, const Gradients& grads, double lr, double momentum,
              OptimizerState& state) {
  require(lr > 0.0, ErrorKind::kInvalidArgument, "learning rate must be positive");
  require(momentum >= 0.0 && momentum < 1.0, ErrorKind::kInvalidArgument,
          "momentum must lie in [0, 1)");
  const auto current = net.params();
  require(grads.param_grads.size() == current.size(), ErrorKind::kShapeMismatch,
          "sgd_step: gradients do not cover every parameterized layer");
  for (std::size_t i = 0; i < current.size(); ++i) {
    require(grads.param_grads[i].weight.shape() == current[i].weight.shape() &&
                grads.param_grads[i].bias.shape() == current[i].bias.shape(),
            ErrorKind::kShapeMismatch, "sgd_step: gradient shape mismatch in block " +
                                           std::to_string(i));
  }
  if (state.velocity.empty()) {
    for (const auto& p : current) {
      state.velocity.push_back({Tensor(p.weight.shape()), Tensor(p.bias.shape())});
    }
  }
  require(state.velocity.size() == current.size(), ErrorKind::kShapeMismatch,
          "sgd_step: optimizer state belongs to a different network");

  auto update = [&](Tensor& param, Tensor& velocity, const Tensor& grad) {
    for (std::size_t k = 0; k < param.size(); ++k) {
      velocity[k] = momentum * velocity[k] - lr * grad[k];
      param[k] += velocity[k];
    }
    require(param.all_finite(), ErrorKind::kNumeric, "sgd_step produced non-finite parameters");
  };

  auto& params = net.mutable_params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    update(params[i].weight, state.velocity[i].weight, grads.param_grads[i].weight);
    update(params[i].bias, state.velocity[i].bias, grads.param_grads[i].bias);
  }
}

}  // namespace advforge
