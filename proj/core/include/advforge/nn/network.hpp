#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "advforge/nn/network_spec.hpp"
#include "advforge/nn/tensor.hpp"

namespace advforge {

/// Weights and bias of one parameterized layer.
/// Dense: weight (out, in). Conv2D: weight (out_ch, in_ch, k, k). Bias: (out).
struct LayerParams {
  Tensor weight;
  Tensor bias;
  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

/// A NetworkSpec together with its parameters. Every mutation through
/// mutable_params() issues a fresh stamp, which is how backward() detects
/// activations recorded against an older parameter state.
class Network {
 public:
  Network(NetworkSpec spec, std::vector<LayerParams> params);

  const NetworkSpec& spec() const noexcept { return spec_; }
  std::span<const LayerParams> params() const noexcept { return params_; }
  std::vector<LayerParams>& mutable_params();

  /// Slot in params() for layer `layer_index`, or nullopt for ReLU/pool/flatten.
  std::optional<std::size_t> param_slot(std::size_t layer_index) const;

  std::uint64_t stamp() const noexcept { return stamp_; }
  std::size_t parameter_count() const noexcept;

  /// Per-example input shape (spec().input_shape).
  const Shape& input_shape() const noexcept { return spec_.input_shape; }

 private:
  NetworkSpec spec_;
  std::vector<LayerParams> params_;
  std::vector<std::optional<std::size_t>> slots_;
  std::uint64_t stamp_;
};

bool operator==(const Network& a, const Network& b);

/// Uniform weights in +-sqrt(6 / fan_in), zero biases.
Network init_network(const NetworkSpec& spec, std::uint64_t seed);

/// Everything forward() produced; backward() consumes it.
struct Activations {
  Tensor input;
  std::vector<Tensor> outputs;  // one per layer; back() holds the logits
  std::vector<std::vector<std::uint32_t>> pool_argmax;  // flat input index per pool output
  std::uint64_t stamp = 0;

  const Tensor& logits() const { return outputs.back(); }
};

/// batch has shape (n, input_shape...). Throws kShapeMismatch otherwise.
Activations forward(const Network& net, const Tensor& batch);

/// Logits only, without retaining intermediate activations.
Tensor infer_logits(const Network& net, const Tensor& batch);

enum class GradTarget { kAll, kParameters, kInput };

struct Gradients {
  std::vector<LayerParams> param_grads;  // empty when not requested
  Tensor input_grad;                     // empty when not requested
};

/// Reverse-mode pass for upstream gradient `dlogits`.
Gradients backward(const Network& net, const Activations& acts, const Tensor& dlogits,
                   GradTarget target = GradTarget::kAll);

}  // namespace advforge
