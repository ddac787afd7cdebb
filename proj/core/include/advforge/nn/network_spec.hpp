#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "advforge/nn/tensor.hpp"

namespace advforge {

struct Dense {
  std::size_t in = 0;
  std::size_t out = 0;
  friend bool operator==(const Dense&, const Dense&) = default;
};

/// Square kernel, symmetric zero padding. Operates on (channels, height, width).
struct Conv2D {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t padding = 0;
  friend bool operator==(const Conv2D&, const Conv2D&) = default;
};

struct ReLU {
  friend bool operator==(const ReLU&, const ReLU&) = default;
};

struct MaxPool {
  std::size_t kernel = 2;
  std::size_t stride = 2;
  friend bool operator==(const MaxPool&, const MaxPool&) = default;
};

struct Flatten {
  friend bool operator==(const Flatten&, const Flatten&) = default;
};

using Layer = std::variant<Dense, Conv2D, ReLU, MaxPool, Flatten>;

/// Layer stack plus the per-example input shape it consumes.
struct NetworkSpec {
  Shape input_shape;
  std::vector<Layer> layers;
  std::size_t class_count = 0;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

const char* layer_kind(const Layer& layer) noexcept;
bool has_parameters(const Layer& layer) noexcept;

/// Output shape of `layer` for a per-example input of shape `in`. Throws
/// kInvalidSpec with `index` in the message when the shapes are incompatible.
Shape layer_output_shape(const Layer& layer, const Shape& in, std::size_t index);

/// Per-example shapes: entry 0 is the input, entry i+1 the output of layer i.
/// Checks layer compatibility only; class_count is not consulted.
std::vector<Shape> infer_shapes(const NetworkSpec& spec);

/// infer_shapes plus the requirement that the final output is {class_count}.
void validate(const NetworkSpec& spec);

/// Compact one-line description, e.g. "in(1x28x28) flatten dense(784,256) relu ...".
std::string describe(const NetworkSpec& spec);

/// Flat-input multilayer perceptron with ReLU between dense layers.
NetworkSpec mlp_spec(std::size_t inputs, const std::vector<std::size_t>& hidden,
                     std::size_t classes);

/// 784-256-128-10 ReLU MLP over 1x28x28 images (leading flatten).
NetworkSpec default_victim_spec();

}  // namespace advforge
