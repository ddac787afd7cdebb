#include "advforge/nn/network_spec.hpp"

#include <sstream>

#include "advforge/error.hpp"

namespace advforge {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void reject(std::size_t index, const Layer& layer, const std::string& why) {
  fail(ErrorKind::kInvalidSpec,
       "layer " + std::to_string(index) + " (" + layer_kind(layer) + "): " + why);
}

}  // namespace

const char* layer_kind(const Layer& layer) noexcept {
  return std::visit(Overloaded{
                        [](const Dense&) { return "dense"; },
                        [](const Conv2D&) { return "conv2d"; },
                        [](const ReLU&) { return "relu"; },
                        [](const MaxPool&) { return "maxpool"; },
                        [](const Flatten&) { return "flatten"; },
                    },
                    layer);
}

bool has_parameters(const Layer& layer) noexcept {
  return std::holds_alternative<Dense>(layer) || std::holds_alternative<Conv2D>(layer);
}

Shape layer_output_shape(const Layer& layer, const Shape& in, std::size_t index) {
  return std::visit(
      Overloaded{
          [&](const Dense& d) -> Shape {
            if (d.in == 0 || d.out == 0) reject(index, layer, "zero width");
            if (in.size() != 1) {
              reject(index, layer, "expects a flat input, got " + to_string(in) +
                                       "; insert a flatten layer");
            }
            if (in[0] != d.in) {
              reject(index, layer, "expects input width " + std::to_string(d.in) + ", got " +
                                       std::to_string(in[0]));
            }
            return {d.out};
          },
          [&](const Conv2D& c) -> Shape {
            if (c.in_channels == 0 || c.out_channels == 0 || c.kernel == 0 || c.stride == 0) {
              reject(index, layer, "channels, kernel and stride must be positive");
            }
            if (in.size() != 3) {
              reject(index, layer, "expects (channels, height, width), got " + to_string(in));
            }
            if (in[0] != c.in_channels) {
              reject(index, layer, "expects " + std::to_string(c.in_channels) +
                                       " input channels, got " + std::to_string(in[0]));
            }
            const std::size_t h = in[1] + 2 * c.padding;
            const std::size_t w = in[2] + 2 * c.padding;
            if (h < c.kernel || w < c.kernel) {
              reject(index, layer, "kernel larger than padded input " + to_string(in));
            }
            return {c.out_channels, (h - c.kernel) / c.stride + 1, (w - c.kernel) / c.stride + 1};
          },
          [&](const ReLU&) -> Shape { return in; },
          [&](const MaxPool& p) -> Shape {
            if (p.kernel == 0 || p.stride == 0) {
              reject(index, layer, "kernel and stride must be positive");
            }
            if (in.size() != 3) {
              reject(index, layer, "expects (channels, height, width), got " + to_string(in));
            }
            if (in[1] < p.kernel || in[2] < p.kernel) {
              reject(index, layer, "window larger than input " + to_string(in));
            }
            return {in[0], (in[1] - p.kernel) / p.stride + 1, (in[2] - p.kernel) / p.stride + 1};
          },
          [&](const Flatten&) -> Shape { return {shape_size(in)}; },
      },
      layer);
}

std::vector<Shape> infer_shapes(const NetworkSpec& spec) {
  if (spec.input_shape.empty() || shape_size(spec.input_shape) == 0) {
    fail(ErrorKind::kInvalidSpec, "input shape " + to_string(spec.input_shape) + " is empty");
  }
  std::vector<Shape> shapes{spec.input_shape};
  shapes.reserve(spec.layers.size() + 1);
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    shapes.push_back(layer_output_shape(spec.layers[i], shapes.back(), i));
  }
  return shapes;
}

void validate(const NetworkSpec& spec) {
  if (spec.class_count == 0) fail(ErrorKind::kInvalidSpec, "class_count must be positive");
  if (spec.layers.empty()) fail(ErrorKind::kInvalidSpec, "network has no layers");
  const auto shapes = infer_shapes(spec);
  if (shapes.back() != Shape{spec.class_count}) {
    fail(ErrorKind::kInvalidSpec,
         "layer " + std::to_string(spec.layers.size() - 1) + " (" +
             layer_kind(spec.layers.back()) + "): final output " + to_string(shapes.back()) +
             " does not match class_count " + std::to_string(spec.class_count));
  }
}

std::string describe(const NetworkSpec& spec) {
  std::ostringstream out;
  out << "in(";
  for (std::size_t i = 0; i < spec.input_shape.size(); ++i) {
    out << (i ? "x" : "") << spec.input_shape[i];
  }
  out << ")";
  for (const auto& layer : spec.layers) {
    out << ' ';
    std::visit(Overloaded{
                   [&](const Dense& d) { out << "dense(" << d.in << ',' << d.out << ')'; },
                   [&](const Conv2D& c) {
                     out << "conv2d(" << c.in_channels << ',' << c.out_channels << ",k"
                         << c.kernel << ",s" << c.stride << ",p" << c.padding << ')';
                   },
                   [&](const ReLU&) { out << "relu"; },
                   [&](const MaxPool& p) { out << "maxpool(k" << p.kernel << ",s" << p.stride << ')'; },
                   [&](const Flatten&) { out << "flatten"; },
               },
               layer);
  }
  out << " classes=" << spec.class_count;
  return out.str();
}

NetworkSpec mlp_spec(std::size_t inputs, const std::vector<std::size_t>& hidden,
                     std::size_t classes) {
  NetworkSpec spec;
  spec.input_shape = {inputs};
  spec.class_count = classes;
  std::size_t width = inputs;
  for (std::size_t h : hidden) {
    spec.layers.emplace_back(Dense{width, h});
    spec.layers.emplace_back(ReLU{});
    width = h;
  }
  spec.layers.emplace_back(Dense{width, classes});
  return spec;
}

NetworkSpec default_victim_spec() {
  NetworkSpec spec = mlp_spec(784, {256, 128}, 10);
  spec.input_shape = {1, 28, 28};
  spec.layers.insert(spec.layers.begin(), Flatten{});
  return spec;
}

}  // namespace advforge
