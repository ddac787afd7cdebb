#include "advforge/nn/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include <Eigen/Core>

#include "advforge/error.hpp"
#include "advforge/rng.hpp"

namespace advforge {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

std::uint64_t next_stamp() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

Shape batched(std::size_t n, const Shape& example) {
  Shape shape{n};
  shape.insert(shape.end(), example.begin(), example.end());
  return shape;
}

Shape expected_param_shape(const Layer& layer, bool weight) {
  if (const auto* d = std::get_if<Dense>(&layer)) {
    return weight ? Shape{d->out, d->in} : Shape{d->out};
  }
  const auto& c = std::get<Conv2D>(layer);
  return weight ? Shape{c.out_channels, c.in_channels, c.kernel, c.kernel}
                : Shape{c.out_channels};
}

// Geometry of one convolution for a single example.
struct ConvGeometry {
  std::size_t channels, height, width;
  std::size_t out_height, out_width;
  std::size_t kernel, stride, padding;

  std::size_t patch() const { return channels * kernel * kernel; }
  std::size_t positions() const { return out_height * out_width; }
};

ConvGeometry conv_geometry(const Conv2D& conv, const Shape& in, const Shape& out) {
  return {in[0], in[1], in[2], out[1], out[2], conv.kernel, conv.stride, conv.padding};
}

// cols is (patch, positions), row-major.
void im2col(const double* image, const ConvGeometry& g, double* cols) {
  const std::size_t positions = g.positions();
  for (std::size_t c = 0; c < g.channels; ++c) {
    for (std::size_t ky = 0; ky < g.kernel; ++ky) {
      for (std::size_t kx = 0; kx < g.kernel; ++kx) {
        double* dst = cols + ((c * g.kernel + ky) * g.kernel + kx) * positions;
        for (std::size_t oy = 0; oy < g.out_height; ++oy) {
          const auto y = static_cast<std::ptrdiff_t>(oy * g.stride + ky) -
                         static_cast<std::ptrdiff_t>(g.padding);
          for (std::size_t ox = 0; ox < g.out_width; ++ox) {
            const auto x = static_cast<std::ptrdiff_t>(ox * g.stride + kx) -
                           static_cast<std::ptrdiff_t>(g.padding);
            const bool inside = y >= 0 && x >= 0 && y < static_cast<std::ptrdiff_t>(g.height) &&
                                x < static_cast<std::ptrdiff_t>(g.width);
            dst[oy * g.out_width + ox] =
                inside ? image[(c * g.height + static_cast<std::size_t>(y)) * g.width +
                               static_cast<std::size_t>(x)]
                       : 0.0;
          }
        }
      }
    }
  }
}

void col2im_add(const double* cols, const ConvGeometry& g, double* image) {
  const std::size_t positions = g.positions();
  for (std::size_t c = 0; c < g.channels; ++c) {
    for (std::size_t ky = 0; ky < g.kernel; ++ky) {
      for (std::size_t kx = 0; kx < g.kernel; ++kx) {
        const double* src = cols + ((c * g.kernel + ky) * g.kernel + kx) * positions;
        for (std::size_t oy = 0; oy < g.out_height; ++oy) {
          const auto y = static_cast<std::ptrdiff_t>(oy * g.stride + ky) -
                         static_cast<std::ptrdiff_t>(g.padding);
          if (y < 0 || y >= static_cast<std::ptrdiff_t>(g.height)) continue;
          for (std::size_t ox = 0; ox < g.out_width; ++ox) {
            const auto x = static_cast<std::ptrdiff_t>(ox * g.stride + kx) -
                           static_cast<std::ptrdiff_t>(g.padding);
            if (x < 0 || x >= static_cast<std::ptrdiff_t>(g.width)) continue;
            image[(c * g.height + static_cast<std::size_t>(y)) * g.width +
                  static_cast<std::size_t>(x)] += src[oy * g.out_width + ox];
          }
        }
      }
    }
  }
}

void dense_forward(const Tensor& in, const LayerParams& p, Tensor& out) {
  const auto n = static_cast<Eigen::Index>(in.dim(0));
  const auto fan_in = static_cast<Eigen::Index>(p.weight.dim(1));
  const auto fan_out = static_cast<Eigen::Index>(p.weight.dim(0));
  ConstMatrixMap x(in.data(), n, fan_in);
  ConstMatrixMap w(p.weight.data(), fan_out, fan_in);
  ConstVectorMap b(p.bias.data(), fan_out);
  MatrixMap y(out.data(), n, fan_out);
  y.noalias() = x * w.transpose();
  y.rowwise() += b.transpose();
}

void conv_forward(const Tensor& in, const LayerParams& p, const ConvGeometry& g, Tensor& out) {
  const std::size_t n = in.dim(0);
  const auto oc = static_cast<Eigen::Index>(p.weight.dim(0));
  const auto patch = static_cast<Eigen::Index>(g.patch());
  const auto positions = static_cast<Eigen::Index>(g.positions());
  ConstMatrixMap w(p.weight.data(), oc, patch);
  ConstVectorMap b(p.bias.data(), oc);
  RowMatrix cols(patch, positions);
  for (std::size_t i = 0; i < n; ++i) {
    im2col(in.row(i).data(), g, cols.data());
    MatrixMap y(out.row(i).data(), oc, positions);
    y.noalias() = w * cols;
    y.colwise() += b;
  }
}

void maxpool_forward(const Tensor& in, const MaxPool& pool, Tensor& out,
                     std::vector<std::uint32_t>& argmax) {
  const std::size_t n = in.dim(0);
  const std::size_t channels = in.dim(1), height = in.dim(2), width = in.dim(3);
  const std::size_t out_h = out.dim(2), out_w = out.dim(3);
  argmax.resize(out.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* image = in.row(i).data();
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t oy = 0; oy < out_h; ++oy) {
        for (std::size_t ox = 0; ox < out_w; ++ox, ++k) {
          std::size_t best = (c * height + oy * pool.stride) * width + ox * pool.stride;
          for (std::size_t ky = 0; ky < pool.kernel; ++ky) {
            for (std::size_t kx = 0; kx < pool.kernel; ++kx) {
              const std::size_t idx =
                  (c * height + oy * pool.stride + ky) * width + ox * pool.stride + kx;
              if (image[idx] > image[best]) best = idx;
            }
          }
          out[k] = image[best];
          argmax[k] = static_cast<std::uint32_t>(best);
        }
      }
    }
  }
}

// Runs layer `index`; pool_argmax is only filled for MaxPool layers.
void run_layer(const Network& net, std::size_t index, const Tensor& in, const Shape& in_shape,
               const Shape& out_shape, Tensor& out, std::vector<std::uint32_t>& pool_argmax) {
  const Layer& layer = net.spec().layers[index];
  const std::size_t n = in.dim(0);
  out = Tensor(batched(n, out_shape));
  if (std::holds_alternative<Dense>(layer)) {
    dense_forward(in, net.params()[*net.param_slot(index)], out);
  } else if (const auto* conv = std::get_if<Conv2D>(&layer)) {
    conv_forward(in, net.params()[*net.param_slot(index)],
                 conv_geometry(*conv, in_shape, out_shape), out);
  } else if (std::holds_alternative<ReLU>(layer)) {
    std::transform(in.values().begin(), in.values().end(), out.values().begin(),
                   [](double v) { return v > 0.0 ? v : 0.0; });
  } else if (const auto* pool = std::get_if<MaxPool>(&layer)) {
    maxpool_forward(in, *pool, out, pool_argmax);
  } else {
    std::copy(in.values().begin(), in.values().end(), out.values().begin());
  }
}

void check_batch(const Network& net, const Tensor& batch) {
  const Shape& example = net.input_shape();
  const bool ok = batch.rank() == example.size() + 1 &&
                  std::equal(example.begin(), example.end(), batch.shape().begin() + 1);
  require(ok, ErrorKind::kShapeMismatch,
          "forward: expected batch shape " + to_string(batched(batch.rank() ? batch.dim(0) : 0, example)) +
              ", got " + to_string(batch.shape()));
  require(batch.all_finite(), ErrorKind::kNumeric, "forward: batch contains non-finite values");
}

}  // namespace

Network::Network(NetworkSpec spec, std::vector<LayerParams> params)
    : spec_(std::move(spec)), params_(std::move(params)), stamp_(next_stamp()) {
  validate(spec_);
  slots_.resize(spec_.layers.size());
  std::size_t slot = 0;
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    if (!has_parameters(spec_.layers[i])) continue;
    require(slot < params_.size(), ErrorKind::kShapeMismatch,
            "layer " + std::to_string(i) + ": missing parameters");
    const Shape w_shape = expected_param_shape(spec_.layers[i], true);
    const Shape b_shape = expected_param_shape(spec_.layers[i], false);
    require(params_[slot].weight.shape() == w_shape && params_[slot].bias.shape() == b_shape,
            ErrorKind::kShapeMismatch,
            "layer " + std::to_string(i) + ": parameter shapes " +
                to_string(params_[slot].weight.shape()) + "/" +
                to_string(params_[slot].bias.shape()) + " do not match " + to_string(w_shape) +
                "/" + to_string(b_shape));
    require(params_[slot].weight.all_finite() && params_[slot].bias.all_finite(),
            ErrorKind::kNumeric, "layer " + std::to_string(i) + ": non-finite parameters");
    slots_[i] = slot++;
  }
  require(slot == params_.size(), ErrorKind::kShapeMismatch,
          "got " + std::to_string(params_.size()) + " parameter blocks for " +
              std::to_string(slot) + " parameterized layers");
}

std::vector<LayerParams>& Network::mutable_params() {
  stamp_ = next_stamp();
  return params_;
}

std::optional<std::size_t> Network::param_slot(std::size_t layer_index) const {
  return slots_.at(layer_index);
}

std::size_t Network::parameter_count() const noexcept {
  std::size_t total = 0;
  for (const auto& p : params_) total += p.weight.size() + p.bias.size();
  return total;
}

bool operator==(const Network& a, const Network& b) {
  return a.spec() == b.spec() && std::ranges::equal(a.params(), b.params());
}

Network init_network(const NetworkSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  std::vector<LayerParams> params;
  for (const Layer& layer : spec.layers) {
    if (!has_parameters(layer)) continue;
    LayerParams p{Tensor(expected_param_shape(layer, true)),
                  Tensor(expected_param_shape(layer, false))};
    const std::size_t fan_in = p.weight.size() / p.weight.dim(0);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (double& w : p.weight.values()) w = rng.uniform(-bound, bound);
    params.push_back(std::move(p));
  }
  return Network(spec, std::move(params));
}

Activations forward(const Network& net, const Tensor& batch) {
  check_batch(net, batch);
  const auto shapes = infer_shapes(net.spec());
  const std::size_t layers = net.spec().layers.size();
  Activations acts;
  acts.input = batch;
  acts.outputs.resize(layers);
  acts.pool_argmax.resize(layers);
  acts.stamp = net.stamp();
  for (std::size_t i = 0; i < layers; ++i) {
    const Tensor& in = i == 0 ? acts.input : acts.outputs[i - 1];
    run_layer(net, i, in, shapes[i], shapes[i + 1], acts.outputs[i], acts.pool_argmax[i]);
  }
  require(acts.logits().all_finite(), ErrorKind::kNumeric, "forward produced non-finite logits");
  return acts;
}

Tensor infer_logits(const Network& net, const Tensor& batch) {
  check_batch(net, batch);
  const auto shapes = infer_shapes(net.spec());
  Tensor current = batch;
  Tensor next;
  std::vector<std::uint32_t> scratch;
  for (std::size_t i = 0; i < net.spec().layers.size(); ++i) {
    run_layer(net, i, current, shapes[i], shapes[i + 1], next, scratch);
    std::swap(current, next);
  }
  require(current.all_finite(), ErrorKind::kNumeric, "forward produced non-finite logits");
  return current;
}

Gradients backward(const Network& net, const Activations& acts, const Tensor& dlogits,
                   GradTarget target) {
  const auto& layers = net.spec().layers;
  require(acts.stamp == net.stamp() && acts.outputs.size() == layers.size(),
          ErrorKind::kInvalidArgument,
          "backward: activations were not produced by this network state");
  require(dlogits.shape() == acts.logits().shape(), ErrorKind::kShapeMismatch,
          "backward: dlogits shape " + to_string(dlogits.shape()) + " does not match logits " +
              to_string(acts.logits().shape()));

  const bool want_params = target != GradTarget::kInput;
  const bool want_input = target != GradTarget::kParameters;
  const auto shapes = infer_shapes(net.spec());
  const std::size_t n = acts.input.dim(0);

  Gradients grads;
  if (want_params) {
    for (const auto& p : net.params()) {
      grads.param_grads.push_back({Tensor(p.weight.shape()), Tensor(p.bias.shape())});
    }
  }

  // The earliest layer whose input gradient is needed.
  std::size_t stop = 0;
  if (!want_input) {
    stop = layers.size();
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (has_parameters(layers[i])) {
        stop = i;
        break;
      }
    }
  }

  Tensor upstream = dlogits;
  for (std::size_t i = layers.size(); i-- > 0;) {
    const Tensor& in = i == 0 ? acts.input : acts.outputs[i - 1];
    const bool propagate = i > stop || want_input;
    Tensor dx;
    if (propagate) dx = Tensor(in.shape());

    if (std::holds_alternative<Dense>(layers[i])) {
      const std::size_t slot = *net.param_slot(i);
      const LayerParams& p = net.params()[slot];
      const auto rows = static_cast<Eigen::Index>(n);
      const auto fan_in = static_cast<Eigen::Index>(p.weight.dim(1));
      const auto fan_out = static_cast<Eigen::Index>(p.weight.dim(0));
      ConstMatrixMap dy(upstream.data(), rows, fan_out);
      ConstMatrixMap w(p.weight.data(), fan_out, fan_in);
      if (want_params) {
        ConstMatrixMap x(in.data(), rows, fan_in);
        MatrixMap dw(grads.param_grads[slot].weight.data(), fan_out, fan_in);
        VectorMap db(grads.param_grads[slot].bias.data(), fan_out);
        dw.noalias() = dy.transpose() * x;
        db = dy.colwise().sum().transpose();
      }
      if (propagate) {
        MatrixMap(dx.data(), rows, fan_in).noalias() = dy * w;
      }
    } else if (const auto* conv = std::get_if<Conv2D>(&layers[i])) {
      const std::size_t slot = *net.param_slot(i);
      const LayerParams& p = net.params()[slot];
      const ConvGeometry g = conv_geometry(*conv, shapes[i], shapes[i + 1]);
      const auto oc = static_cast<Eigen::Index>(p.weight.dim(0));
      const auto patch = static_cast<Eigen::Index>(g.patch());
      const auto positions = static_cast<Eigen::Index>(g.positions());
      ConstMatrixMap w(p.weight.data(), oc, patch);
      RowMatrix cols(patch, positions);
      RowMatrix dcols(patch, positions);
      for (std::size_t e = 0; e < n; ++e) {
        ConstMatrixMap dy(upstream.row(e).data(), oc, positions);
        if (want_params) {
          im2col(in.row(e).data(), g, cols.data());
          MatrixMap dw(grads.param_grads[slot].weight.data(), oc, patch);
          VectorMap db(grads.param_grads[slot].bias.data(), oc);
          dw.noalias() += dy * cols.transpose();
          db += dy.rowwise().sum();
        }
        if (propagate) {
          dcols.noalias() = w.transpose() * dy;
          col2im_add(dcols.data(), g, dx.row(e).data());
        }
      }
    } else if (propagate) {
      if (std::holds_alternative<ReLU>(layers[i])) {
        for (std::size_t k = 0; k < dx.size(); ++k) dx[k] = in[k] > 0.0 ? upstream[k] : 0.0;
      } else if (std::holds_alternative<MaxPool>(layers[i])) {
        const auto& argmax = acts.pool_argmax[i];
        const std::size_t out_stride = upstream.row_size();
        const std::size_t in_stride = dx.row_size();
        for (std::size_t e = 0; e < n; ++e) {
          for (std::size_t k = 0; k < out_stride; ++k) {
            dx[e * in_stride + argmax[e * out_stride + k]] += upstream[e * out_stride + k];
          }
        }
      } else {
        std::copy(upstream.values().begin(), upstream.values().end(), dx.values().begin());
      }
    }
    if (!propagate) break;
    upstream = std::move(dx);
  }

  if (want_input) grads.input_grad = std::move(upstream);
  return grads;
}

}  // namespace advforge
