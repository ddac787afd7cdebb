#include "advforge/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "advforge/error.hpp"

namespace advforge {

std::size_t shape_size(const Shape& shape) noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(values.begin(), values.end()) {
  require(values_.size() == shape_size(shape_), ErrorKind::kShapeMismatch,
          "tensor of shape " + to_string(shape_) + " needs " +
              std::to_string(shape_size(shape_)) + " values, got " +
              std::to_string(values_.size()));
}

std::size_t Tensor::row_size() const noexcept {
  if (shape_.empty() || shape_[0] == 0) return 0;
  return values_.size() / shape_[0];
}

std::span<double> Tensor::row(std::size_t i) noexcept {
  const std::size_t stride = row_size();
  return std::span<double>(values_).subspan(i * stride, stride);
}

std::span<const double> Tensor::row(std::size_t i) const noexcept {
  const std::size_t stride = row_size();
  return std::span<const double>(values_).subspan(i * stride, stride);
}

Tensor Tensor::reshaped(Shape shape) const& {
  Tensor copy = *this;
  return std::move(copy).reshaped(std::move(shape));
}

Tensor Tensor::reshaped(Shape shape) && {
  require(shape_size(shape) == values_.size(), ErrorKind::kShapeMismatch,
          "cannot reshape " + to_string(shape_) + " to " + to_string(shape));
  shape_ = std::move(shape);
  return std::move(*this);
}

void Tensor::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

bool Tensor::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Tensor gather_rows(const Tensor& source, std::span<const std::size_t> rows) {
  Shape shape = source.shape();
  require(!shape.empty(), ErrorKind::kShapeMismatch, "gather_rows needs a batched tensor");
  const std::size_t stride = source.row_size();
  shape[0] = rows.size();
  Tensor out(shape);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < source.dim(0), ErrorKind::kInvalidArgument,
            "row index " + std::to_string(rows[i]) + " out of range");
    std::copy_n(source.data() + rows[i] * stride, stride, out.data() + i * stride);
  }
  return out;
}

Tensor slice_rows(const Tensor& source, std::size_t begin, std::size_t end) {
  require(!source.shape().empty() && begin <= end && end <= source.dim(0),
          ErrorKind::kInvalidArgument, "slice_rows range out of bounds");
  Shape shape = source.shape();
  shape[0] = end - begin;
  const std::size_t stride = source.row_size();
  std::vector<double> values(source.data() + begin * stride, source.data() + end * stride);
  return Tensor(std::move(shape), std::move(values));
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), ErrorKind::kShapeMismatch,
          "max_abs_diff: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace advforge
