#pragma once

#include <cstddef>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace advforge {

using Shape = std::vector<std::size_t>;

/// Cache-line aligned storage. Vectorized kernels round differently depending
/// on where a buffer starts, so a fixed alignment keeps results bit-identical
/// from run to run.
template <typename T, std::size_t Alignment = 64>
struct AlignedAllocator {
  using value_type = T;
  template <typename U>
  struct rebind {
    using other = AlignedAllocator<U, Alignment>;
  };

  AlignedAllocator() noexcept = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U, Alignment>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{Alignment}));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{Alignment}); }

  template <typename U>
  bool operator==(const AlignedAllocator<U, Alignment>&) const noexcept {
    return true;
  }
};

using AlignedBuffer = std::vector<double, AlignedAllocator<double>>;

std::size_t shape_size(const Shape& shape) noexcept;
std::string to_string(const Shape& shape);

/// Row-major array of doubles with an explicit shape. The leading dimension is
/// the batch dimension wherever a tensor carries examples.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Number of entries per leading-dimension slice.
  std::size_t row_size() const noexcept;
  std::span<double> row(std::size_t i) noexcept;
  std::span<const double> row(std::size_t i) const noexcept;

  /// Same values, new shape of identical total size.
  Tensor reshaped(Shape shape) const&;
  Tensor reshaped(Shape shape) &&;

  void fill(double value);
  bool all_finite() const noexcept;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  AlignedBuffer values_;
};

/// Rows `rows` of `source` gathered into a new tensor, in the given order.
Tensor gather_rows(const Tensor& source, std::span<const std::size_t> rows);

/// Rows [begin, end) of `source`.
Tensor slice_rows(const Tensor& source, std::size_t begin, std::size_t end);

/// Max absolute elementwise difference; shapes must match.
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace advforge
