#include "advforge/attack/mssim.hpp"

#include <vector>

#include "advforge/error.hpp"

namespace advforge {

double ssim_window(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size() && !a.empty(), ErrorKind::kShapeMismatch,
          "ssim_window needs equally sized, non-empty windows");
  const double count = static_cast<double>(a.size());
  double sum_a = 0.0, sum_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum_a += a[i];
    sum_b += b[i];
  }
  const double mu_a = sum_a / count;
  const double mu_b = sum_b / count;
  double var_a = 0.0, var_b = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mu_a;
    const double db = b[i] - mu_b;
    var_a += da * da;
    var_b += db * db;
    cov += da * db;
  }
  var_a /= count;
  var_b /= count;
  cov /= count;
  const double numerator = (2.0 * mu_a * mu_b + kSsimC1) * (2.0 * cov + kSsimC2);
  const double denominator = (mu_a * mu_a + mu_b * mu_b + kSsimC1) * (var_a + var_b + kSsimC2);
  return numerator / denominator;
}

double mssim(std::span<const double> a, std::span<const double> b, std::size_t height,
             std::size_t width) {
  require(a.size() == height * width && b.size() == height * width, ErrorKind::kShapeMismatch,
          "mssim: image buffers do not match " + std::to_string(height) + "x" +
              std::to_string(width));
  require(height >= kSsimWindow && width >= kSsimWindow, ErrorKind::kShapeMismatch,
          "mssim: image " + std::to_string(height) + "x" + std::to_string(width) +
              " is smaller than the 8x8 window");
  std::vector<double> wa(kSsimWindow * kSsimWindow);
  std::vector<double> wb(kSsimWindow * kSsimWindow);
  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t y = 0; y + kSsimWindow <= height; ++y) {
    for (std::size_t x = 0; x + kSsimWindow <= width; ++x) {
      for (std::size_t r = 0; r < kSsimWindow; ++r) {
        for (std::size_t c = 0; c < kSsimWindow; ++c) {
          wa[r * kSsimWindow + c] = a[(y + r) * width + x + c];
          wb[r * kSsimWindow + c] = b[(y + r) * width + x + c];
        }
      }
      total += ssim_window(wa, wb);
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

namespace {

std::pair<std::size_t, std::size_t> image_dims(const Shape& shape) {
  if (shape.size() == 2) return {shape[0], shape[1]};
  if (shape.size() == 3 && shape[0] == 1) return {shape[1], shape[2]};
  fail(ErrorKind::kShapeMismatch,
       "mssim expects a single-channel 2-D image, got shape " + to_string(shape));
}

}  // namespace

double mssim(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), ErrorKind::kShapeMismatch,
          "mssim: shapes " + to_string(a.shape()) + " and " + to_string(b.shape()) + " differ");
  const auto [h, w] = image_dims(a.shape());
  return mssim(a.values(), b.values(), h, w);
}

double dataset_mssim(const LabeledDataset& a, const LabeledDataset& b) {
  require(a.size() == b.size() && a.size() > 0, ErrorKind::kInvalidArgument,
          "dataset_mssim needs two non-empty, equally sized datasets");
  require(a.examples.shape() == b.examples.shape(), ErrorKind::kShapeMismatch,
          "dataset_mssim: example shapes differ");
  const auto [h, w] = image_dims(a.example_shape());
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += mssim(a.examples.row(i), b.examples.row(i), h, w);
  return total / static_cast<double>(a.size());
}

}  // namespace advforge
