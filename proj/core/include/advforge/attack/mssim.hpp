#pragma once

#include <cstddef>
#include <span>

#include "advforge/data/dataset.hpp"
#include "advforge/nn/tensor.hpp"

namespace advforge {

inline constexpr std::size_t kSsimWindow = 8;
inline constexpr double kSsimC1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
inline constexpr double kSsimC2 = 0.03 * 0.03;  // (K2 * L)^2

/// SSIM of two equally sized pixel windows (uniform weights, population moments).
double ssim_window(std::span<const double> a, std::span<const double> b);

/// Mean SSIM over all 8x8 windows at stride 1. Images are (height, width) or
/// (1, height, width).
double mssim(const Tensor& a, const Tensor& b);

/// Same, over raw row-major single-channel images.
double mssim(std::span<const double> a, std::span<const double> b, std::size_t height,
             std::size_t width);

/// Average of per-example MSSIM between row-aligned datasets.
double dataset_mssim(const LabeledDataset& a, const LabeledDataset& b);

}  // namespace advforge
