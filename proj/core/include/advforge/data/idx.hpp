#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "advforge/data/dataset.hpp"

namespace advforge {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;  // 2051: ubyte, 3 dims
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;  // 2049: ubyte, 1 dim
inline constexpr std::uint32_t kIdxImageF64Magic = 0x00000D03;  // float64 images

/// Big-endian IDX images + labels. Pixel bytes are scaled by 1/255; float64
/// image files (written by write_idx_dataset) are read verbatim.
LabeledDataset load_mnist_idx(const std::filesystem::path& images,
                              const std::filesystem::path& labels);

/// Loads `<prefix>-images-idx3-ubyte` / `<prefix>-labels-idx1-ubyte` from `dir`,
/// where prefix is "train" or "t10k".
LabeledDataset load_mnist_split(const std::filesystem::path& dir, const std::string& prefix);

enum class PixelEncoding { kUnsignedByte, kFloat64 };

/// Writes an images/labels pair. Examples must have shape (n, 1, rows, cols) or
/// (n, rows, cols). kUnsignedByte rounds to the nearest 1/255.
void write_idx_dataset(const LabeledDataset& ds, const std::filesystem::path& images,
                       const std::filesystem::path& labels,
                       PixelEncoding encoding = PixelEncoding::kFloat64);

/// `flag` if given, otherwise $ADVFORGE_DATA; nullopt when neither is set.
std::optional<std::filesystem::path> resolve_data_dir(
    const std::optional<std::filesystem::path>& flag);

}  // namespace advforge
