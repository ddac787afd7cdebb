#include "advforge/data/idx.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "advforge/error.hpp"
#include "advforge/io.hpp"

namespace advforge {

namespace {

constexpr std::size_t kMnistClasses = 10;

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

double read_be_f64(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits = (bits << 8) | p[i];
  return std::bit_cast<double>(bits);
}

void append_be32(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

void append_be_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>((bits >> shift) & 0xFF));
}

std::string magic_text(std::uint32_t magic) { return "0x" + hex32(magic); }

}  // namespace

LabeledDataset load_mnist_idx(const std::filesystem::path& images,
                              const std::filesystem::path& labels) {
  const auto image_bytes = read_file_bytes(images);
  const auto label_bytes = read_file_bytes(labels);

  require(image_bytes.size() >= 4, ErrorKind::kTruncated,
          images.string() + ": truncated before the magic number");
  const std::uint32_t image_magic = read_be32(image_bytes, 0);
  require(image_magic == kIdxImageMagic || image_magic == kIdxImageF64Magic,
          ErrorKind::kWrongMagic,
          images.string() + ": wrong magic " + magic_text(image_magic) + " for an image file (expected " +
              magic_text(kIdxImageMagic) + ")");
  require(label_bytes.size() >= 4, ErrorKind::kTruncated,
          labels.string() + ": truncated before the magic number");
  const std::uint32_t label_magic = read_be32(label_bytes, 0);
  require(label_magic == kIdxLabelMagic, ErrorKind::kWrongMagic,
          labels.string() + ": wrong magic " + magic_text(label_magic) + " for a label file (expected " +
              magic_text(kIdxLabelMagic) + ")");

  require(image_bytes.size() >= 16, ErrorKind::kTruncated, images.string() + ": truncated header");
  require(label_bytes.size() >= 8, ErrorKind::kTruncated, labels.string() + ": truncated header");
  const std::size_t count = read_be32(image_bytes, 4);
  const std::size_t rows = read_be32(image_bytes, 8);
  const std::size_t cols = read_be32(image_bytes, 12);
  const std::size_t label_count = read_be32(label_bytes, 4);

  const std::size_t width = image_magic == kIdxImageF64Magic ? 8 : 1;
  const std::size_t pixels = count * rows * cols;
  require(image_bytes.size() >= 16 + pixels * width, ErrorKind::kTruncated,
          images.string() + ": payload holds " + std::to_string(image_bytes.size() - 16) +
              " bytes, header promises " + std::to_string(pixels * width));
  require(label_bytes.size() >= 8 + label_count, ErrorKind::kTruncated,
          labels.string() + ": payload holds " + std::to_string(label_bytes.size() - 8) +
              " bytes, header promises " + std::to_string(label_count));
  require(count == label_count, ErrorKind::kCountMismatch,
          "image file has " + std::to_string(count) + " entries, label file has " +
              std::to_string(label_count));

  Tensor examples({count, 1, rows, cols});
  if (width == 1) {
    for (std::size_t i = 0; i < pixels; ++i) examples[i] = image_bytes[16 + i] / 255.0;
  } else {
    for (std::size_t i = 0; i < pixels; ++i) examples[i] = read_be_f64(&image_bytes[16 + 8 * i]);
  }
  std::vector<int> y(count);
  for (std::size_t i = 0; i < count; ++i) y[i] = label_bytes[8 + i];

  LabeledDataset ds{std::move(examples), std::move(y), kMnistClasses, CleanTag{},
                    images.filename().string()};
  validate(ds);
  return ds;
}

LabeledDataset load_mnist_split(const std::filesystem::path& dir, const std::string& prefix) {
  auto ds = load_mnist_idx(dir / (prefix + "-images-idx3-ubyte"), dir / (prefix + "-labels-idx1-ubyte"));
  ds.name = "mnist/" + prefix;
  return ds;
}

void write_idx_dataset(const LabeledDataset& ds, const std::filesystem::path& images,
                       const std::filesystem::path& labels, PixelEncoding encoding) {
  validate(ds);
  const Shape example = ds.example_shape();
  const bool image_like = (example.size() == 3 && example[0] == 1) || example.size() == 2;
  require(image_like, ErrorKind::kShapeMismatch,
          "IDX export needs single-channel images, got example shape " + to_string(example));
  const std::size_t rows = example[example.size() - 2];
  const std::size_t cols = example[example.size() - 1];

  std::string image_out;
  append_be32(image_out, encoding == PixelEncoding::kFloat64 ? kIdxImageF64Magic : kIdxImageMagic);
  append_be32(image_out, static_cast<std::uint32_t>(ds.size()));
  append_be32(image_out, static_cast<std::uint32_t>(rows));
  append_be32(image_out, static_cast<std::uint32_t>(cols));
  for (double v : ds.examples.values()) {
    if (encoding == PixelEncoding::kFloat64) {
      append_be_f64(image_out, v);
    } else {
      image_out.push_back(static_cast<char>(static_cast<std::uint8_t>(std::lround(v * 255.0))));
    }
  }

  std::string label_out;
  append_be32(label_out, kIdxLabelMagic);
  append_be32(label_out, static_cast<std::uint32_t>(ds.size()));
  for (int y : ds.labels) label_out.push_back(static_cast<char>(static_cast<std::uint8_t>(y)));

  write_file_atomic(images, image_out);
  write_file_atomic(labels, label_out);
}

std::optional<std::filesystem::path> resolve_data_dir(
    const std::optional<std::filesystem::path>& flag) {
  if (flag && !flag->empty()) return flag;
  if (const char* env = std::getenv("ADVFORGE_DATA"); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return std::nullopt;
}

}  // namespace advforge
