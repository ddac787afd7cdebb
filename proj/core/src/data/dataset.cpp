#include "advforge/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "advforge/error.hpp"
#include "advforge/rng.hpp"

namespace advforge {

std::string to_string(const DatasetTag& tag) {
  if (const auto* adv = std::get_if<AdversarialTag>(&tag)) {
    std::ostringstream out;
    out << "adversarial{eps=" << adv->epsilon << ", crafted_by=" << adv->crafting_id << "}";
    return out.str();
  }
  if (const auto* mix = std::get_if<MixtureTag>(&tag)) {
    std::ostringstream out;
    out << "mixture{";
    for (std::size_t i = 0; i < mix->strengths.size(); ++i) out << (i ? "," : "") << mix->strengths[i];
    out << "}";
    return out.str();
  }
  return "clean";
}

Shape LabeledDataset::example_shape() const {
  const Shape& shape = examples.shape();
  if (shape.empty()) return {};
  return Shape(shape.begin() + 1, shape.end());
}

void validate(const LabeledDataset& ds) {
  require(ds.examples.rank() >= 2, ErrorKind::kShapeMismatch,
          "dataset '" + ds.name + "': examples must be (n, ...), got " +
              to_string(ds.examples.shape()));
  require(ds.examples.dim(0) == ds.labels.size(), ErrorKind::kCountMismatch,
          "dataset '" + ds.name + "': " + std::to_string(ds.examples.dim(0)) + " examples but " +
              std::to_string(ds.labels.size()) + " labels");
  require(ds.class_count > 0, ErrorKind::kInvalidArgument,
          "dataset '" + ds.name + "': class_count must be positive");
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    require(ds.labels[i] >= 0 && static_cast<std::size_t>(ds.labels[i]) < ds.class_count,
            ErrorKind::kInvalidArgument,
            "dataset '" + ds.name + "': label " + std::to_string(ds.labels[i]) + " at index " +
                std::to_string(i) + " out of range");
  }
  const auto values = ds.examples.values();
  const auto bad = std::find_if(values.begin(), values.end(),
                                [](double v) { return !(v >= 0.0 && v <= 1.0); });
  require(bad == values.end(), ErrorKind::kInvalidArgument,
          "dataset '" + ds.name + "': value outside [0, 1] at flat index " +
              std::to_string(bad - values.begin()));
}

LabeledDataset subset(const LabeledDataset& ds, std::span<const std::size_t> rows) {
  LabeledDataset out;
  out.examples = gather_rows(ds.examples, rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(ds.labels[r]);
  out.class_count = ds.class_count;
  out.tag = ds.tag;
  out.name = ds.name;
  return out;
}

LabeledDataset take_front(const LabeledDataset& ds, std::size_t count) {
  count = std::min(count, ds.size());
  LabeledDataset out;
  out.examples = slice_rows(ds.examples, 0, count);
  out.labels.assign(ds.labels.begin(), ds.labels.begin() + static_cast<std::ptrdiff_t>(count));
  out.class_count = ds.class_count;
  out.tag = ds.tag;
  out.name = ds.name;
  return out;
}

DatasetSplit split_dataset(const LabeledDataset& ds, const SplitFractions& fractions,
                           std::uint64_t seed) {
  require(fractions.train > 0.0 && fractions.validation > 0.0 && fractions.test > 0.0,
          ErrorKind::kInvalidArgument, "split fractions must all be positive");
  require(std::abs(fractions.train + fractions.validation + fractions.test - 1.0) <= 1e-9,
          ErrorKind::kInvalidArgument, "split fractions must sum to 1");
  const std::size_t n = ds.size();
  require(n >= 3, ErrorKind::kInvalidArgument,
          "cannot split a dataset of " + std::to_string(n) + " examples into three parts");

  // The small slack keeps products like 10 * 0.1 from flooring to 0 after rounding error.
  auto part = [n](double f) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * f + 1e-9));
  };
  const std::size_t n_val = part(fractions.validation);
  const std::size_t n_test = part(fractions.test);
  const std::size_t n_train = n - n_val - n_test;

  Rng rng(seed);
  const auto order = rng.permutation(n);
  const std::span<const std::size_t> all(order);
  DatasetSplit split{subset(ds, all.subspan(0, n_train)),
                     subset(ds, all.subspan(n_train, n_val)),
                     subset(ds, all.subspan(n_train + n_val, n_test))};
  split.train.name = ds.name + "/train";
  split.validation.name = ds.name + "/validation";
  split.test.name = ds.name + "/test";
  return split;
}

LabeledDataset synth_blobs(std::size_t class_count, std::size_t per_class, std::size_t dims,
                           double separation, std::uint64_t seed) {
  require(class_count > 0 && per_class > 0 && dims > 0, ErrorKind::kInvalidArgument,
          "synth_blobs: counts must be positive");
  const std::size_t n = class_count * per_class;
  Tensor examples({n, dims});
  std::vector<int> labels(n);
  Rng rng(seed);
  for (std::size_t c = 0; c < class_count; ++c) {
    // Class c sits on axis (c mod dims), one step further out for every wrap-around.
    const std::size_t axis = c % dims;
    const double offset = separation * static_cast<double>(1 + c / dims);
    for (std::size_t k = 0; k < per_class; ++k) {
      const std::size_t i = c * per_class + k;
      labels[i] = static_cast<int>(c);
      auto row = examples.row(i);
      for (std::size_t d = 0; d < dims; ++d) row[d] = rng.normal() + (d == axis ? offset : 0.0);
    }
  }

  const auto [lo, hi] = std::minmax_element(examples.values().begin(), examples.values().end());
  const double low = *lo;
  const double span = *hi - *lo;
  for (double& v : examples.values()) {
    v = span > 0.0 ? std::clamp((v - low) / span, 0.0, 1.0) : 0.5;
  }

  // Interleave classes so prefixes stay balanced.
  Rng shuffle_rng(derive_seed(seed, 1));
  const auto order = shuffle_rng.permutation(n);
  LabeledDataset ds{std::move(examples), std::move(labels), class_count, CleanTag{}, "blobs"};
  return subset(ds, order);
}

}  // namespace advforge
