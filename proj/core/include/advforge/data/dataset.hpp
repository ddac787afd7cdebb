#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "advforge/nn/tensor.hpp"

namespace advforge {

struct CleanTag {
  friend bool operator==(const CleanTag&, const CleanTag&) = default;
};

struct AdversarialTag {
  double epsilon = 0.0;
  std::string crafting_id;
  friend bool operator==(const AdversarialTag&, const AdversarialTag&) = default;
};

/// Output of build_mixed_dataset: clean rows plus one crafted set per strength.
struct MixtureTag {
  std::vector<double> strengths;
  friend bool operator==(const MixtureTag&, const MixtureTag&) = default;
};

using DatasetTag = std::variant<CleanTag, AdversarialTag, MixtureTag>;

std::string to_string(const DatasetTag& tag);

/// Examples in [0, 1] with integer labels. examples has shape (n, example_shape...).
struct LabeledDataset {
  Tensor examples;
  std::vector<int> labels;
  std::size_t class_count = 0;
  DatasetTag tag = CleanTag{};
  std::string name;

  std::size_t size() const noexcept { return labels.size(); }
  Shape example_shape() const;
  bool is_adversarial() const noexcept { return std::holds_alternative<AdversarialTag>(tag); }
};

/// Range, label bounds and length agreement. Throws with the first violation.
void validate(const LabeledDataset& ds);

/// Rows `rows` in order; keeps tag, name and class_count.
LabeledDataset subset(const LabeledDataset& ds, std::span<const std::size_t> rows);

/// First `count` examples (or all, if fewer).
LabeledDataset take_front(const LabeledDataset& ds, std::size_t count);

struct SplitFractions {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  LabeledDataset train;
  LabeledDataset validation;
  LabeledDataset test;
};

/// Seeded disjoint partition. Validation and test sizes are floor(n * fraction);
/// the remainder goes to train.
DatasetSplit split_dataset(const LabeledDataset& ds, const SplitFractions& fractions,
                           std::uint64_t seed);

/// Gaussian blobs (unit variance) around class means spaced `separation` apart,
/// affinely squashed into [0, 1]. Example shape is (dims).
LabeledDataset synth_blobs(std::size_t class_count, std::size_t per_class, std::size_t dims,
                           double separation, std::uint64_t seed);

}  // namespace advforge
