#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "advforge/data/dataset.hpp"

namespace advforge {

struct FullSize {};

/// Each of the S+1 parts is subsampled to fraction * N_C. Without an explicit
/// fraction, 1 / (S + 1) is used so the mixture keeps the clean set's size.
struct ReducedSize {
  std::optional<double> fraction;
};

using SizeMode = std::variant<FullSize, ReducedSize>;

struct MixedBuildConfig {
  std::vector<double> strengths;
  SizeMode size_mode = FullSize{};
  std::uint64_t seed = 0;
};

/// Which rows of which part end up in the mixture, and in what order.
/// Part 0 is the clean set; part k is the adversarial set for strengths[k-1].
struct MixedPlan {
  std::vector<std::vector<std::size_t>> part_rows;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> order;  // (part, row) pairs

  std::size_t size() const noexcept { return order.size(); }
};

/// Shared by build_mixed_dataset and the trainers so both produce identically
/// composed mixtures. n_adv is N_A, the size of each adversarial set. Row
/// subsampling always follows cfg.seed; the final order follows `order_seed`
/// when given (trainers reshuffle every epoch over a fixed subsample).
MixedPlan plan_mixed(std::size_t n_clean, std::size_t n_adv, const MixedBuildConfig& cfg,
                     std::optional<std::uint64_t> order_seed = std::nullopt);

/// Materializes `plan` over the given parts.
LabeledDataset assemble_mixed(const MixedPlan& plan, std::span<const LabeledDataset* const> parts);

/// Clean set plus S adversarial sets, N = N_C + S * N_A in full mode.
LabeledDataset build_mixed_dataset(const LabeledDataset& clean,
                                   std::span<const LabeledDataset> adv_sets,
                                   const MixedBuildConfig& cfg);

/// Validates strengths: non-empty, positive, distinct.
void check_strengths(std::span<const double> strengths, bool allow_zero = false);

}  // namespace advforge
