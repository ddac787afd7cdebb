#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advforge/data/dataset.hpp"
#include "advforge/data/mixed.hpp"
#include "advforge/mat/ensemble.hpp"
#include "advforge/nn/network.hpp"

namespace advforge {

/// When adversarial training rows are crafted. kPerBatch crafts each
/// mini-batch's adversarial rows against the model about to take the step;
/// kPerEpoch crafts all of them against the model at the start of each epoch;
/// kStatic crafts once, before the first epoch.
enum class CraftSchedule { kPerBatch, kPerEpoch, kStatic };

std::string to_string(CraftSchedule schedule);
CraftSchedule parse_craft_schedule(const std::string& text);

struct EpochReport {
  std::string run;  // "plain", "single(0.1)", "mixed(...)", ...
  std::size_t epoch = 0;
  std::size_t examples = 0;
  double mean_loss = 0.0;
};

struct TrainConfig {
  NetworkSpec spec = default_victim_spec();
  std::size_t epochs = 10;
  std::size_t batch_size = 64;
  double lr = 0.05;
  double momentum = 0.9;
  std::uint64_t seed = 1;

  CraftSchedule crafting = CraftSchedule::kPerBatch;
  /// Crafting model under CraftSchedule::kStatic; the freshly initialized
  /// model is used when null.
  std::shared_ptr<const Network> substitute;

  double clamp_lo = 0.0;
  double clamp_hi = 1.0;

  std::function<void(const EpochReport&)> on_epoch;
};

void validate(const TrainConfig& cfg);

/// Clean data only.
Network train_plain(const TrainConfig& cfg, const LabeledDataset& clean);

/// Clean data plus its eps-crafted counterpart (N = 2 N_C). eps = 0 is allowed.
Network train_single_strength(const TrainConfig& cfg, const LabeledDataset& clean, double eps);

/// One network over the clean set plus one crafted set per strength.
Network train_mixed_mat(const TrainConfig& cfg, const LabeledDataset& clean,
                        const std::vector<double>& strengths, const SizeMode& size_mode);

enum class Execution { kSequential, kConcurrent };

/// S independent copies; copy k is single-strength trained at strengths[k] with
/// seed cfg.seed + k. Votes start uniform.
Ensemble train_parallel_mat(const TrainConfig& cfg, const LabeledDataset& clean,
                            const std::vector<double>& strengths,
                            const std::optional<NetworkSpec>& copy_spec = std::nullopt,
                            Execution execution = Execution::kSequential);

/// The dataset epoch `epoch` of a mixed/single run trains on, given the model
/// state at the start of that epoch (ignored under static crafting; under
/// per-batch crafting every adversarial row is crafted against `current`).
/// Exposed so tests can compare compositions.
LabeledDataset epoch_training_set(const Network& current, const TrainConfig& cfg,
                                  const LabeledDataset& clean, std::span<const double> strengths,
                                  const SizeMode& size_mode, std::size_t epoch);

}  // namespace advforge
