#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <variant>

#include "advforge/data/dataset.hpp"
#include "advforge/nn/network.hpp"

namespace advforge {

/// Craft against the model being attacked.
struct SelfCrafting {};

/// Craft with a separately trained model loaded from a checkpoint. The caller
/// resolves the checkpoint and passes the loaded network as the crafting model.
struct SubstituteCrafting {
  std::filesystem::path checkpoint;
};

using Crafting = std::variant<SelfCrafting, SubstituteCrafting>;

struct AttackConfig {
  double epsilon = 0.0;  // in normalized [0, 1] pixel units
  double clamp_lo = 0.0;
  double clamp_hi = 1.0;
  Crafting crafting = SelfCrafting{};
};

void validate(const AttackConfig& cfg);

/// x_adv = clamp(x + eps * sign(grad_x J(theta, x, y)), lo, hi), sign(0) = 0.
/// `model` is the crafting model. x is (n, input_shape...).
Tensor fgsm(const Network& model, const Tensor& x, std::span<const int> y, const AttackConfig& cfg);

/// Short stable identity for a parameter state (CRC-32 of spec and weights).
std::string model_fingerprint(const Network& net);

struct CraftOptions {
  bool allow_reperturbation = false;
};

/// Crafts every example of `ds`. Labels and order are preserved; the result is
/// tagged adversarial{eps, crafting id}.
LabeledDataset craft_dataset(const Network& model, const LabeledDataset& ds,
                             const AttackConfig& cfg, const CraftOptions& options = {});

}  // namespace advforge
