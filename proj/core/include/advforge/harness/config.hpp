#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "advforge/mat/train.hpp"
#include "advforge/nn/network_spec.hpp"
#include "advforge/select/selection.hpp"

namespace advforge {

struct ModelSection {
  std::string arch = "mlp";  // "mlp" or "cnn"
  std::vector<std::size_t> hidden = {256, 128};
};

struct TrainSection {
  std::size_t epochs = 10;
  std::size_t batch_size = 64;
  double lr = 0.05;
  double momentum = 0.9;
  CraftSchedule crafting = CraftSchedule::kPerBatch;
  double epsilon = 0.10;  // single-strength runs
  std::vector<double> strengths = {0.05, 0.10, 0.15};
  std::string size_mode = "full";  // "full" or "reduced"
  std::optional<double> reduced_fraction;
  std::size_t limit = 0;  // training examples to use; 0 means all
  std::size_t vote_iterations = 500;
  double vote_lr = 1.0;
  double validation_fraction = 0.1;
};

struct AttackSection {
  double epsilon = 0.10;  // craft
  std::vector<double> grid = {0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
  std::string substitute;  // checkpoint used to attack ensembles and static crafting
  std::size_t limit = 0;   // test examples to use; 0 means all
  double mssim_floor = 0.8;
};

struct SelectSection {
  std::vector<double> candidates = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
  std::vector<double> attack_grid = {0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
  std::size_t steps = 0;
  std::size_t walks = 0;
  double penalty = 0.01;
  CoverageMode mode = CoverageMode::kParallel;
  std::size_t threads = 1;
  std::string matrix;  // cached accuracy matrix CSV
};

struct ReportSection {
  std::string title = "Robustness";
  std::string stem = "robustness";
};

/// INI file with an optional top-level `seed` and sections
/// [model] [train] [attack] [select] [report]. Unknown keys are errors.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  ModelSection model;
  TrainSection train;
  AttackSection attack;
  SelectSection select;
  ReportSection report;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its effective value, in a fixed order.
std::string render_config(const ExperimentConfig& cfg);

/// CRC-32 hex of render_config.
std::string config_digest(const ExperimentConfig& cfg);

NetworkSpec model_spec(const ModelSection& model);
TrainConfig train_config(const ExperimentConfig& cfg);
SizeMode size_mode(const TrainSection& train);
RandomWalkConfig walk_config(const ExperimentConfig& cfg);

}  // namespace advforge
