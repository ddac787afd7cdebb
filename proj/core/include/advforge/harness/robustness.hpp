#pragma once

#include <string>
#include <vector>

#include "advforge/data/dataset.hpp"
#include "advforge/mat/ensemble.hpp"
#include "advforge/nn/network.hpp"

namespace advforge {

/// Test accuracy per attack strength; `average` is the plain mean over the grid.
struct RobustnessCurve {
  std::vector<double> attack_grid;
  std::vector<double> accuracy;
  double average = 0.0;
  std::string model_id;
  std::string config_digest;
  std::string crafting;  // "white-box" or "substitute:<fingerprint>"
};

/// {0, 0.05, ..., 0.30}.
std::vector<double> default_mnist_grid();

/// Ascending, non-negative, starting at 0.
void check_attack_grid(const std::vector<double>& grid);

void validate(const RobustnessCurve& curve);

/// Crafts the whole test set at each grid strength against `model` itself.
RobustnessCurve evaluate_robustness(const Network& model, const LabeledDataset& test,
                                    const std::vector<double>& grid, std::string model_id = "model");

/// Crafts against `substitute` and scores `model` on the result.
RobustnessCurve evaluate_robustness(const Network& model, const Network& substitute,
                                    const LabeledDataset& test, const std::vector<double>& grid,
                                    std::string model_id = "model");

/// Ensembles are attacked through a substitute; the UDU combination scores.
RobustnessCurve evaluate_robustness(const Ensemble& ens, const Network& substitute,
                                    const LabeledDataset& test, const std::vector<double>& grid,
                                    std::string model_id = "parallel");

}  // namespace advforge
