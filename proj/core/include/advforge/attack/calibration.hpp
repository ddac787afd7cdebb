#pragma once

#include <vector>

#include "advforge/data/dataset.hpp"
#include "advforge/nn/network.hpp"

namespace advforge {

struct StrengthCalibration {
  double epsilon_max = 0.0;
  bool floor_unattainable = false;  // no grid point reached the floor
  std::vector<double> grid;
  std::vector<double> average_mssim;  // per grid point, crafted vs clean
};

/// Largest grid strength whose dataset-average MSSIM stays at or above `mssim_floor`.
/// Falls back to the smallest grid value with floor_unattainable set.
StrengthCalibration calibrate_max_strength(const Network& model, const LabeledDataset& ds,
                                           double mssim_floor, const std::vector<double>& eps_grid);

}  // namespace advforge
