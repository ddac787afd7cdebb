#include "advforge/attack/calibration.hpp"

#include <cmath>

#include "advforge/attack/fgsm.hpp"
#include "advforge/attack/mssim.hpp"
#include "advforge/error.hpp"

namespace advforge {

StrengthCalibration calibrate_max_strength(const Network& model, const LabeledDataset& ds,
                                           double mssim_floor, const std::vector<double>& eps_grid) {
  require(ds.size() > 0, ErrorKind::kInvalidArgument, "calibration dataset is empty");
  require(!eps_grid.empty(), ErrorKind::kInvalidArgument, "strength grid is empty");
  require(std::isfinite(mssim_floor), ErrorKind::kInvalidArgument, "MSSIM floor must be finite");
  for (std::size_t i = 1; i < eps_grid.size(); ++i) {
    require(eps_grid[i] > eps_grid[i - 1], ErrorKind::kInvalidArgument,
            "strength grid must be strictly ascending");
  }

  StrengthCalibration result;
  result.grid = eps_grid;
  bool found = false;
  for (double eps : eps_grid) {
    const auto crafted = craft_dataset(model, ds, AttackConfig{eps}, {.allow_reperturbation = true});
    const double score = dataset_mssim(crafted, ds);
    result.average_mssim.push_back(score);
    if (score >= mssim_floor) {
      result.epsilon_max = eps;
      found = true;
    }
  }
  if (!found) {
    result.epsilon_max = eps_grid.front();
    result.floor_unattainable = true;
  }
  return result;
}

}  // namespace advforge
