#include "advforge/harness/robustness.hpp"

#include <cmath>
#include <numeric>

#include "advforge/attack/fgsm.hpp"
#include "advforge/error.hpp"
#include "advforge/nn/loss.hpp"

namespace advforge {

namespace {

template <typename Score>
RobustnessCurve sweep(const Network& crafter, const LabeledDataset& test, const std::vector<double>& grid,
                      std::string model_id, std::string crafting, Score score) {
  check_attack_grid(grid);
  validate(test);
  RobustnessCurve curve;
  curve.attack_grid = grid;
  curve.model_id = std::move(model_id);
  curve.crafting = std::move(crafting);
  for (double eps : grid) {
    if (eps == 0.0) {
      curve.accuracy.push_back(score(test.examples));
    } else {
      curve.accuracy.push_back(score(fgsm(crafter, test.examples, test.labels, AttackConfig{eps})));
    }
  }
  curve.average = std::accumulate(curve.accuracy.begin(), curve.accuracy.end(), 0.0) /
                  static_cast<double>(curve.accuracy.size());
  return curve;
}

}  // namespace

std::vector<double> default_mnist_grid() { return {0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30}; }

void check_attack_grid(const std::vector<double>& grid) {
  require(!grid.empty(), ErrorKind::kInvalidArgument, "attack grid is empty");
  require(grid.front() == 0.0, ErrorKind::kInvalidArgument, "attack grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    require(std::isfinite(grid[i]) && grid[i] > grid[i - 1], ErrorKind::kInvalidArgument,
            "attack grid must be strictly ascending");
  }
}

void validate(const RobustnessCurve& curve) {
  check_attack_grid(curve.attack_grid);
  require(curve.accuracy.size() == curve.attack_grid.size(), ErrorKind::kShapeMismatch,
          "curve '" + curve.model_id + "' has " + std::to_string(curve.accuracy.size()) +
              " points for a grid of " + std::to_string(curve.attack_grid.size()));
  for (double a : curve.accuracy) {
    require(std::isfinite(a) && a >= 0.0 && a <= 1.0, ErrorKind::kInvalidArgument,
            "curve '" + curve.model_id + "' has accuracy outside [0, 1]");
  }
}

RobustnessCurve evaluate_robustness(const Network& model, const LabeledDataset& test,
                                    const std::vector<double>& grid, std::string model_id) {
  return sweep(model, test, grid, std::move(model_id), "white-box",
               [&](const Tensor& x) { return accuracy(predict(model, x).labels, test.labels); });
}

RobustnessCurve evaluate_robustness(const Network& model, const Network& substitute,
                                    const LabeledDataset& test, const std::vector<double>& grid,
                                    std::string model_id) {
  return sweep(substitute, test, grid, std::move(model_id), "substitute:" + model_fingerprint(substitute),
               [&](const Tensor& x) { return accuracy(predict(model, x).labels, test.labels); });
}

RobustnessCurve evaluate_robustness(const Ensemble& ens, const Network& substitute,
                                    const LabeledDataset& test, const std::vector<double>& grid,
                                    std::string model_id) {
  validate(ens);
  return sweep(substitute, test, grid, std::move(model_id), "substitute:" + model_fingerprint(substitute),
               [&](const Tensor& x) { return accuracy(udu_predict(ens, x).labels, test.labels); });
}

}  // namespace advforge
