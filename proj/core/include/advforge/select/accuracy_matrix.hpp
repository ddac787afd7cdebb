#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "advforge/data/dataset.hpp"
#include "advforge/mat/train.hpp"

namespace advforge {

/// Validation accuracy of single-strength models (rows, one per candidate
/// training strength) under FGSM at each attack strength (columns).
struct AccuracyMatrix {
  std::vector<double> row_strengths;  // ascending
  std::vector<double> col_attacks;    // ascending
  std::vector<double> values;         // row-major, rows x cols

  std::size_t rows() const { return row_strengths.size(); }
  std::size_t cols() const { return col_attacks.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols() + j]; }
  double row_mean(std::size_t i) const;

  bool operator==(const AccuracyMatrix&) const = default;
};

/// Non-empty, strictly ascending axes, entries in [0, 1].
void validate(const AccuracyMatrix& a);

/// Trains one single-strength model per candidate on `train` (candidate i uses
/// seed cfg.seed + i) and scores it on `validation` under white-box FGSM.
AccuracyMatrix build_accuracy_matrix(const TrainConfig& cfg, const LabeledDataset& train,
                                     const LabeledDataset& validation,
                                     const std::vector<double>& candidates,
                                     const std::vector<double>& attack_grid);

/// As above, holding out a seeded 10% of `clean` for validation.
AccuracyMatrix build_accuracy_matrix(const TrainConfig& cfg, const LabeledDataset& clean,
                                     const std::vector<double>& candidates,
                                     const std::vector<double>& attack_grid);

/// Rows scaled to sum to one.
AccuracyMatrix normalize_matrix(const AccuracyMatrix& a);

/// Row-major m x m walk transitions between candidates: P(i->j) is
/// proportional to the row mean r_j over j != i, and P(i->i) = 0.
std::vector<double> transition_matrix(const AccuracyMatrix& a);

/// CSV with header "eps,<attack strengths...>" and one row per candidate.
std::string to_csv(const AccuracyMatrix& a);
AccuracyMatrix accuracy_matrix_from_csv(const std::string& text);

void save_accuracy_matrix(const AccuracyMatrix& a, const std::filesystem::path& path);
AccuracyMatrix load_accuracy_matrix(const std::filesystem::path& path);

}  // namespace advforge
