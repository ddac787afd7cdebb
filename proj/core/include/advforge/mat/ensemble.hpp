#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "advforge/data/dataset.hpp"
#include "advforge/nn/loss.hpp"
#include "advforge/nn/network.hpp"

namespace advforge {

/// Parallel-MAT copies combined by the upper-boundary decision unit:
/// combined probabilities = sum_k votes[k] * softmax(copy_k(x)).
struct Ensemble {
  std::vector<Network> copies;
  std::vector<double> votes;
  std::vector<double> strengths;
};

/// Equal lengths, S >= 1, votes non-negative and summing to 1 within 1e-9.
void validate(const Ensemble& ens);

Prediction udu_predict(const Ensemble& ens, const Tensor& batch);

struct UduFitOptions {
  std::size_t iterations = 500;
  double learning_rate = 1.0;
  /// Model used to craft the validation mixture. When null, the set for
  /// strength ens.strengths[k] is crafted against copy k, and the fitting
  /// strengths must equal the ensemble strengths.
  const Network* crafter = nullptr;
};

/// Softmax-parameterized votes a = softmax(z) minimizing the cross-entropy of
/// the vote-weighted probabilities. copy_probs[k] is (n, classes) for copy k.
/// Returns uniform votes if the fit would lower accuracy on these rows.
std::vector<double> fit_votes(std::span<const Tensor> copy_probs, std::span<const int> labels,
                              const UduFitOptions& options = {});

double vote_accuracy(std::span<const Tensor> copy_probs, std::span<const double> votes,
                     std::span<const int> labels);

/// Builds the validation mixture (clean plus one crafted set per strength) and
/// fits the votes on it. An empty `strengths` means the ensemble strengths.
Ensemble fit_udu_weights(Ensemble ens, const LabeledDataset& validation,
                         std::span<const double> strengths, const UduFitOptions& options = {});

}  // namespace advforge
