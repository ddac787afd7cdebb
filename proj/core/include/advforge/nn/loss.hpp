#pragma once

#include <span>
#include <vector>

#include "advforge/nn/network.hpp"
#include "advforge/nn/tensor.hpp"

namespace advforge {

struct LossResult {
  double loss = 0.0;  // mean negative log-likelihood over the batch
  Tensor dlogits;     // (softmax - one_hot) / batch_size
};

LossResult softmax_cross_entropy(const Tensor& logits, std::span<const int> labels);

/// Numerically stable row-wise softmax of an (n, classes) tensor.
Tensor softmax_rows(const Tensor& logits);

/// Row-wise argmax; ties go to the lowest class index.
std::vector<int> argmax_rows(const Tensor& scores);

struct Prediction {
  Tensor probabilities;
  std::vector<int> labels;
};

Prediction predict(const Network& net, const Tensor& batch);

/// Fraction of rows whose argmax equals the label.
double accuracy(std::span<const int> predicted, std::span<const int> labels);

}  // namespace advforge
