#include "advforge/nn/loss.hpp"

#include <algorithm>
#include <cmath>

#include "advforge/error.hpp"

namespace advforge {

namespace {

void check_logits(const Tensor& logits) {
  require(logits.rank() == 2 && logits.dim(0) > 0 && logits.dim(1) > 0,
          ErrorKind::kShapeMismatch,
          "expected (batch, classes) logits, got " + to_string(logits.shape()));
}

}  // namespace

Tensor softmax_rows(const Tensor& logits) {
  check_logits(logits);
  Tensor probs(logits.shape());
  const std::size_t classes = logits.dim(1);
  for (std::size_t i = 0; i < logits.dim(0); ++i) {
    const auto in = logits.row(i);
    auto out = probs.row(i);
    const double peak = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      out[c] = std::exp(in[c] - peak);
      total += out[c];
    }
    for (double& p : out) p /= total;
  }
  return probs;
}

std::vector<int> argmax_rows(const Tensor& scores) {
  check_logits(scores);
  std::vector<int> labels(scores.dim(0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto row = scores.row(i);
    // max_element returns the first maximum, i.e. the lowest class index on ties.
    labels[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return labels;
}

LossResult softmax_cross_entropy(const Tensor& logits, std::span<const int> labels) {
  check_logits(logits);
  const std::size_t n = logits.dim(0);
  const std::size_t classes = logits.dim(1);
  require(labels.size() == n, ErrorKind::kShapeMismatch,
          "got " + std::to_string(labels.size()) + " labels for a batch of " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    require(labels[i] >= 0 && static_cast<std::size_t>(labels[i]) < classes,
            ErrorKind::kInvalidArgument,
            "label " + std::to_string(labels[i]) + " at index " + std::to_string(i) +
                " outside [0, " + std::to_string(classes) + ")");
  }

  LossResult result{0.0, Tensor(logits.shape())};
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto in = logits.row(i);
    auto grad = result.dlogits.row(i);
    const double peak = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t c = 0; c < classes; ++c) total += std::exp(in[c] - peak);
    const double log_total = std::log(total);
    const auto target = static_cast<std::size_t>(labels[i]);
    // -log softmax = log(sum exp(z - peak)) - (z_t - peak), never negative.
    result.loss += std::max(0.0, log_total - (in[target] - peak));
    for (std::size_t c = 0; c < classes; ++c) {
      const double p = std::exp(in[c] - peak - log_total);
      grad[c] = (p - (c == target ? 1.0 : 0.0)) * scale;
    }
  }
  result.loss *= scale;
  return result;
}

Prediction predict(const Network& net, const Tensor& batch) {
  constexpr std::size_t kChunk = 1024;
  require(batch.rank() >= 1 && batch.dim(0) > 0, ErrorKind::kShapeMismatch,
          "predict: empty batch " + to_string(batch.shape()));
  const std::size_t n = batch.dim(0);
  Prediction out;
  if (n <= kChunk) {
    out.probabilities = softmax_rows(infer_logits(net, batch));
  } else {
    out.probabilities = Tensor({n, net.spec().class_count});
    for (std::size_t begin = 0; begin < n; begin += kChunk) {
      const std::size_t end = std::min(n, begin + kChunk);
      const Tensor probs = softmax_rows(infer_logits(net, slice_rows(batch, begin, end)));
      std::copy(probs.values().begin(), probs.values().end(),
                out.probabilities.values().begin() + static_cast<std::ptrdiff_t>(begin * probs.row_size()));
    }
  }
  out.labels = argmax_rows(out.probabilities);
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> labels) {
  require(predicted.size() == labels.size() && !labels.empty(), ErrorKind::kShapeMismatch,
          "accuracy needs equally sized, non-empty label lists");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace advforge
