#include "advforge/mat/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "advforge/attack/fgsm.hpp"
#include "advforge/data/mixed.hpp"
#include "advforge/error.hpp"

namespace advforge {

namespace {

void check_copy_probs(std::span<const Tensor> copy_probs, std::span<const int> labels) {
  require(!copy_probs.empty(), ErrorKind::kInvalidArgument, "no copy probabilities given");
  const Shape& shape = copy_probs[0].shape();
  require(shape.size() == 2 && shape[0] == labels.size() && shape[0] > 0, ErrorKind::kShapeMismatch,
          "copy probabilities " + to_string(shape) + " do not match " + std::to_string(labels.size()) +
              " labels");
  for (const Tensor& p : copy_probs) {
    require(p.shape() == shape, ErrorKind::kShapeMismatch,
            "copy probabilities disagree in shape: " + to_string(p.shape()) + " vs " + to_string(shape));
  }
  for (int y : labels) {
    require(y >= 0 && static_cast<std::size_t>(y) < shape[1], ErrorKind::kInvalidArgument,
            "label " + std::to_string(y) + " out of range");
  }
}

std::vector<double> softmax(const std::vector<double>& z) {
  const double top = *std::max_element(z.begin(), z.end());
  std::vector<double> a(z.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) sum += a[k] = std::exp(z[k] - top);
  for (double& v : a) v /= sum;
  return a;
}

}  // namespace

void validate(const Ensemble& ens) {
  require(!ens.copies.empty(), ErrorKind::kInvalidArgument, "ensemble has no copies (S >= 1)");
  require(ens.votes.size() == ens.copies.size() && ens.strengths.size() == ens.copies.size(),
          ErrorKind::kInvalidArgument,
          "ensemble has " + std::to_string(ens.copies.size()) + " copies, " +
              std::to_string(ens.votes.size()) + " votes and " + std::to_string(ens.strengths.size()) +
              " strengths");
  double sum = 0.0;
  for (double v : ens.votes) {
    require(std::isfinite(v) && v >= 0.0, ErrorKind::kInvalidArgument, "votes must be non-negative");
    sum += v;
  }
  require(std::abs(sum - 1.0) <= 1e-9, ErrorKind::kInvalidArgument,
          "votes sum to " + std::to_string(sum) + ", expected 1");
  const Shape& in = ens.copies[0].input_shape();
  const std::size_t classes = ens.copies[0].spec().class_count;
  for (const Network& copy : ens.copies) {
    require(copy.input_shape() == in && copy.spec().class_count == classes, ErrorKind::kShapeMismatch,
            "ensemble copies disagree on input shape or class count");
  }
}

Prediction udu_predict(const Ensemble& ens, const Tensor& batch) {
  validate(ens);
  Prediction out;
  for (std::size_t k = 0; k < ens.copies.size(); ++k) {
    Tensor probs = predict(ens.copies[k], batch).probabilities;
    if (k == 0) {
      out.probabilities = Tensor(probs.shape());
    }
    for (std::size_t i = 0; i < probs.size(); ++i) out.probabilities[i] += ens.votes[k] * probs[i];
  }
  out.labels = argmax_rows(out.probabilities);
  return out;
}

double vote_accuracy(std::span<const Tensor> copy_probs, std::span<const double> votes,
                     std::span<const int> labels) {
  check_copy_probs(copy_probs, labels);
  require(votes.size() == copy_probs.size(), ErrorKind::kInvalidArgument, "one vote per copy expected");
  const std::size_t n = labels.size();
  const std::size_t classes = copy_probs[0].dim(1);
  std::size_t correct = 0;
  std::vector<double> row(classes);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t k = 0; k < copy_probs.size(); ++k) {
      const double* p = copy_probs[k].data() + i * classes;
      for (std::size_t c = 0; c < classes; ++c) row[c] += votes[k] * p[c];
    }
    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    correct += best == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

std::vector<double> fit_votes(std::span<const Tensor> copy_probs, std::span<const int> labels,
                              const UduFitOptions& options) {
  check_copy_probs(copy_probs, labels);
  require(options.learning_rate > 0.0, ErrorKind::kInvalidArgument, "vote learning rate must be positive");
  const std::size_t s = copy_probs.size();
  const std::size_t n = labels.size();
  const std::size_t classes = copy_probs[0].dim(1);
  const std::vector<double> uniform(s, 1.0 / static_cast<double>(s));
  if (s == 1) return uniform;

  // Only the probability each copy gives the true class enters the loss.
  std::vector<double> truth(n * s);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < s; ++k) {
      truth[i * s + k] = copy_probs[k][i * classes + static_cast<std::size_t>(labels[i])];
    }
  }

  constexpr double kFloor = 1e-12;
  std::vector<double> z(s, 0.0);
  std::vector<double> g(s);
  for (std::size_t it = 0; it < options.iterations; ++it) {
    const std::vector<double> a = softmax(z);
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* t = truth.data() + i * s;
      double mix = 0.0;
      for (std::size_t k = 0; k < s; ++k) mix += a[k] * t[k];
      mix = std::max(mix, kFloor);
      for (std::size_t k = 0; k < s; ++k) g[k] -= t[k] / mix;
    }
    double ga = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
      g[k] /= static_cast<double>(n);
      ga += a[k] * g[k];
    }
    for (std::size_t k = 0; k < s; ++k) z[k] -= options.learning_rate * a[k] * (g[k] - ga);
  }

  std::vector<double> fitted = softmax(z);
  if (vote_accuracy(copy_probs, fitted, labels) < vote_accuracy(copy_probs, uniform, labels)) {
    return uniform;
  }
  return fitted;
}

Ensemble fit_udu_weights(Ensemble ens, const LabeledDataset& validation,
                         std::span<const double> strengths, const UduFitOptions& options) {
  validate(ens);
  validate(validation);
  if (strengths.empty()) strengths = ens.strengths;
  check_strengths(strengths);
  if (options.crafter == nullptr) {
    require(std::equal(strengths.begin(), strengths.end(), ens.strengths.begin(), ens.strengths.end()),
            ErrorKind::kInvalidArgument,
            "fitting strengths must match the ensemble strengths when no crafter is given");
  }

  // Validation mixture: the clean rows followed by one crafted set per strength.
  const std::size_t n = validation.size();
  const std::size_t stride = validation.examples.row_size();
  Shape shape = validation.examples.shape();
  shape[0] = n * (strengths.size() + 1);
  Tensor mixture(shape);
  std::vector<int> labels;
  labels.reserve(shape[0]);
  std::copy(validation.examples.values().begin(), validation.examples.values().end(), mixture.data());
  labels.insert(labels.end(), validation.labels.begin(), validation.labels.end());
  for (std::size_t k = 0; k < strengths.size(); ++k) {
    const Network& crafter = options.crafter != nullptr ? *options.crafter : ens.copies[k];
    const Tensor adv = fgsm(crafter, validation.examples, validation.labels, AttackConfig{strengths[k]});
    std::copy(adv.values().begin(), adv.values().end(), mixture.data() + (k + 1) * n * stride);
    labels.insert(labels.end(), validation.labels.begin(), validation.labels.end());
  }

  std::vector<Tensor> copy_probs;
  for (const Network& copy : ens.copies) copy_probs.push_back(predict(copy, mixture).probabilities);
  ens.votes = fit_votes(copy_probs, labels, options);
  return ens;
}

}  // namespace advforge
