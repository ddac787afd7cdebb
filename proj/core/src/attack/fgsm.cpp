#include "advforge/attack/fgsm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "advforge/error.hpp"
#include "advforge/io.hpp"
#include "advforge/nn/loss.hpp"

namespace advforge {

namespace {

constexpr std::size_t kCraftChunk = 256;

double sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

void validate(const AttackConfig& cfg) {
  require(std::isfinite(cfg.epsilon) && cfg.epsilon >= 0.0, ErrorKind::kInvalidArgument,
          "attack strength must be non-negative");
  require(cfg.clamp_lo < cfg.clamp_hi, ErrorKind::kInvalidArgument,
          "clamp_lo must be below clamp_hi");
}

Tensor fgsm(const Network& model, const Tensor& x, std::span<const int> y, const AttackConfig& cfg) {
  validate(cfg);
  require(x.rank() >= 1 && x.dim(0) == y.size(), ErrorKind::kShapeMismatch,
          "fgsm: " + std::to_string(y.size()) + " labels for batch shape " + to_string(x.shape()));
  for (double v : x.values()) {
    require(v >= cfg.clamp_lo && v <= cfg.clamp_hi, ErrorKind::kInvalidArgument,
            "fgsm: input value outside the clamp box");
  }
  if (cfg.epsilon == 0.0) return x;

  Tensor out = x;
  const std::size_t n = x.dim(0);
  for (std::size_t begin = 0; begin < n; begin += kCraftChunk) {
    const std::size_t end = std::min(n, begin + kCraftChunk);
    const Tensor chunk = begin == 0 && end == n ? x : slice_rows(x, begin, end);
    const auto acts = forward(model, chunk);
    const auto loss = softmax_cross_entropy(acts.logits(), y.subspan(begin, end - begin));
    const auto grads = backward(model, acts, loss.dlogits, GradTarget::kInput);
    const std::size_t offset = begin * x.row_size();
    for (std::size_t k = 0; k < chunk.size(); ++k) {
      const double moved = chunk[k] + cfg.epsilon * sign(grads.input_grad[k]);
      out[offset + k] = std::clamp(moved, cfg.clamp_lo, cfg.clamp_hi);
    }
  }
  return out;
}

std::string model_fingerprint(const Network& net) {
  std::string blob = describe(net.spec());
  for (const auto& p : net.params()) {
    for (const Tensor* t : {&p.weight, &p.bias}) {
      const auto* bytes = reinterpret_cast<const char*>(t->data());
      blob.append(bytes, t->size() * sizeof(double));
    }
  }
  return hex32(crc32(blob));
}

LabeledDataset craft_dataset(const Network& model, const LabeledDataset& ds,
                             const AttackConfig& cfg, const CraftOptions& options) {
  require(!ds.is_adversarial() || options.allow_reperturbation, ErrorKind::kInvalidArgument,
          "dataset '" + ds.name + "' is already " + to_string(ds.tag) +
              "; re-perturbation must be requested explicitly");
  LabeledDataset out;
  out.examples = fgsm(model, ds.examples, ds.labels, cfg);
  out.labels = ds.labels;
  out.class_count = ds.class_count;
  std::string crafting_id = "self:" + model_fingerprint(model);
  if (const auto* sub = std::get_if<SubstituteCrafting>(&cfg.crafting)) {
    crafting_id = "substitute:" + sub->checkpoint.string() + ":" + model_fingerprint(model);
  }
  out.tag = AdversarialTag{cfg.epsilon, std::move(crafting_id)};
  out.name = ds.name + "@fgsm";
  return out;
}

}  // namespace advforge
