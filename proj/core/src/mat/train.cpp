#include "advforge/mat/train.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "advforge/attack/fgsm.hpp"
#include "advforge/error.hpp"
#include "advforge/nn/loss.hpp"
#include "advforge/nn/optimizer.hpp"
#include "advforge/rng.hpp"

namespace advforge {

namespace {

// Streams of derive_seed(cfg.seed, ...) used by the trainers.
constexpr std::uint64_t kSubsampleStream = 1;
constexpr std::uint64_t kEpochOrderStream = 1000;

std::string run_label(std::span<const double> strengths, const SizeMode& mode) {
  if (strengths.empty()) return "plain";
  std::ostringstream out;
  out << (strengths.size() == 1 && std::holds_alternative<FullSize>(mode) ? "single(" : "mixed(");
  for (std::size_t i = 0; i < strengths.size(); ++i) out << (i ? "," : "") << strengths[i];
  out << ")";
  if (std::holds_alternative<ReducedSize>(mode)) out << "-reduced";
  return out.str();
}

MixedBuildConfig mixed_config(const TrainConfig& cfg, std::span<const double> strengths,
                              const SizeMode& mode) {
  return {std::vector<double>(strengths.begin(), strengths.end()), mode,
          derive_seed(cfg.seed, kSubsampleStream)};
}

// One epoch's worth of training data: parts[0] is the clean set, parts[k] the
// compact crafted rows for strength k-1; order indexes into the parts.
struct EpochData {
  std::vector<Tensor> crafted;
  std::vector<std::vector<std::size_t>> sources;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> order;

  const double* row(const LabeledDataset& clean, std::size_t i) const {
    const auto [part, pos] = order[i];
    const std::size_t stride = clean.examples.row_size();
    return part == 0 ? clean.examples.data() + pos * stride : crafted[part - 1].data() + pos * stride;
  }
  // Row of the clean set that entry i was made from.
  std::size_t source(std::size_t i) const {
    const auto [part, pos] = order[i];
    return part == 0 ? pos : sources[part - 1][pos];
  }
  int label(const LabeledDataset& clean, std::size_t i) const { return clean.labels[source(i)]; }
};

// With a null crafter and nothing to reuse, the adversarial rows are left
// uncrafted and only the composition is planned.
EpochData prepare_epoch(const Network* crafter, const TrainConfig& cfg, const LabeledDataset& clean,
                        std::span<const double> strengths, const SizeMode& mode, std::size_t epoch,
                        const std::vector<Tensor>* reuse) {
  EpochData data;
  const std::uint64_t order_seed = derive_seed(cfg.seed, kEpochOrderStream + epoch);
  if (strengths.empty()) {
    Rng rng(order_seed);
    for (std::size_t r : rng.permutation(clean.size())) {
      data.order.emplace_back(0u, static_cast<std::uint32_t>(r));
    }
    return data;
  }

  const MixedPlan plan = plan_mixed(clean.size(), clean.size(), mixed_config(cfg, strengths, mode), order_seed);
  data.sources.assign(plan.part_rows.begin() + 1, plan.part_rows.end());
  if (reuse != nullptr) {
    data.crafted = *reuse;
  } else if (crafter != nullptr) {
    for (std::size_t k = 0; k < strengths.size(); ++k) {
      const auto& rows = plan.part_rows[k + 1];
      const Tensor x = gather_rows(clean.examples, rows);
      std::vector<int> y;
      y.reserve(rows.size());
      for (std::size_t r : rows) y.push_back(clean.labels[r]);
      data.crafted.push_back(fgsm(*crafter, x, y, AttackConfig{strengths[k], cfg.clamp_lo, cfg.clamp_hi}));
    }
  }

  // Adversarial parts are stored compactly; map source rows to positions.
  data.order.reserve(plan.size());
  for (const auto& [part, row] : plan.order) {
    if (part == 0) {
      data.order.emplace_back(part, row);
      continue;
    }
    const auto& rows = plan.part_rows[part];
    const auto pos = std::lower_bound(rows.begin(), rows.end(), std::size_t{row}) - rows.begin();
    data.order.emplace_back(part, static_cast<std::uint32_t>(pos));
  }
  return data;
}

// Replaces the adversarial rows of a batch (still holding their clean
// sources) with FGSM examples crafted against `net`, one call per strength.
void craft_batch_rows(const Network& net, const TrainConfig& cfg, std::span<const double> strengths,
                      const EpochData& data, std::size_t begin, Tensor& batch, const std::vector<int>& labels) {
  const std::size_t stride = batch.row_size();
  for (std::size_t k = 0; k < strengths.size(); ++k) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < labels.size(); ++r) {
      if (data.order[begin + r].first == k + 1) rows.push_back(r);
    }
    if (rows.empty()) continue;
    const Tensor x = gather_rows(batch, rows);
    std::vector<int> y;
    y.reserve(rows.size());
    for (std::size_t r : rows) y.push_back(labels[r]);
    const Tensor adv = fgsm(net, x, y, AttackConfig{strengths[k], cfg.clamp_lo, cfg.clamp_hi});
    for (std::size_t j = 0; j < rows.size(); ++j) {
      std::copy_n(adv.data() + j * stride, stride, batch.data() + rows[j] * stride);
    }
  }
}

Network run_training(const TrainConfig& cfg, const LabeledDataset& clean,
                     std::span<const double> strengths, const SizeMode& mode) {
  validate(cfg);
  validate(clean);
  require(clean.example_shape() == cfg.spec.input_shape, ErrorKind::kShapeMismatch,
          "training data example shape " + to_string(clean.example_shape()) +
              " does not match the network input " + to_string(cfg.spec.input_shape));
  require(clean.class_count == cfg.spec.class_count, ErrorKind::kShapeMismatch,
          "training data has " + std::to_string(clean.class_count) + " classes, network has " +
              std::to_string(cfg.spec.class_count));

  Network net = init_network(cfg.spec, cfg.seed);
  OptimizerState state;
  const std::string label = run_label(strengths, mode);
  const std::size_t stride = clean.examples.row_size();

  std::optional<Network> initial;
  if (cfg.crafting == CraftSchedule::kStatic && !cfg.substitute) initial = net;
  std::optional<std::vector<Tensor>> frozen;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Network* crafter = &net;
    if (cfg.crafting == CraftSchedule::kPerBatch) crafter = nullptr;
    if (cfg.crafting == CraftSchedule::kStatic) crafter = cfg.substitute ? cfg.substitute.get() : &*initial;
    EpochData data = prepare_epoch(crafter, cfg, clean, strengths, mode, epoch, frozen ? &*frozen : nullptr);
    if (cfg.crafting == CraftSchedule::kStatic && !frozen) frozen = data.crafted;

    double loss_sum = 0.0;
    const std::size_t n = data.order.size();
    for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
      const std::size_t end = std::min(n, begin + cfg.batch_size);
      Shape shape = clean.examples.shape();
      shape[0] = end - begin;
      Tensor batch(shape);
      std::vector<int> labels(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        const double* src = data.crafted.empty() ? clean.examples.data() + data.source(i) * stride
                                                 : data.row(clean, i);
        std::copy_n(src, stride, batch.data() + (i - begin) * stride);
        labels[i - begin] = data.label(clean, i);
      }
      if (data.crafted.empty()) craft_batch_rows(net, cfg, strengths, data, begin, batch, labels);
      const auto acts = forward(net, batch);
      const auto loss = softmax_cross_entropy(acts.logits(), labels);
      const auto grads = backward(net, acts, loss.dlogits, GradTarget::kParameters);
      sgd_step(net, grads, cfg.lr, cfg.momentum, state);
      loss_sum += loss.loss * static_cast<double>(end - begin);
    }
    if (cfg.on_epoch) cfg.on_epoch({label, epoch, n, loss_sum / static_cast<double>(n)});
  }
  return net;
}

}  // namespace

std::string to_string(CraftSchedule schedule) {
  switch (schedule) {
    case CraftSchedule::kPerBatch: return "batch";
    case CraftSchedule::kPerEpoch: return "epoch";
    case CraftSchedule::kStatic: return "static";
  }
  return "batch";
}

CraftSchedule parse_craft_schedule(const std::string& text) {
  if (text == "batch") return CraftSchedule::kPerBatch;
  if (text == "epoch") return CraftSchedule::kPerEpoch;
  if (text == "static") return CraftSchedule::kStatic;
  fail(ErrorKind::kInvalidArgument, "crafting schedule must be batch, epoch or static, got '" + text + "'");
}

void validate(const TrainConfig& cfg) {
  validate(cfg.spec);
  require(cfg.epochs >= 1, ErrorKind::kInvalidArgument, "epochs must be at least 1");
  require(cfg.batch_size >= 1, ErrorKind::kInvalidArgument, "batch_size must be at least 1");
  require(cfg.lr > 0.0, ErrorKind::kInvalidArgument, "learning rate must be positive");
  require(cfg.momentum >= 0.0 && cfg.momentum < 1.0, ErrorKind::kInvalidArgument,
          "momentum must lie in [0, 1)");
  require(cfg.clamp_lo < cfg.clamp_hi, ErrorKind::kInvalidArgument, "clamp_lo must be below clamp_hi");
}

Network train_plain(const TrainConfig& cfg, const LabeledDataset& clean) {
  return run_training(cfg, clean, {}, FullSize{});
}

Network train_single_strength(const TrainConfig& cfg, const LabeledDataset& clean, double eps) {
  require(std::isfinite(eps) && eps >= 0.0, ErrorKind::kInvalidArgument,
          "single-strength training needs eps >= 0");
  const double strengths[] = {eps};
  return run_training(cfg, clean, strengths, FullSize{});
}

Network train_mixed_mat(const TrainConfig& cfg, const LabeledDataset& clean,
                        const std::vector<double>& strengths, const SizeMode& size_mode) {
  check_strengths(strengths);
  return run_training(cfg, clean, strengths, size_mode);
}

Ensemble train_parallel_mat(const TrainConfig& cfg, const LabeledDataset& clean,
                            const std::vector<double>& strengths,
                            const std::optional<NetworkSpec>& copy_spec, Execution execution) {
  check_strengths(strengths);
  auto copy_config = [&](std::size_t k) {
    TrainConfig c = cfg;
    c.seed = cfg.seed + k;
    if (copy_spec) c.spec = *copy_spec;
    return c;
  };

  Ensemble ens;
  ens.strengths = strengths;
  ens.votes.assign(strengths.size(), 1.0 / static_cast<double>(strengths.size()));
  if (execution == Execution::kConcurrent) {
    std::vector<std::future<Network>> jobs;
    for (std::size_t k = 0; k < strengths.size(); ++k) {
      jobs.push_back(std::async(std::launch::async, [&, k] {
        return train_single_strength(copy_config(k), clean, strengths[k]);
      }));
    }
    for (auto& job : jobs) ens.copies.push_back(job.get());
  } else {
    for (std::size_t k = 0; k < strengths.size(); ++k) {
      ens.copies.push_back(train_single_strength(copy_config(k), clean, strengths[k]));
    }
  }
  return ens;
}

LabeledDataset epoch_training_set(const Network& current, const TrainConfig& cfg,
                                  const LabeledDataset& clean, std::span<const double> strengths,
                                  const SizeMode& size_mode, std::size_t epoch) {
  // Static crafting always attacks the substitute or the initial model.
  std::optional<Network> initial;
  const Network* crafter = &current;
  if (cfg.crafting == CraftSchedule::kStatic) {
    if (cfg.substitute) {
      crafter = cfg.substitute.get();
    } else {
      initial = init_network(cfg.spec, cfg.seed);
      crafter = &*initial;
    }
  }
  const EpochData data = prepare_epoch(crafter, cfg, clean, strengths, size_mode, epoch, nullptr);
  const std::size_t stride = clean.examples.row_size();
  Shape shape = clean.examples.shape();
  shape[0] = data.order.size();
  LabeledDataset out{Tensor(shape), std::vector<int>(data.order.size()), clean.class_count,
                     MixtureTag{std::vector<double>(strengths.begin(), strengths.end())},
                     clean.name + "+epoch"};
  for (std::size_t i = 0; i < data.order.size(); ++i) {
    std::copy_n(data.row(clean, i), stride, out.examples.data() + i * stride);
    out.labels[i] = data.label(clean, i);
  }
  return out;
}

}  // namespace advforge
