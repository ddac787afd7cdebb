#include "advforge/data/mixed.hpp"

#include <algorithm>
#include <cmath>

#include "advforge/error.hpp"
#include "advforge/rng.hpp"

namespace advforge {

void check_strengths(std::span<const double> strengths, bool allow_zero) {
  require(!strengths.empty(), ErrorKind::kInvalidArgument,
          "at least one adversarial strength is required (S >= 1)");
  for (std::size_t i = 0; i < strengths.size(); ++i) {
    const double eps = strengths[i];
    require(std::isfinite(eps) && (allow_zero ? eps >= 0.0 : eps > 0.0), ErrorKind::kInvalidArgument,
            "strength " + std::to_string(eps) + (allow_zero ? " must be non-negative" : " must be positive"));
    for (std::size_t j = 0; j < i; ++j) {
      require(strengths[j] != eps, ErrorKind::kInvalidArgument,
              "strength " + std::to_string(eps) + " listed twice");
    }
  }
}

MixedPlan plan_mixed(std::size_t n_clean, std::size_t n_adv, const MixedBuildConfig& cfg,
                     std::optional<std::uint64_t> order_seed) {
  check_strengths(cfg.strengths, /*allow_zero=*/true);
  require(n_clean > 0, ErrorKind::kInvalidArgument, "clean set is empty");
  const std::size_t s = cfg.strengths.size();

  MixedPlan plan;
  plan.part_rows.resize(s + 1);
  if (std::holds_alternative<FullSize>(cfg.size_mode)) {
    for (std::size_t part = 0; part <= s; ++part) {
      plan.part_rows[part].resize(part == 0 ? n_clean : n_adv);
      for (std::size_t r = 0; r < plan.part_rows[part].size(); ++r) plan.part_rows[part][r] = r;
    }
  } else {
    const auto& reduced = std::get<ReducedSize>(cfg.size_mode);
    const double fraction = reduced.fraction.value_or(1.0 / static_cast<double>(s + 1));
    require(fraction > 0.0 && fraction <= 1.0, ErrorKind::kInvalidArgument,
            "reduced-size fraction must lie in (0, 1]");
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n_clean) + 1e-9)));
    require(count <= n_adv, ErrorKind::kInvalidArgument,
            "adversarial sets hold " + std::to_string(n_adv) + " examples, reduced mode needs " +
                std::to_string(count));
    for (std::size_t part = 0; part <= s; ++part) {
      Rng rng(derive_seed(cfg.seed, part));
      auto order = rng.permutation(part == 0 ? n_clean : n_adv);
      order.resize(count);
      std::sort(order.begin(), order.end());
      plan.part_rows[part] = std::move(order);
    }
  }

  for (std::size_t part = 0; part <= s; ++part) {
    for (std::size_t r : plan.part_rows[part]) {
      plan.order.emplace_back(static_cast<std::uint32_t>(part), static_cast<std::uint32_t>(r));
    }
  }
  Rng shuffle(order_seed.value_or(derive_seed(cfg.seed, 0x5EED)));
  const auto perm = shuffle.permutation(plan.order.size());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> shuffled(plan.order.size());
  for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = plan.order[perm[i]];
  plan.order = std::move(shuffled);
  return plan;
}

LabeledDataset assemble_mixed(const MixedPlan& plan, std::span<const LabeledDataset* const> parts) {
  require(parts.size() == plan.part_rows.size(), ErrorKind::kInvalidArgument,
          "mixed plan expects " + std::to_string(plan.part_rows.size()) + " parts, got " +
              std::to_string(parts.size()));
  const LabeledDataset& clean = *parts[0];
  for (std::size_t k = 1; k < parts.size(); ++k) {
    require(parts[k]->example_shape() == clean.example_shape(), ErrorKind::kShapeMismatch,
            "part " + std::to_string(k) + " has example shape " +
                to_string(parts[k]->example_shape()) + ", clean set has " +
                to_string(clean.example_shape()));
    require(parts[k]->class_count == clean.class_count, ErrorKind::kShapeMismatch,
            "part " + std::to_string(k) + " disagrees on class_count");
  }

  Shape shape = clean.examples.shape();
  shape[0] = plan.size();
  LabeledDataset out;
  out.examples = Tensor(shape);
  out.labels.resize(plan.size());
  out.class_count = clean.class_count;
  const std::size_t stride = clean.examples.row_size();
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto [part, row] = plan.order[i];
    const LabeledDataset& src = *parts[part];
    require(row < src.size(), ErrorKind::kInvalidArgument, "mixed plan row out of range");
    std::copy_n(src.examples.data() + row * stride, stride, out.examples.data() + i * stride);
    out.labels[i] = src.labels[row];
  }
  return out;
}

LabeledDataset build_mixed_dataset(const LabeledDataset& clean,
                                   std::span<const LabeledDataset> adv_sets,
                                   const MixedBuildConfig& cfg) {
  require(!adv_sets.empty() && !cfg.strengths.empty(), ErrorKind::kInvalidArgument,
          "mixed dataset needs S >= 1 adversarial sets");
  require(adv_sets.size() == cfg.strengths.size(), ErrorKind::kInvalidArgument,
          "got " + std::to_string(adv_sets.size()) + " adversarial sets for " +
              std::to_string(cfg.strengths.size()) + " strengths");
  const std::size_t n_adv = adv_sets[0].size();
  std::vector<const LabeledDataset*> parts{&clean};
  for (std::size_t k = 0; k < adv_sets.size(); ++k) {
    const auto* tag = std::get_if<AdversarialTag>(&adv_sets[k].tag);
    require(tag != nullptr && tag->epsilon == cfg.strengths[k], ErrorKind::kInvalidArgument,
            "adversarial set " + std::to_string(k) + " is tagged " + to_string(adv_sets[k].tag) +
                ", expected strength " + std::to_string(cfg.strengths[k]));
    require(adv_sets[k].size() == n_adv, ErrorKind::kInvalidArgument,
            "adversarial sets differ in size");
    parts.push_back(&adv_sets[k]);
  }
  auto out = assemble_mixed(plan_mixed(clean.size(), n_adv, cfg), parts);
  out.tag = MixtureTag{cfg.strengths};
  out.name = clean.name + "+mixed";
  return out;
}

}  // namespace advforge
