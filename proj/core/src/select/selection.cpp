#include "advforge/select/selection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <unordered_map>

#include "advforge/error.hpp"
#include "advforge/rng.hpp"

namespace advforge {

namespace {

// Scores this close are treated as equal so ties fall to the size rule.
constexpr double kScoreTolerance = 1e-12;

using Mask = std::uint64_t;

std::vector<std::size_t> mask_rows(Mask mask) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1) rows.push_back(i);
  }
  return rows;
}

struct Scored {
  Mask mask = 0;
  double score = 0.0;
  double estimate = 0.0;
};

bool better(const Scored& a, const Scored& b) {
  if (b.mask == 0) return a.mask != 0;
  if (std::abs(a.score - b.score) > kScoreTolerance) return a.score > b.score;
  const int ca = std::popcount(a.mask);
  const int cb = std::popcount(b.mask);
  if (ca != cb) return ca < cb;
  // Rows are ascending in strength, so comparing row lists compares strength sets.
  const auto ra = mask_rows(a.mask);
  const auto rb = mask_rows(b.mask);
  return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
}

Scored score_mask(const AccuracyMatrix& a, Mask mask, double penalty, CoverageMode mode) {
  const double h = coverage_estimate(a, mask_rows(mask), mode);
  return {mask, h - penalty * std::popcount(mask), h};
}

SelectionResult to_result(const AccuracyMatrix& a, const Scored& best, std::size_t walks,
                          CoverageMode mode) {
  SelectionResult r;
  r.chosen_rows = mask_rows(best.mask);
  for (std::size_t i : r.chosen_rows) r.chosen.push_back(a.row_strengths[i]);
  r.score = best.score;
  r.estimate = best.estimate;
  r.walks_evaluated = walks;
  r.mode = mode;
  return r;
}

std::size_t sample(Rng& rng, const double* weights, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += weights[i];
  if (total <= 0.0) return rng.index(n);
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

Scored run_walks(const AccuracyMatrix& a, const RandomWalkConfig& cfg, std::size_t steps,
                 const std::vector<double>& start, const std::vector<double>& p,
                 std::size_t first, std::size_t last) {
  const std::size_t m = a.rows();
  std::unordered_map<Mask, Scored> memo;
  Scored best;
  for (std::size_t w = first; w < last; ++w) {
    Rng rng(derive_seed(cfg.seed, w));
    std::size_t state = sample(rng, start.data(), m);
    Mask visited = Mask{1} << state;
    for (std::size_t step = 0;; ++step) {
      auto it = memo.find(visited);
      if (it == memo.end()) it = memo.emplace(visited, score_mask(a, visited, cfg.penalty, cfg.mode)).first;
      if (better(it->second, best)) best = it->second;
      if (step == steps) break;
      state = sample(rng, p.data() + state * m, m);
      visited |= Mask{1} << state;
    }
  }
  return best;
}

}  // namespace

std::string to_string(CoverageMode mode) {
  return mode == CoverageMode::kParallel ? "parallel" : "mixed";
}

CoverageMode parse_coverage_mode(const std::string& text) {
  if (text == "parallel") return CoverageMode::kParallel;
  if (text == "mixed") return CoverageMode::kMixed;
  fail(ErrorKind::kInvalidArgument, "unknown coverage mode '" + text + "' (expected parallel or mixed)");
}

double coverage_estimate(const AccuracyMatrix& a, const std::vector<std::size_t>& rows,
                         CoverageMode mode) {
  require(!rows.empty(), ErrorKind::kInvalidArgument, "coverage of an empty strength set");
  for (std::size_t i : rows) {
    require(i < a.rows(), ErrorKind::kInvalidArgument, "row " + std::to_string(i) + " out of range");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double col = 0.0;
    for (std::size_t i : rows) {
      col = mode == CoverageMode::kParallel ? std::max(col, a(i, j)) : col + a(i, j);
    }
    if (mode == CoverageMode::kMixed) col /= static_cast<double>(rows.size());
    total += col;
  }
  return total / static_cast<double>(a.cols());
}

SelectionResult random_walk_select(const AccuracyMatrix& a, const RandomWalkConfig& cfg) {
  validate(a);
  require(cfg.penalty >= 0.0, ErrorKind::kInvalidArgument, "penalty must be non-negative");
  const std::size_t m = a.rows();
  require(m <= 64, ErrorKind::kInvalidArgument,
          "random walk supports at most 64 candidates, got " + std::to_string(m));
  if (m == 1) return to_result(a, score_mask(a, 1, cfg.penalty, cfg.mode), 0, cfg.mode);

  const std::size_t steps = cfg.steps == 0 ? 2 * m : cfg.steps;
  const std::size_t walks = cfg.walks == 0 ? 100 * m : cfg.walks;
  std::vector<double> start(m);
  for (std::size_t i = 0; i < m; ++i) start[i] = a.row_mean(i);
  const std::vector<double> p = transition_matrix(a);

  const std::size_t threads = std::clamp<std::size_t>(cfg.threads, 1, walks);
  Scored best;
  if (threads == 1) {
    best = run_walks(a, cfg, steps, start, p, 0, walks);
  } else {
    std::vector<std::future<Scored>> jobs;
    for (std::size_t t = 0; t < threads; ++t) {
      jobs.push_back(std::async(std::launch::async, run_walks, std::cref(a), std::cref(cfg), steps,
                                std::cref(start), std::cref(p), walks * t / threads,
                                walks * (t + 1) / threads));
    }
    for (auto& job : jobs) {
      const Scored s = job.get();
      if (better(s, best)) best = s;
    }
  }
  return to_result(a, best, walks, cfg.mode);
}

SelectionResult brute_force_select(const AccuracyMatrix& a, double penalty, CoverageMode mode) {
  validate(a);
  require(penalty >= 0.0, ErrorKind::kInvalidArgument, "penalty must be non-negative");
  require(a.rows() <= 20, ErrorKind::kInvalidArgument,
          "exhaustive selection supports at most 20 candidates, got " + std::to_string(a.rows()));
  Scored best;
  for (Mask mask = 1; mask < (Mask{1} << a.rows()); ++mask) {
    const Scored s = score_mask(a, mask, penalty, mode);
    if (better(s, best)) best = s;
  }
  return to_result(a, best, 0, mode);
}

}  // namespace advforge
