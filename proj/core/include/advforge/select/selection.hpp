#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "advforge/select/accuracy_matrix.hpp"

namespace advforge {

/// How a set of rows is expected to cover the attack columns: parallel takes
/// the best row per column (an ensemble with an upper-boundary vote), mixed
/// the average row (one model blending all strengths).
enum class CoverageMode { kParallel, kMixed };

std::string to_string(CoverageMode mode);
CoverageMode parse_coverage_mode(const std::string& text);

struct RandomWalkConfig {
  std::size_t steps = 0;  // l; 0 means 2m
  std::size_t walks = 0;  // t; 0 means 100m
  double penalty = 0.01;  // a, per selected strength
  std::uint64_t seed = 1;
  CoverageMode mode = CoverageMode::kParallel;
  std::size_t threads = 1;
};

struct SelectionResult {
  std::vector<double> chosen;            // ascending strengths
  std::vector<std::size_t> chosen_rows;  // matching row indices
  double score = 0.0;                    // G = H - a |chosen|
  double estimate = 0.0;                 // H
  std::size_t walks_evaluated = 0;
  CoverageMode mode = CoverageMode::kParallel;
};

/// Mean over columns of the max (parallel) or mean (mixed) over `rows`.
double coverage_estimate(const AccuracyMatrix& a, const std::vector<std::size_t>& rows,
                         CoverageMode mode);

/// t walks of l steps each. A walk starts at a state drawn in proportion to the
/// row means; every prefix of its visited set is a candidate. The best score
/// wins; ties prefer fewer strengths, then the lexicographically smaller set.
SelectionResult random_walk_select(const AccuracyMatrix& a, const RandomWalkConfig& cfg);

/// Exhaustive search over all non-empty row subsets (m <= 20).
SelectionResult brute_force_select(const AccuracyMatrix& a, double penalty, CoverageMode mode);

}  // namespace advforge
