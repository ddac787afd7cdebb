#include "advforge/select/accuracy_matrix.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "advforge/attack/fgsm.hpp"
#include "advforge/error.hpp"
#include "advforge/io.hpp"
#include "advforge/nn/loss.hpp"
#include "advforge/rng.hpp"

namespace advforge {

namespace {

constexpr std::uint64_t kHoldoutStream = 0xACC;

void check_axis(const std::vector<double>& axis, const char* name) {
  require(!axis.empty(), ErrorKind::kInvalidArgument, std::string(name) + " must not be empty");
  for (std::size_t i = 0; i < axis.size(); ++i) {
    require(std::isfinite(axis[i]) && axis[i] >= 0.0, ErrorKind::kInvalidArgument,
            std::string(name) + " must be non-negative");
    require(i == 0 || axis[i - 1] < axis[i], ErrorKind::kInvalidArgument,
            std::string(name) + " must be strictly ascending");
  }
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

double AccuracyMatrix::row_mean(std::size_t i) const {
  const auto begin = values.begin() + static_cast<std::ptrdiff_t>(i * cols());
  return std::accumulate(begin, begin + static_cast<std::ptrdiff_t>(cols()), 0.0) /
         static_cast<double>(cols());
}

void validate(const AccuracyMatrix& a) {
  check_axis(a.row_strengths, "candidate strengths");
  check_axis(a.col_attacks, "attack strengths");
  require(a.values.size() == a.rows() * a.cols(), ErrorKind::kShapeMismatch,
          "accuracy matrix holds " + std::to_string(a.values.size()) + " entries, expected " +
              std::to_string(a.rows() * a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double v = a(i, j);
      require(std::isfinite(v) && v >= 0.0 && v <= 1.0, ErrorKind::kInvalidArgument,
              "accuracy entry (" + std::to_string(i) + ", " + std::to_string(j) + ") = " +
                  format_double(v) + " is outside [0, 1]");
    }
  }
}

AccuracyMatrix build_accuracy_matrix(const TrainConfig& cfg, const LabeledDataset& train,
                                     const LabeledDataset& validation,
                                     const std::vector<double>& candidates,
                                     const std::vector<double>& attack_grid) {
  check_axis(candidates, "candidate strengths");
  check_axis(attack_grid, "attack strengths");
  validate(validation);

  AccuracyMatrix a{candidates, attack_grid, std::vector<double>(candidates.size() * attack_grid.size())};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    TrainConfig row_cfg = cfg;
    row_cfg.seed = cfg.seed + i;
    const Network model = train_single_strength(row_cfg, train, candidates[i]);
    for (std::size_t j = 0; j < attack_grid.size(); ++j) {
      const Tensor x = attack_grid[j] == 0.0
                           ? validation.examples
                           : fgsm(model, validation.examples, validation.labels,
                                  AttackConfig{attack_grid[j], cfg.clamp_lo, cfg.clamp_hi});
      a(i, j) = accuracy(predict(model, x).labels, validation.labels);
    }
  }
  return a;
}

AccuracyMatrix build_accuracy_matrix(const TrainConfig& cfg, const LabeledDataset& clean,
                                     const std::vector<double>& candidates,
                                     const std::vector<double>& attack_grid) {
  validate(clean);
  require(clean.size() >= 2, ErrorKind::kInvalidArgument, "need at least 2 examples to hold out validation");
  Rng rng(derive_seed(cfg.seed, kHoldoutStream));
  const auto order = rng.permutation(clean.size());
  const std::size_t held = std::max<std::size_t>(1, clean.size() / 10);
  const std::span<const std::size_t> all(order);
  return build_accuracy_matrix(cfg, subset(clean, all.subspan(held)), subset(clean, all.first(held)),
                               candidates, attack_grid);
}

AccuracyMatrix normalize_matrix(const AccuracyMatrix& a) {
  validate(a);
  AccuracyMatrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) sum += a(i, j);
    require(sum > 0.0, ErrorKind::kNumeric,
            "row " + std::to_string(i) + " (eps " + format_double(a.row_strengths[i]) +
                ") has zero total accuracy and cannot be normalized");
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) / sum;
  }
  return out;
}

std::vector<double> transition_matrix(const AccuracyMatrix& a) {
  validate(a);
  const std::size_t m = a.rows();
  require(m >= 2, ErrorKind::kInvalidArgument, "transition matrix needs at least 2 candidates");
  std::vector<double> r(m);
  for (std::size_t i = 0; i < m; ++i) r[i] = a.row_mean(i);
  const double total = std::accumulate(r.begin(), r.end(), 0.0);
  require(total > 0.0, ErrorKind::kNumeric, "every candidate has zero mean accuracy");

  std::vector<double> p(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double others = 0.0;
    for (std::size_t k = 0; k < m; ++k) others += k == i ? 0.0 : r[k];
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      // A state whose peers all score zero still has to move somewhere.
      p[i * m + j] = others > 0.0 ? r[j] / others : 1.0 / static_cast<double>(m - 1);
    }
  }
  return p;
}

std::string to_csv(const AccuracyMatrix& a) {
  validate(a);
  std::string out = "eps";
  for (double c : a.col_attacks) out += "," + format_double(c);
  out += "\n";
  for (std::size_t i = 0; i < a.rows(); ++i) {
    out += format_double(a.row_strengths[i]);
    for (std::size_t j = 0; j < a.cols(); ++j) out += "," + format_double(a(i, j));
    out += "\n";
  }
  return out;
}

AccuracyMatrix accuracy_matrix_from_csv(const std::string& text) {
  AccuracyMatrix a;
  bool header_seen = false;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_commas(line);
    const std::string where = "accuracy matrix line " + std::to_string(line_no);
    try {
      if (!header_seen) {
        require(fields.size() >= 2 && fields[0] == "eps", ErrorKind::kConfig,
                where + ": expected header \"eps,<attack strengths>\"");
        for (std::size_t j = 1; j < fields.size(); ++j) a.col_attacks.push_back(parse_double(fields[j]));
        header_seen = true;
        continue;
      }
      require(fields.size() == a.cols() + 1, ErrorKind::kConfig,
              where + ": expected " + std::to_string(a.cols() + 1) + " fields, found " +
                  std::to_string(fields.size()));
      a.row_strengths.push_back(parse_double(fields[0]));
      for (std::size_t j = 1; j < fields.size(); ++j) a.values.push_back(parse_double(fields[j]));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kConfig) throw;
      fail(ErrorKind::kConfig, where + ": " + e.what());
    }
  }
  require(header_seen, ErrorKind::kConfig, "accuracy matrix CSV has no header");
  validate(a);
  return a;
}

void save_accuracy_matrix(const AccuracyMatrix& a, const std::filesystem::path& path) {
  write_file_atomic(path, to_csv(a));
}

AccuracyMatrix load_accuracy_matrix(const std::filesystem::path& path) {
  return accuracy_matrix_from_csv(read_file_text(path));
}

}  // namespace advforge
