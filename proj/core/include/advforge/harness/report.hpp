#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "advforge/harness/robustness.hpp"

namespace advforge {

struct ReportMetadata {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string victim;  // describe() of the victim spec
  std::vector<std::pair<std::string, std::string>> extra;
};

struct ReportFiles {
  std::filesystem::path csv;
  std::filesystem::path svg;
};

/// '#' metadata lines, then "epsilon,<curve ids...>" and one row per grid point.
std::string curves_csv(const std::vector<RobustnessCurve>& curves, const ReportMetadata& meta);

/// Line chart of accuracy against attack strength with one series per curve.
std::string curves_svg(const std::vector<RobustnessCurve>& curves, const std::string& title);

/// Writes <stem>.csv and <stem>.svg into `out_dir`. Curves must share a grid.
ReportFiles emit_report(const std::vector<RobustnessCurve>& curves, const ReportMetadata& meta,
                        const std::filesystem::path& out_dir, const std::string& stem = "robustness",
                        const std::string& title = "Robustness");

struct ParsedReport {
  std::vector<std::pair<std::string, std::string>> metadata;  // "# key=value" lines in order
  std::vector<RobustnessCurve> curves;
};

/// Reads a file produced by curves_csv back into curves.
ParsedReport parse_report_csv(const std::string& text);

/// RFC 4180 field splitting and quoting.
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_field(const std::string& text);

}  // namespace advforge
