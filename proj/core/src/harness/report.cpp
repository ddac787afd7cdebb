#include "advforge/harness/report.hpp"

#include <cstdio>
#include <numeric>
#include <sstream>

#include "advforge/error.hpp"
#include "advforge/io.hpp"

namespace advforge {

namespace {

void check_curves(const std::vector<RobustnessCurve>& curves) {
  require(!curves.empty(), ErrorKind::kInvalidArgument, "report needs at least one curve");
  for (const auto& c : curves) {
    validate(c);
    require(c.attack_grid == curves.front().attack_grid, ErrorKind::kShapeMismatch,
            "curve '" + c.model_id + "' uses a different attack grid than '" + curves.front().model_id + "'");
  }
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string metadata_value(std::string v) {
  for (char& c : v) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return v;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  require(!quoted, ErrorKind::kConfig, "unterminated quoted CSV field");
  return fields;
}

std::string curves_csv(const std::vector<RobustnessCurve>& curves, const ReportMetadata& meta) {
  check_curves(curves);
  std::string out;
  out += "# seed=" + std::to_string(meta.seed) + "\n";
  out += "# config_digest=" + metadata_value(meta.config_digest) + "\n";
  out += "# victim=" + metadata_value(meta.victim) + "\n";
  for (const auto& [key, value] : meta.extra) out += "# " + key + "=" + metadata_value(value) + "\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    const std::string prefix = "# curve." + std::to_string(k) + ".";
    out += prefix + "crafting=" + metadata_value(c.crafting) + "\n";
    if (!c.config_digest.empty()) out += prefix + "config_digest=" + metadata_value(c.config_digest) + "\n";
    out += prefix + "average=" + format_double(c.average) + "\n";
  }
  out += "epsilon";
  for (const auto& c : curves) out += "," + csv_field(c.model_id);
  out += "\n";
  const auto& grid = curves.front().attack_grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out += format_double(grid[i]);
    for (const auto& c : curves) out += "," + format_double(c.accuracy[i]);
    out += "\n";
  }
  return out;
}

std::string curves_svg(const std::vector<RobustnessCurve>& curves, const std::string& title) {
  check_curves(curves);
  constexpr double kWidth = 760, kHeight = 460;
  constexpr double kLeft = 70, kRight = 200, kTop = 40, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto& grid = curves.front().attack_grid;
  const double x_lo = grid.front();
  const double x_hi = grid.size() > 1 ? grid.back() : grid.front() + 1.0;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - y) * plot_h; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(title) << "</text>\n";

  // Axes, grid lines and tick labels.
  out << "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (int t = 0; t <= 5; ++t) {
    const double y = py(t / 5.0);
    out << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(kLeft + plot_w)
        << "\" y2=\"" << fixed(y) << "\"/>\n";
  }
  out << "</g>\n";
  out << "<g stroke=\"black\" stroke-width=\"1.5\">\n";
  out << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(py(0)) << "\" x2=\"" << fixed(kLeft + plot_w)
      << "\" y2=\"" << fixed(py(0)) << "\"/>\n";
  out << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(py(0)) << "\" x2=\"" << fixed(kLeft)
      << "\" y2=\"" << fixed(py(1)) << "\"/>\n";
  out << "</g>\n";
  for (int t = 0; t <= 5; ++t) {
    out << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(py(t / 5.0) + 4)
        << "\" text-anchor=\"end\">" << fixed(t / 5.0, 1) << "</text>\n";
  }
  for (double x : grid) {
    out << "<text x=\"" << fixed(px(x)) << "\" y=\"" << fixed(py(0) + 18) << "\" text-anchor=\"middle\">"
        << format_double(x) << "</text>\n";
  }
  out << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << fixed(kHeight - 14)
      << "\" text-anchor=\"middle\">attack strength (epsilon)</text>\n";
  out << "<text transform=\"translate(18 " << fixed(kTop + plot_h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">test accuracy</text>\n";

  for (std::size_t k = 0; k < curves.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << (i ? " " : "") << fixed(px(grid[i])) << ',' << fixed(py(curves[k].accuracy[i]));
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << "<circle cx=\"" << fixed(px(grid[i])) << "\" cy=\"" << fixed(py(curves[k].accuracy[i]))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
  }

  const double legend_x = kLeft + plot_w + 20;
  out << "<g class=\"legend\">\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const double y = kTop + 10 + 22.0 * static_cast<double>(k);
    out << "<line x1=\"" << fixed(legend_x) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(legend_x + 24)
        << "\" y2=\"" << fixed(y) << "\" stroke=\"" << kPalette[k % std::size(kPalette)]
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fixed(legend_x + 30) << "\" y=\"" << fixed(y + 4) << "\">"
        << xml_escape(curves[k].model_id) << " (" << fixed(100.0 * curves[k].average) << "%)</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

ReportFiles emit_report(const std::vector<RobustnessCurve>& curves, const ReportMetadata& meta,
                        const std::filesystem::path& out_dir, const std::string& stem,
                        const std::string& title) {
  const std::string csv = curves_csv(curves, meta);
  const std::string svg = curves_svg(curves, title);
  ReportFiles files{out_dir / (stem + ".csv"), out_dir / (stem + ".svg")};
  write_file_atomic(files.csv, csv);
  write_file_atomic(files.svg, svg);
  return files;
}

ParsedReport parse_report_csv(const std::string& text) {
  ParsedReport report;
  std::istringstream in(text);
  bool header_seen = false;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = line.substr(line.find_first_not_of("# ") == std::string::npos
                                               ? line.size()
                                               : line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq != std::string::npos) report.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    const auto fields = split_csv_line(line);
    const std::string where = "report line " + std::to_string(line_no);
    if (!header_seen) {
      require(fields.size() >= 2 && fields[0] == "epsilon", ErrorKind::kConfig,
              where + ": expected header \"epsilon,<curves>\"");
      for (std::size_t k = 1; k < fields.size(); ++k) {
        RobustnessCurve c;
        c.model_id = fields[k];
        report.curves.push_back(std::move(c));
      }
      header_seen = true;
      continue;
    }
    require(fields.size() == report.curves.size() + 1, ErrorKind::kConfig,
            where + ": expected " + std::to_string(report.curves.size() + 1) + " fields");
    const double eps = parse_double(fields[0]);
    for (std::size_t k = 0; k < report.curves.size(); ++k) {
      report.curves[k].attack_grid.push_back(eps);
      report.curves[k].accuracy.push_back(parse_double(fields[k + 1]));
    }
  }
  require(header_seen, ErrorKind::kConfig, "report CSV has no header");
  for (std::size_t k = 0; k < report.curves.size(); ++k) {
    auto& c = report.curves[k];
    const std::string prefix = "curve." + std::to_string(k) + ".";
    for (const auto& [key, value] : report.metadata) {
      if (key == prefix + "crafting") c.crafting = value;
      if (key == prefix + "config_digest") c.config_digest = value;
    }
    c.average = std::accumulate(c.accuracy.begin(), c.accuracy.end(), 0.0) /
                static_cast<double>(std::max<std::size_t>(1, c.accuracy.size()));
    validate(c);
  }
  return report;
}

}  // namespace advforge
