#include "advforge/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "advforge/error.hpp"
#include "advforge/io.hpp"

namespace advforge {

namespace {

namespace pt = boost::property_tree;

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  require(ec == std::errc{} && end == text.data() + text.size() && !text.empty(), ErrorKind::kConfig,
          "expected a non-negative integer, got '" + text + "'");
  return v;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) out.push_back(parse_double(item));
  require(!out.empty(), ErrorKind::kConfig, "expected a comma-separated list of numbers");
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    out.push_back(parse_u64(first == std::string::npos ? "" : item.substr(first, last - first + 1)));
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

void check_ascending(const std::vector<double>& v, const char* name, bool from_zero) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(std::isfinite(v[i]) && v[i] >= 0.0, ErrorKind::kConfig, std::string(name) + " must be non-negative");
    require(i == 0 || v[i] > v[i - 1], ErrorKind::kConfig, std::string(name) + " must be strictly ascending");
  }
  require(!from_zero || v.front() == 0.0, ErrorKind::kConfig, std::string(name) + " must start at 0");
}

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"",
       {{"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = parse_u64(v); }}}},
      {"model",
       {{"arch", [](ExperimentConfig& c, const std::string& v) { c.model.arch = v; }},
        {"hidden", [](ExperimentConfig& c, const std::string& v) { c.model.hidden = parse_sizes(v); }}}},
      {"train",
       {{"epochs", [](ExperimentConfig& c, const std::string& v) { c.train.epochs = parse_u64(v); }},
        {"batch_size", [](ExperimentConfig& c, const std::string& v) { c.train.batch_size = parse_u64(v); }},
        {"lr", [](ExperimentConfig& c, const std::string& v) { c.train.lr = parse_double(v); }},
        {"momentum", [](ExperimentConfig& c, const std::string& v) { c.train.momentum = parse_double(v); }},
        {"crafting", [](ExperimentConfig& c, const std::string& v) { c.train.crafting = parse_craft_schedule(v); }},
        {"epsilon", [](ExperimentConfig& c, const std::string& v) { c.train.epsilon = parse_double(v); }},
        {"strengths", [](ExperimentConfig& c, const std::string& v) { c.train.strengths = parse_doubles(v); }},
        {"size_mode", [](ExperimentConfig& c, const std::string& v) { c.train.size_mode = v; }},
        {"reduced_fraction",
         [](ExperimentConfig& c, const std::string& v) { c.train.reduced_fraction = parse_double(v); }},
        {"limit", [](ExperimentConfig& c, const std::string& v) { c.train.limit = parse_u64(v); }},
        {"vote_iterations",
         [](ExperimentConfig& c, const std::string& v) { c.train.vote_iterations = parse_u64(v); }},
        {"vote_lr", [](ExperimentConfig& c, const std::string& v) { c.train.vote_lr = parse_double(v); }},
        {"validation_fraction",
         [](ExperimentConfig& c, const std::string& v) { c.train.validation_fraction = parse_double(v); }}}},
      {"attack",
       {{"epsilon", [](ExperimentConfig& c, const std::string& v) { c.attack.epsilon = parse_double(v); }},
        {"grid", [](ExperimentConfig& c, const std::string& v) { c.attack.grid = parse_doubles(v); }},
        {"substitute", [](ExperimentConfig& c, const std::string& v) { c.attack.substitute = v; }},
        {"limit", [](ExperimentConfig& c, const std::string& v) { c.attack.limit = parse_u64(v); }},
        {"mssim_floor", [](ExperimentConfig& c, const std::string& v) { c.attack.mssim_floor = parse_double(v); }}}},
      {"select",
       {{"candidates", [](ExperimentConfig& c, const std::string& v) { c.select.candidates = parse_doubles(v); }},
        {"attack_grid", [](ExperimentConfig& c, const std::string& v) { c.select.attack_grid = parse_doubles(v); }},
        {"steps", [](ExperimentConfig& c, const std::string& v) { c.select.steps = parse_u64(v); }},
        {"walks", [](ExperimentConfig& c, const std::string& v) { c.select.walks = parse_u64(v); }},
        {"penalty", [](ExperimentConfig& c, const std::string& v) { c.select.penalty = parse_double(v); }},
        {"mode", [](ExperimentConfig& c, const std::string& v) { c.select.mode = parse_coverage_mode(v); }},
        {"threads", [](ExperimentConfig& c, const std::string& v) { c.select.threads = parse_u64(v); }},
        {"matrix", [](ExperimentConfig& c, const std::string& v) { c.select.matrix = v; }}}},
      {"report",
       {{"title", [](ExperimentConfig& c, const std::string& v) { c.report.title = v; }},
        {"stem", [](ExperimentConfig& c, const std::string& v) { c.report.stem = v; }}}},
  };
  return table;
}

void apply(ExperimentConfig& cfg, const std::string& section, const std::string& key,
           const std::string& value, const std::string& source) {
  const auto& table = setters();
  const auto sec = table.find(section);
  require(sec != table.end(), ErrorKind::kConfig, source + ": unknown section [" + section + "]");
  const auto it = sec->second.find(key);
  const std::string name = section.empty() ? key : section + "." + key;
  require(it != sec->second.end(), ErrorKind::kConfig, source + ": unknown key '" + name + "'");
  try {
    it->second(cfg, value);
  } catch (const Error& e) {
    fail(ErrorKind::kConfig, source + ": " + name + ": " + e.what());
  }
}

void check(const ExperimentConfig& cfg, const std::string& source) {
  try {
    require(cfg.model.arch == "mlp" || cfg.model.arch == "cnn", ErrorKind::kConfig,
            "model.arch must be mlp or cnn");
    require(cfg.train.epochs >= 1, ErrorKind::kConfig, "train.epochs must be at least 1");
    require(cfg.train.batch_size >= 1, ErrorKind::kConfig, "train.batch_size must be at least 1");
    require(cfg.train.lr > 0.0, ErrorKind::kConfig, "train.lr must be positive");
    require(cfg.train.momentum >= 0.0 && cfg.train.momentum < 1.0, ErrorKind::kConfig,
            "train.momentum must lie in [0, 1)");
    require(cfg.train.epsilon >= 0.0, ErrorKind::kConfig, "train.epsilon must be non-negative");
    require(cfg.train.size_mode == "full" || cfg.train.size_mode == "reduced", ErrorKind::kConfig,
            "train.size_mode must be full or reduced");
    require(cfg.train.validation_fraction > 0.0 && cfg.train.validation_fraction < 1.0, ErrorKind::kConfig,
            "train.validation_fraction must lie in (0, 1)");
    check_strengths(cfg.train.strengths);
    require(cfg.attack.epsilon >= 0.0, ErrorKind::kConfig, "attack.epsilon must be non-negative");
    check_ascending(cfg.attack.grid, "attack.grid", true);
    check_ascending(cfg.select.candidates, "select.candidates", false);
    check_ascending(cfg.select.attack_grid, "select.attack_grid", false);
    require(cfg.select.penalty >= 0.0, ErrorKind::kConfig, "select.penalty must be non-negative");
  } catch (const Error& e) {
    fail(ErrorKind::kConfig, source + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::kConfig, source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  ExperimentConfig cfg;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      apply(cfg, "", name, node.data(), source);
      continue;
    }
    for (const auto& [key, leaf] : node) apply(cfg, name, key, leaf.data(), source);
  }
  check(cfg, source);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file_text(path), path.string());
}

std::string render_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "seed = " << c.seed << "\n\n";
  out << "[model]\narch = " << c.model.arch << "\nhidden = " << join(c.model.hidden) << "\n\n";
  out << "[train]\nepochs = " << c.train.epochs << "\nbatch_size = " << c.train.batch_size
      << "\nlr = " << format_double(c.train.lr) << "\nmomentum = " << format_double(c.train.momentum)
      << "\ncrafting = " << to_string(c.train.crafting) << "\nepsilon = " << format_double(c.train.epsilon)
      << "\nstrengths = " << join(c.train.strengths) << "\nsize_mode = " << c.train.size_mode;
  if (c.train.reduced_fraction) out << "\nreduced_fraction = " << format_double(*c.train.reduced_fraction);
  out << "\nlimit = " << c.train.limit << "\nvote_iterations = " << c.train.vote_iterations
      << "\nvote_lr = " << format_double(c.train.vote_lr)
      << "\nvalidation_fraction = " << format_double(c.train.validation_fraction) << "\n\n";
  out << "[attack]\nepsilon = " << format_double(c.attack.epsilon) << "\ngrid = " << join(c.attack.grid)
      << "\nsubstitute = " << c.attack.substitute << "\nlimit = " << c.attack.limit
      << "\nmssim_floor = " << format_double(c.attack.mssim_floor) << "\n\n";
  out << "[select]\ncandidates = " << join(c.select.candidates) << "\nattack_grid = " << join(c.select.attack_grid)
      << "\nsteps = " << c.select.steps << "\nwalks = " << c.select.walks
      << "\npenalty = " << format_double(c.select.penalty) << "\nmode = " << to_string(c.select.mode)
      << "\nthreads = " << c.select.threads << "\nmatrix = " << c.select.matrix << "\n\n";
  out << "[report]\ntitle = " << c.report.title << "\nstem = " << c.report.stem << "\n";
  return out.str();
}

std::string config_digest(const ExperimentConfig& cfg) { return hex32(crc32(render_config(cfg))); }

NetworkSpec model_spec(const ModelSection& model) {
  require(model.arch == "mlp" || model.arch == "cnn", ErrorKind::kConfig,
          "model.arch must be mlp or cnn, got '" + model.arch + "'");
  if (model.arch == "cnn") {
    NetworkSpec spec;
    spec.input_shape = {1, 28, 28};
    spec.class_count = 10;
    spec.layers = {Conv2D{1, 8, 3, 1, 0}, ReLU{}, MaxPool{2, 2}, Conv2D{8, 16, 3, 1, 0}, ReLU{},
                   MaxPool{2, 2}, Flatten{}, Dense{16 * 5 * 5, 10}};
    return spec;
  }
  NetworkSpec spec = mlp_spec(28 * 28, model.hidden, 10);
  spec.input_shape = {1, 28, 28};
  spec.layers.insert(spec.layers.begin(), Flatten{});
  validate(spec);
  return spec;
}

TrainConfig train_config(const ExperimentConfig& cfg) {
  TrainConfig t;
  t.spec = model_spec(cfg.model);
  t.epochs = cfg.train.epochs;
  t.batch_size = cfg.train.batch_size;
  t.lr = cfg.train.lr;
  t.momentum = cfg.train.momentum;
  t.seed = cfg.seed;
  t.crafting = cfg.train.crafting;
  return t;
}

SizeMode size_mode(const TrainSection& train) {
  if (train.size_mode == "reduced") return ReducedSize{train.reduced_fraction};
  return FullSize{};
}

RandomWalkConfig walk_config(const ExperimentConfig& cfg) {
  RandomWalkConfig w;
  w.steps = cfg.select.steps;
  w.walks = cfg.select.walks;
  w.penalty = cfg.select.penalty;
  w.seed = cfg.seed;
  w.mode = cfg.select.mode;
  w.threads = cfg.select.threads;
  return w;
}

}  // namespace advforge
