#include "advforge/harness/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <map>
#include <sstream>

#include "advforge/error.hpp"
#include "advforge/io.hpp"
#include "advforge/nn/cost.hpp"

namespace advforge {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<unsigned char>(bytes[at + i])} << (8 * i);
  return v;
}

void put_f64(std::string& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

double get_f64(std::string_view bytes, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{static_cast<unsigned char>(bytes[at + i])} << (8 * i);
  return std::bit_cast<double>(v);
}

std::size_t parse_size(std::string_view text, std::string_view what) {
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  require(ec == std::errc{} && end == text.data() + text.size() && !text.empty(), ErrorKind::kInvalidSpec,
          "checkpoint header: bad " + std::string(what) + " '" + std::string(text) + "'");
  return v;
}

std::string join_shape(const Shape& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "x" : "") + std::to_string(s[i]);
  return out;
}

Shape split_shape(std::string_view text) {
  Shape s;
  while (true) {
    const auto cut = text.find('x');
    s.push_back(parse_size(text.substr(0, cut), "input_shape"));
    if (cut == std::string_view::npos) break;
    text.remove_prefix(cut + 1);
  }
  return s;
}

std::string layer_text(const Layer& layer) {
  std::ostringstream out;
  out << layer_kind(layer);
  if (const auto* d = std::get_if<Dense>(&layer)) {
    out << " in=" << d->in << " out=" << d->out;
  } else if (const auto* c = std::get_if<Conv2D>(&layer)) {
    out << " in_channels=" << c->in_channels << " out_channels=" << c->out_channels
        << " kernel=" << c->kernel << " stride=" << c->stride << " padding=" << c->padding;
  } else if (const auto* p = std::get_if<MaxPool>(&layer)) {
    out << " kernel=" << p->kernel << " stride=" << p->stride;
  }
  return out.str();
}

Layer parse_layer(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  std::map<std::string, std::size_t> fields;
  for (std::string item; in >> item;) {
    const auto eq = item.find('=');
    require(eq != std::string::npos, ErrorKind::kInvalidSpec, "checkpoint header: bad layer field '" + item + "'");
    fields[item.substr(0, eq)] = parse_size(std::string_view(item).substr(eq + 1), item.substr(0, eq));
  }
  auto take = [&](const char* key) {
    const auto it = fields.find(key);
    require(it != fields.end(), ErrorKind::kInvalidSpec,
            "checkpoint header: layer '" + kind + "' lacks " + key);
    const std::size_t v = it->second;
    fields.erase(it);
    return v;
  };
  Layer layer;
  if (kind == "dense") {
    Dense d;
    d.in = take("in");
    d.out = take("out");
    layer = d;
  } else if (kind == "conv2d") {
    Conv2D c;
    c.in_channels = take("in_channels");
    c.out_channels = take("out_channels");
    c.kernel = take("kernel");
    c.stride = take("stride");
    c.padding = take("padding");
    layer = c;
  } else if (kind == "relu") {
    layer = ReLU{};
  } else if (kind == "maxpool") {
    MaxPool p;
    p.kernel = take("kernel");
    p.stride = take("stride");
    layer = p;
  } else if (kind == "flatten") {
    layer = Flatten{};
  } else {
    fail(ErrorKind::kInvalidSpec, "checkpoint header: unknown layer kind '" + kind + "'");
  }
  require(fields.empty(), ErrorKind::kInvalidSpec,
          "checkpoint header: unexpected field '" + (fields.empty() ? "" : fields.begin()->first) +
              "' on layer '" + kind + "'");
  return layer;
}

constexpr std::size_t kFixedPrefix = 16;  // magic + version + header length

}  // namespace

std::string spec_header(const NetworkSpec& spec) {
  std::string out;
  out += "input_shape=" + join_shape(spec.input_shape) + "\n";
  out += "class_count=" + std::to_string(spec.class_count) + "\n";
  out += "layers=" + std::to_string(spec.layers.size()) + "\n";
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    out += "layer." + std::to_string(i) + "=" + layer_text(spec.layers[i]) + "\n";
  }
  return out;
}

NetworkSpec parse_spec_header(std::string_view header) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(header)};
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::kInvalidSpec, "checkpoint header: bad line '" + line + "'");
    require(kv.emplace(line.substr(0, eq), line.substr(eq + 1)).second, ErrorKind::kInvalidSpec,
            "checkpoint header: duplicate key '" + line.substr(0, eq) + "'");
  }
  auto take = [&](const std::string& key) {
    const auto it = kv.find(key);
    require(it != kv.end(), ErrorKind::kInvalidSpec, "checkpoint header: missing key '" + key + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  NetworkSpec spec;
  spec.input_shape = split_shape(take("input_shape"));
  spec.class_count = parse_size(take("class_count"), "class_count");
  const std::size_t count = parse_size(take("layers"), "layers");
  for (std::size_t i = 0; i < count; ++i) spec.layers.push_back(parse_layer(take("layer." + std::to_string(i))));
  require(kv.empty(), ErrorKind::kInvalidSpec,
          "checkpoint header: unexpected key '" + (kv.empty() ? "" : kv.begin()->first) + "'");
  validate(spec);
  return spec;
}

std::string encode_checkpoint(const Network& net) {
  const std::string header = spec_header(net.spec());
  std::string out(kCheckpointMagic);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  for (const auto& p : net.params()) {
    for (double w : p.weight.values()) put_f64(out, w);
    for (double b : p.bias.values()) put_f64(out, b);
  }
  put_u32(out, crc32(std::string_view(out).substr(kFixedPrefix)));
  return out;
}

Network decode_checkpoint(std::string_view bytes) {
  const std::size_t magic_len = kCheckpointMagic.size();
  const std::string_view seen = bytes.substr(0, std::min(bytes.size(), magic_len));
  require(seen == kCheckpointMagic.substr(0, seen.size()), ErrorKind::kWrongMagic,
          "bad magic: not a checkpoint file");
  require(bytes.size() >= kFixedPrefix + 4, ErrorKind::kTruncated,
          "truncated checkpoint: " + std::to_string(bytes.size()) + " bytes");
  const std::uint32_t version = get_u32(bytes, 8);
  require(version == kCheckpointVersion, ErrorKind::kVersionMismatch,
          "checkpoint version " + std::to_string(version) + " is not supported (expected " +
              std::to_string(kCheckpointVersion) + ")");
  const std::size_t header_len = get_u32(bytes, 12);
  require(bytes.size() >= kFixedPrefix + header_len + 4, ErrorKind::kTruncated,
          "truncated checkpoint: header claims " + std::to_string(header_len) + " bytes");

  const std::string_view body = bytes.substr(kFixedPrefix, bytes.size() - kFixedPrefix - 4);
  const std::uint32_t stored = get_u32(bytes, bytes.size() - 4);
  const std::uint32_t actual = crc32(body);
  // A short file is reported as truncated rather than as a digest failure
  // once the header tells us how much payload to expect.
  const std::string_view header = body.substr(0, header_len);
  const std::string_view payload = body.substr(header_len);
  if (stored != actual) {
    std::size_t expected_payload = 0;
    bool header_ok = true;
    try {
      expected_payload = 8 * estimate_cost(parse_spec_header(header)).param_count;
    } catch (const Error&) {
      header_ok = false;
    }
    require(!header_ok || payload.size() >= expected_payload, ErrorKind::kTruncated,
            "truncated checkpoint: payload holds " + std::to_string(payload.size()) + " of " +
                std::to_string(expected_payload) + " bytes");
    fail(ErrorKind::kDigestMismatch,
         "checkpoint digest mismatch: stored " + hex32(stored) + ", computed " + hex32(actual));
  }

  const NetworkSpec spec = parse_spec_header(header);
  std::vector<LayerParams> params;
  const auto shapes = infer_shapes(spec);
  std::size_t at = 0;
  auto read_tensor = [&](Shape shape) {
    Tensor t(std::move(shape));
    require(payload.size() >= at + 8 * t.size(), ErrorKind::kTruncated,
            "truncated checkpoint: payload too short for the network spec");
    for (double& v : t.values()) {
      v = get_f64(payload, at);
      at += 8;
    }
    return t;
  };
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const Layer& layer = spec.layers[i];
    if (const auto* d = std::get_if<Dense>(&layer)) {
      Tensor w = read_tensor({d->out, d->in});
      params.push_back({std::move(w), read_tensor({d->out})});
    } else if (const auto* c = std::get_if<Conv2D>(&layer)) {
      Tensor w = read_tensor({c->out_channels, c->in_channels, c->kernel, c->kernel});
      params.push_back({std::move(w), read_tensor({c->out_channels})});
    }
  }
  require(at == payload.size(), ErrorKind::kInvalidSpec,
          "checkpoint payload has " + std::to_string(payload.size() - at) + " trailing bytes");
  return Network(spec, std::move(params));
}

void save_checkpoint(const Network& net, const std::filesystem::path& path) {
  write_file_atomic(path, encode_checkpoint(net));
}

Network load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_checkpoint(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

void save_ensemble(const Ensemble& ens, const std::filesystem::path& dir) {
  validate(ens);
  std::string manifest = "copies=" + std::to_string(ens.copies.size()) + "\n";
  std::string strengths;
  std::string votes;
  for (std::size_t k = 0; k < ens.copies.size(); ++k) {
    save_checkpoint(ens.copies[k], dir / ("copy_" + std::to_string(k) + ".ckpt"));
    strengths += (k ? "," : "") + format_double(ens.strengths[k]);
    votes += (k ? "," : "") + format_double(ens.votes[k]);
  }
  manifest += "strengths=" + strengths + "\nvotes=" + votes + "\n";
  write_file_atomic(dir / "ensemble.txt", manifest);
}

Ensemble load_ensemble(const std::filesystem::path& dir) {
  const std::string manifest = read_file_text(dir / "ensemble.txt");
  std::map<std::string, std::string> kv;
  std::istringstream in(manifest);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto list = [&](const std::string& key) {
    const auto it = kv.find(key);
    require(it != kv.end(), ErrorKind::kConfig, (dir / "ensemble.txt").string() + ": missing " + key);
    std::vector<double> out;
    std::istringstream items(it->second);
    for (std::string item; std::getline(items, item, ',');) out.push_back(parse_double(item));
    return out;
  };
  require(kv.contains("copies"), ErrorKind::kConfig, (dir / "ensemble.txt").string() + ": missing copies");
  const std::size_t copies = parse_size(kv["copies"], "copies");
  Ensemble ens;
  ens.strengths = list("strengths");
  ens.votes = list("votes");
  for (std::size_t k = 0; k < copies; ++k) {
    ens.copies.push_back(load_checkpoint(dir / ("copy_" + std::to_string(k) + ".ckpt")));
  }
  validate(ens);
  return ens;
}

}  // namespace advforge
