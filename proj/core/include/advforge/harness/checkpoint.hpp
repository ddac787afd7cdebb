#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "advforge/mat/ensemble.hpp"
#include "advforge/nn/network.hpp"

namespace advforge {

// Layout: magic "MATCKPT1", u32 LE version, u32 LE header length, UTF-8
// key=value header describing the network spec, f64 LE parameters (weights then bias
// per layer, row-major), u32 LE CRC-32 of header and parameters.
inline constexpr std::string_view kCheckpointMagic = "MATCKPT1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Canonical key=value rendering of a spec; parse_spec_header inverts it.
std::string spec_header(const NetworkSpec& spec);
NetworkSpec parse_spec_header(std::string_view header);

std::string encode_checkpoint(const Network& net);
Network decode_checkpoint(std::string_view bytes);

void save_checkpoint(const Network& net, const std::filesystem::path& path);
Network load_checkpoint(const std::filesystem::path& path);

/// Directory with one checkpoint per copy plus "ensemble.txt" holding the
/// strengths and votes.
void save_ensemble(const Ensemble& ens, const std::filesystem::path& dir);
Ensemble load_ensemble(const std::filesystem::path& dir);

}  // namespace advforge
