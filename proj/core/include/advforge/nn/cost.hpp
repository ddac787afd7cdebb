#pragma once

#include <cstdint>
#include <vector>

#include "advforge/nn/network_spec.hpp"

namespace advforge {

/// Closed-form compute and size of one single-example forward pass.
struct CostReport {
  std::uint64_t macc_ops = 0;
  std::uint64_t param_count = 0;

  CostReport& operator+=(const CostReport& other) {
    macc_ops += other.macc_ops;
    param_count += other.param_count;
    return *this;
  }
  friend CostReport operator+(CostReport a, const CostReport& b) { return a += b; }
  friend bool operator==(const CostReport&, const CostReport&) = default;
};

std::vector<CostReport> layer_costs(const NetworkSpec& spec);
CostReport estimate_cost(const NetworkSpec& spec);

}  // namespace advforge
