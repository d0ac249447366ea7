#pragma once

// Weighted per-slice target-KPI reward over one KPI window:
//   r = sum_l w_l * (1/rows) * sum_row window[row][target(l)][l]
// The URLLC weight is negative (buffer backlog is penalized), the other two
// are positive.

#include <array>

#include "agex/types.hpp"

namespace agex {

struct RewardConfig {
  std::array<double, kNumSlices> weights{0.7, 0.15, -0.15};
  std::array<Kpi, kNumSlices> target{Kpi::tx_brate, Kpi::tx_pkts, Kpi::dl_buffer};

  void validate() const;  // sign pattern (+, +, -) enforced

  // eMBB-dominant weighting.
  static RewardConfig high_throughput() {
    RewardConfig c;
    c.weights = {0.7, 0.15, -0.15};
    return c;
  }
  // URLLC-dominant weighting.
  static RewardConfig low_latency() {
    RewardConfig c;
    c.weights = {0.15, 0.15, -0.7};
    return c;
  }

  bool operator==(const RewardConfig&) const = default;
};

void to_json(json& j, const RewardConfig& c);
void from_json(const json& j, RewardConfig& c);

double reward(const KpiWindow& window, const RewardConfig& config);

}  // namespace agex
