#pragma once

// Desk-scale downlink simulator for a three-slice cell: per-UE traffic
// arrivals, a seeded bounded random-walk channel mapped through a fixed
// CQI -> bits-per-PRB table, and the three per-slice scheduling policies.
// One step() covers one decision interval (kWindowRows ticks) and emits the
// per-slice KPI window plus the per-UE samples behind it.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "agex/types.hpp"

namespace agex {

// bits per PRB per tick for CQI 1..15; 50 PRBs at median CQI 8 carry
// 50 * 7500 bits / 25 ms = 15 Mbit/s.
extern const std::array<int, 15> kBitsPerPrbPerTick;

int bits_per_prb_per_tick(int cqi);

// Channel process parameters: sticky mean-reverting bounded random walk on
// integer CQI. Each tick a UE moves with probability move_prob; the step goes
// up with probability 0.5 + revert_gain * (revert_center - cqi), clamped.
struct LinkConfig {
  int cqi_min = 4;
  int cqi_max = 15;
  int revert_center = 9;
  double move_prob = 0.5;
  double revert_gain = 0.06;

  void validate() const;
  bool operator==(const LinkConfig&) const = default;
};

void to_json(json& j, const LinkConfig& c);
void from_json(const json& j, LinkConfig& c);

struct UeState {
  int id = 0;
  Slice slice = Slice::embb;
  double dl_buffer_bytes = 0.0;      // pending downlink data
  int cqi = 9;                       // channel quality within [cqi_min, cqi_max]
  double cumulative_rate_mbps = 0.0; // EWMA throughput, proportional-fair denominator
  double pkt_carry_bytes = 0.0;      // sub-MTU remainder for the packet counter
};

// Per-attribute per-UE samples for one decision interval. values[p] holds
// rows * (UEs of the attribute's slice) scalars, row-major (row outer, UE
// ascending id inner).
struct PerUeSamples {
  std::array<std::vector<double>, kNumAttributes> values;

  bool operator==(const PerUeSamples&) const = default;
};

void to_json(json& j, const PerUeSamples& s);
void from_json(const json& j, PerUeSamples& s);

struct StepOutput {
  KpiWindow window;
  PerUeSamples per_ue;
};

// --- scheduling allocators (pure; shares are non-negative ints, sum <= prbs)

// As-equal-as-possible split; the remainder goes to the lowest-index UEs.
std::vector<int> allocate_round_robin(int prbs, int n_ues);

// Largest-remainder proportional split with weight quality/max(cum_rate, eps).
std::vector<int> allocate_proportional_fair(int prbs, const std::vector<double>& quality,
                                            const std::vector<double>& cum_rate_mbps);

// Integer water-filling: raise a common level, capping each UE at its demand;
// leftover PRBs go one each to still-hungry UEs in ascending order.
std::vector<int> allocate_waterfilling(int prbs, const std::vector<int>& demand_prbs);

// Policy dispatch over live UE states (WF demands derived from buffer/CQI).
std::vector<int> sched_allocate(SchedPolicy policy, int prbs, const std::vector<UeState>& ues);

// Allocate and drain one tick for one slice: returns served bytes per UE and
// updates buffers and PF averages in place. served <= buffer for every UE.
std::vector<double> serve_slice(SchedPolicy policy, int prbs, std::vector<UeState*>& ues);

class Environment {
 public:
  Environment(const std::array<int, kNumSlices>& ues_per_slice, TrafficProfile profile,
              uint64_t seed, LinkConfig link = {});

  // Enforce one action for a full decision interval.
  StepOutput step(const MultiModalAction& action);

  const std::vector<UeState>& ues() const { return ues_; }
  int total_ues() const { return static_cast<int>(ues_.size()); }
  const std::array<int, kNumSlices>& ues_per_slice() const { return counts_; }

 private:
  void advance_channel(UeState& ue);
  double draw_arrival_bytes(const UeState& ue);
  double uniform01();
  int poisson(double lambda);  // Knuth product method on explicit uniforms

  std::array<int, kNumSlices> counts_{};
  TrafficProfile profile_;
  LinkConfig link_;
  std::mt19937_64 rng_;
  std::vector<UeState> ues_;
};

}  // namespace agex
