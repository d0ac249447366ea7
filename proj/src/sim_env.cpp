#include "agex/sim_env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace agex {

namespace {
constexpr double kTickSeconds = kTickMs / 1000.0;
constexpr double kArrivalPacketBytes = 125.0;  // small-message Poisson traffic

double bytes_to_mbps(double bytes) { return bytes * 8.0 / 1e6 / kTickSeconds; }
}  // namespace

// Scaled from the standard per-CQI spectral efficiency ladder so that the
// median entry (CQI 8) is exactly 7500 bits per PRB per tick.
const std::array<int, 15> kBitsPerPrbPerTick = {600,   920,   1480,  2360,  3440,
                                                4610,  5790,  7500,  9430,  10700,
                                                13020, 15290, 17720, 20040, 21770};

int bits_per_prb_per_tick(int cqi) {
  if (cqi < 1 || cqi > 15) throw std::invalid_argument("cqi out of range 1..15");
  return kBitsPerPrbPerTick[cqi - 1];
}

void LinkConfig::validate() const {
  if (cqi_min < 1 || cqi_max > 15 || cqi_min > cqi_max)
    throw ConfigError("link: cqi bounds must satisfy 1 <= cqi_min <= cqi_max <= 15");
  if (revert_center < cqi_min || revert_center > cqi_max)
    throw ConfigError("link: revert_center must lie within the cqi bounds");
  if (move_prob < 0.0 || move_prob > 1.0) throw ConfigError("link: move_prob must be in [0, 1]");
  if (revert_gain < 0.0) throw ConfigError("link: revert_gain must be >= 0");
}

void to_json(json& j, const LinkConfig& c) {
  j = json{{"cqi_min", c.cqi_min},
           {"cqi_max", c.cqi_max},
           {"revert_center", c.revert_center},
           {"move_prob", c.move_prob},
           {"revert_gain", c.revert_gain}};
}

void from_json(const json& j, LinkConfig& c) {
  LinkConfig d;
  c.cqi_min = j.value("cqi_min", d.cqi_min);
  c.cqi_max = j.value("cqi_max", d.cqi_max);
  c.revert_center = j.value("revert_center", d.revert_center);
  c.move_prob = j.value("move_prob", d.move_prob);
  c.revert_gain = j.value("revert_gain", d.revert_gain);
}

void to_json(json& j, const PerUeSamples& s) { j = s.values; }

void from_json(const json& j, PerUeSamples& s) {
  if (!j.is_array() || j.size() != s.values.size())
    throw TraceError("per_ue must be an array of " + std::to_string(s.values.size()) +
                     " sample lists");
  for (size_t p = 0; p < s.values.size(); ++p) s.values[p] = j[p].get<std::vector<double>>();
}

std::vector<int> allocate_round_robin(int prbs, int n_ues) {
  if (n_ues <= 0) return {};
  std::vector<int> shares(n_ues, prbs / n_ues);
  int remainder = prbs % n_ues;
  for (int i = 0; i < remainder; ++i) ++shares[i];
  return shares;
}

std::vector<int> allocate_proportional_fair(int prbs, const std::vector<double>& quality,
                                            const std::vector<double>& cum_rate_mbps) {
  const size_t n = quality.size();
  if (n == 0) return {};
  if (cum_rate_mbps.size() != n)
    throw std::invalid_argument("proportional fair: quality/rate size mismatch");
  std::vector<double> weight(n);
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    weight[i] = quality[i] / std::max(cum_rate_mbps[i], 1e-3);
    total += weight[i];
  }
  if (total <= 0.0) return allocate_round_robin(prbs, static_cast<int>(n));

  std::vector<int> shares(n, 0);
  std::vector<double> fraction(n, 0.0);
  int assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    double exact = prbs * weight[i] / total;
    shares[i] = static_cast<int>(exact);
    fraction[i] = exact - shares[i];
    assigned += shares[i];
  }
  // Hand leftovers to the largest fractional parts, ties to the lowest id.
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return fraction[a] > fraction[b]; });
  for (size_t k = 0; assigned < prbs && k < n; ++k) {
    ++shares[order[k]];
    ++assigned;
  }
  return shares;
}

std::vector<int> allocate_waterfilling(int prbs, const std::vector<int>& demand_prbs) {
  const size_t n = demand_prbs.size();
  if (n == 0) return {};
  long total_demand = 0;
  int max_demand = 0;
  for (int d : demand_prbs) {
    if (d < 0) throw std::invalid_argument("waterfilling: negative demand");
    total_demand += d;
    max_demand = std::max(max_demand, d);
  }
  std::vector<int> shares(n, 0);
  if (total_demand <= prbs) {
    for (size_t i = 0; i < n; ++i) shares[i] = demand_prbs[i];
    return shares;
  }
  // Largest integer level whose capped sum still fits the budget.
  int lo = 0, hi = max_demand;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    long used = 0;
    for (int d : demand_prbs) used += std::min(mid, d);
    if (used <= prbs)
      lo = mid;
    else
      hi = mid - 1;
  }
  long used = 0;
  for (size_t i = 0; i < n; ++i) {
    shares[i] = std::min(lo, demand_prbs[i]);
    used += shares[i];
  }
  for (size_t i = 0; i < n && used < prbs; ++i) {
    if (demand_prbs[i] > shares[i]) {
      ++shares[i];
      ++used;
    }
  }
  return shares;
}

std::vector<int> sched_allocate(SchedPolicy policy, int prbs, const std::vector<UeState>& ues) {
  if (prbs < 0 || prbs > kPrbBudget) throw std::invalid_argument("prbs outside [0, budget]");
  const size_t n = ues.size();
  if (n == 0) return {};
  switch (policy) {
    case SchedPolicy::round_robin:
      return allocate_round_robin(prbs, static_cast<int>(n));
    case SchedPolicy::proportional_fair: {
      std::vector<double> quality(n), cum(n);
      for (size_t i = 0; i < n; ++i) {
        quality[i] = bits_per_prb_per_tick(ues[i].cqi);
        cum[i] = ues[i].cumulative_rate_mbps;
      }
      return allocate_proportional_fair(prbs, quality, cum);
    }
    case SchedPolicy::waterfilling: {
      std::vector<int> demand(n);
      for (size_t i = 0; i < n; ++i) {
        double bits = ues[i].dl_buffer_bytes * 8.0;
        double per_prb = bits_per_prb_per_tick(ues[i].cqi);
        demand[i] = static_cast<int>(std::min(std::ceil(bits / per_prb),
                                              static_cast<double>(kPrbBudget)));
      }
      return allocate_waterfilling(prbs, demand);
    }
  }
  throw std::invalid_argument("unknown scheduling policy");
}

std::vector<double> serve_slice(SchedPolicy policy, int prbs, std::vector<UeState*>& ues) {
  const size_t n = ues.size();
  std::vector<double> served(n, 0.0);
  if (n == 0) return served;
  std::vector<UeState> snapshot;
  snapshot.reserve(n);
  for (UeState* ue : ues) snapshot.push_back(*ue);
  std::vector<int> shares = sched_allocate(policy, prbs, snapshot);
  for (size_t i = 0; i < n; ++i) {
    UeState& ue = *ues[i];
    double capacity_bytes = shares[i] * bits_per_prb_per_tick(ue.cqi) / 8.0;
    served[i] = std::min(ue.dl_buffer_bytes, capacity_bytes);
    ue.dl_buffer_bytes -= served[i];
    ue.cumulative_rate_mbps = 0.9 * ue.cumulative_rate_mbps + 0.1 * bytes_to_mbps(served[i]);
  }
  return served;
}

Environment::Environment(const std::array<int, kNumSlices>& ues_per_slice, TrafficProfile profile,
                         uint64_t seed, LinkConfig link)
    : counts_(ues_per_slice), profile_(std::move(profile)), link_(link), rng_(seed) {
  link_.validate();
  int total = 0;
  for (int c : counts_) {
    if (c < 0) throw ConfigError("environment: negative UE count");
    total += c;
  }
  if (total == 0) throw ConfigError("environment: at least one UE is required");

  int init_lo = std::max(link_.cqi_min, link_.revert_center - 2);
  int init_hi = std::min(link_.cqi_max, link_.revert_center + 2);
  int id = 0;
  for (int l = 0; l < kNumSlices; ++l) {
    for (int u = 0; u < counts_[l]; ++u) {
      UeState ue;
      ue.id = id++;
      ue.slice = static_cast<Slice>(l);
      ue.cqi = init_lo + static_cast<int>(uniform01() * (init_hi - init_lo + 1));
      ue.cqi = std::clamp(ue.cqi, init_lo, init_hi);
      ues_.push_back(ue);
    }
  }
}

double Environment::uniform01() { return (rng_() >> 11) * 0x1.0p-53; }

int Environment::poisson(double lambda) {
  if (lambda <= 0.0) return 0;
  double limit = std::exp(-lambda);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform01();
  } while (p > limit);
  return k - 1;
}

void Environment::advance_channel(UeState& ue) {
  double u1 = uniform01();
  if (u1 >= link_.move_prob) return;
  double p_up = std::clamp(0.5 + link_.revert_gain * (link_.revert_center - ue.cqi), 0.05, 0.95);
  double u2 = uniform01();
  ue.cqi += (u2 < p_up) ? 1 : -1;
  ue.cqi = std::clamp(ue.cqi, link_.cqi_min, link_.cqi_max);
}

double Environment::draw_arrival_bytes(const UeState& ue) {
  switch (ue.slice) {
    case Slice::embb:
      return profile_.embb_mbps * 1e6 / 8.0 * kTickSeconds;  // constant bitrate, no draw
    case Slice::mmtc:
    case Slice::urllc: {
      double kbps = ue.slice == Slice::mmtc ? profile_.mmtc_kbps : profile_.urllc_kbps;
      double mean_bytes = kbps * 1000.0 / 8.0 * kTickSeconds;
      return poisson(mean_bytes / kArrivalPacketBytes) * kArrivalPacketBytes;
    }
  }
  throw std::logic_error("unknown slice");
}

StepOutput Environment::step(const MultiModalAction& action) {
  action.ensure_valid();

  std::array<std::vector<UeState*>, kNumSlices> by_slice;
  for (UeState& ue : ues_) by_slice[static_cast<int>(ue.slice)].push_back(&ue);

  StepOutput out;
  for (int l = 0; l < kNumSlices; ++l)
    for (int k = 0; k < kNumKpis; ++k)
      out.per_ue.values[attribute_index(static_cast<Kpi>(k), static_cast<Slice>(l))].reserve(
          kWindowRows * by_slice[l].size());

  for (int row = 0; row < kWindowRows; ++row) {
    // Exogenous processes first, in fixed UE order, independent of the action.
    for (UeState& ue : ues_) advance_channel(ue);
    for (UeState& ue : ues_) ue.dl_buffer_bytes += draw_arrival_bytes(ue);

    for (int l = 0; l < kNumSlices; ++l) {
      Slice slice = static_cast<Slice>(l);
      std::vector<UeState*>& members = by_slice[l];
      std::vector<double> served =
          serve_slice(action.sched[l], action.prb[l], members);

      double row_brate = 0.0, row_pkts = 0.0, row_buffer = 0.0;
      for (size_t i = 0; i < members.size(); ++i) {
        UeState& ue = *members[i];
        double ue_brate = bytes_to_mbps(served[i]);
        ue.pkt_carry_bytes += served[i];
        double ue_pkts = std::floor(ue.pkt_carry_bytes / kMtuBytes);
        ue.pkt_carry_bytes -= ue_pkts * kMtuBytes;
        double ue_buffer = ue.dl_buffer_bytes;

        row_brate += ue_brate;
        row_pkts += ue_pkts;
        row_buffer += ue_buffer;
        out.per_ue.values[attribute_index(Kpi::tx_brate, slice)].push_back(ue_brate);
        out.per_ue.values[attribute_index(Kpi::tx_pkts, slice)].push_back(ue_pkts);
        out.per_ue.values[attribute_index(Kpi::dl_buffer, slice)].push_back(ue_buffer);
      }
      out.window.at(row, Kpi::tx_brate, slice) = row_brate;
      out.window.at(row, Kpi::tx_pkts, slice) = row_pkts;
      out.window.at(row, Kpi::dl_buffer, slice) = row_buffer;
    }
  }
  return out;
}

}  // namespace agex
