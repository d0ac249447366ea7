#pragma once

// Core domain types shared by every module: slices, KPIs, scheduling policies,
// the multi-modal control action, the per-interval KPI window, and traffic
// profiles. All serialization goes through nlohmann::json.

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace agex {

using json = nlohmann::json;

// Configuration problems (bad files, invalid parameter combinations).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent trace input, reported with line context.
struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Lookup of an entity that does not exist (e.g. graph node).
struct NotFoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kNumSlices = 3;
inline constexpr int kNumKpis = 3;
inline constexpr int kWindowRows = 10;  // measurement rows per decision interval
inline constexpr int kNumAttributes = kNumKpis * kNumSlices;
inline constexpr int kPrbBudget = 50;
inline constexpr int kTickMs = 25;                      // one measurement row
inline constexpr int kStepMs = kTickMs * kWindowRows;   // one decision interval
inline constexpr int kMtuBytes = 1500;

enum class Slice : int { embb = 0, mmtc = 1, urllc = 2 };
enum class Kpi : int { tx_brate = 0, tx_pkts = 1, dl_buffer = 2 };
enum class SchedPolicy : int { round_robin = 0, waterfilling = 1, proportional_fair = 2 };

const char* to_string(Slice s);
const char* to_string(Kpi k);
const char* to_string(SchedPolicy p);
Slice slice_from_string(const std::string& s);
Kpi kpi_from_string(const std::string& s);

// Flat index of the (KPI, slice) attribute, KPI-major: p = k * L + l.
constexpr int attribute_index(Kpi k, Slice l) {
  return static_cast<int>(k) * kNumSlices + static_cast<int>(l);
}
constexpr Kpi attribute_kpi(int p) { return static_cast<Kpi>(p / kNumSlices); }
constexpr Slice attribute_slice(int p) { return static_cast<Slice>(p % kNumSlices); }
std::string attribute_name(int p);  // e.g. "tx_brate[embb]"

// One control decision: a PRB share and a scheduling policy per slice.
struct MultiModalAction {
  std::array<int, kNumSlices> prb{};
  std::array<SchedPolicy, kNumSlices> sched{};

  bool valid() const;          // every share in [0, budget], shares sum <= budget
  void ensure_valid() const;   // throws ConfigError when invalid
  std::string label() const;   // "([36, 3, 11], [1, 2, 2])"

  auto operator<=>(const MultiModalAction&) const = default;
};

void to_json(json& j, const MultiModalAction& a);
void from_json(const json& j, MultiModalAction& a);

// KPI window for one decision interval: rows x KPI kinds x slices,
// stored row-major as [row][kpi][slice].
struct KpiWindow {
  std::array<double, kWindowRows * kNumKpis * kNumSlices> data{};

  static constexpr int flat_index(int row, Kpi k, Slice l) {
    return (row * kNumKpis + static_cast<int>(k)) * kNumSlices + static_cast<int>(l);
  }
  double& at(int row, Kpi k, Slice l) { return data[flat_index(row, k, l)]; }
  double at(int row, Kpi k, Slice l) const { return data[flat_index(row, k, l)]; }

  // Mean over the window's rows of one (KPI, slice) column.
  double column_mean(Kpi k, Slice l) const;
  bool nonnegative() const;

  bool operator==(const KpiWindow&) const = default;
};

void to_json(json& j, const KpiWindow& w);
void from_json(const json& j, KpiWindow& w);

// Per-UE arrival model: constant bitrate for eMBB, Poisson for mMTC/URLLC.
struct TrafficProfile {
  std::string name;
  double embb_mbps = 0.0;
  double mmtc_kbps = 0.0;
  double urllc_kbps = 0.0;

  static TrafficProfile trf1();  // 4 Mbit/s | 44.6 kbit/s | 89.3 kbit/s
  static TrafficProfile trf2();  // 2 Mbit/s | 133.9 kbit/s | 178.6 kbit/s
  static TrafficProfile by_name(const std::string& name);

  bool operator==(const TrafficProfile&) const = default;
};

void to_json(json& j, const TrafficProfile& p);
void from_json(const json& j, TrafficProfile& p);

}  // namespace agex
