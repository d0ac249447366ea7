#include "agex/types.hpp"

#include <numeric>
#include <sstream>

namespace agex {

const char* to_string(Slice s) {
  switch (s) {
    case Slice::embb: return "embb";
    case Slice::mmtc: return "mmtc";
    case Slice::urllc: return "urllc";
  }
  throw std::invalid_argument("unknown slice");
}

const char* to_string(Kpi k) {
  switch (k) {
    case Kpi::tx_brate: return "tx_brate";
    case Kpi::tx_pkts: return "tx_pkts";
    case Kpi::dl_buffer: return "dl_buffer";
  }
  throw std::invalid_argument("unknown kpi");
}

const char* to_string(SchedPolicy p) {
  switch (p) {
    case SchedPolicy::round_robin: return "round-robin";
    case SchedPolicy::waterfilling: return "waterfilling";
    case SchedPolicy::proportional_fair: return "proportional-fair";
  }
  throw std::invalid_argument("unknown scheduling policy");
}

Slice slice_from_string(const std::string& s) {
  if (s == "embb") return Slice::embb;
  if (s == "mmtc") return Slice::mmtc;
  if (s == "urllc") return Slice::urllc;
  throw ConfigError("unknown slice name: " + s);
}

Kpi kpi_from_string(const std::string& s) {
  if (s == "tx_brate") return Kpi::tx_brate;
  if (s == "tx_pkts") return Kpi::tx_pkts;
  if (s == "dl_buffer") return Kpi::dl_buffer;
  throw ConfigError("unknown kpi name: " + s);
}

std::string attribute_name(int p) {
  if (p < 0 || p >= kNumAttributes) throw std::invalid_argument("attribute index out of range");
  std::string out = to_string(attribute_kpi(p));
  out += "[";
  out += to_string(attribute_slice(p));
  out += "]";
  return out;
}

bool MultiModalAction::valid() const {
  int sum = 0;
  for (int v : prb) {
    if (v < 0 || v > kPrbBudget) return false;
    sum += v;
  }
  if (sum > kPrbBudget) return false;
  for (SchedPolicy p : sched) {
    int v = static_cast<int>(p);
    if (v < 0 || v > 2) return false;
  }
  return true;
}

void MultiModalAction::ensure_valid() const {
  if (!valid()) throw ConfigError("invalid action: " + label());
}

std::string MultiModalAction::label() const {
  std::ostringstream os;
  os << "([" << prb[0] << ", " << prb[1] << ", " << prb[2] << "], ["
     << static_cast<int>(sched[0]) << ", " << static_cast<int>(sched[1]) << ", "
     << static_cast<int>(sched[2]) << "])";
  return os.str();
}

void to_json(json& j, const MultiModalAction& a) {
  j = json{{"prb", a.prb},
           {"sched", {static_cast<int>(a.sched[0]), static_cast<int>(a.sched[1]),
                      static_cast<int>(a.sched[2])}}};
}

void from_json(const json& j, MultiModalAction& a) {
  auto prb = j.at("prb").get<std::array<int, kNumSlices>>();
  auto sched = j.at("sched").get<std::array<int, kNumSlices>>();
  a.prb = prb;
  for (int l = 0; l < kNumSlices; ++l) {
    if (sched[l] < 0 || sched[l] > 2) throw ConfigError("scheduling policy code out of range");
    a.sched[l] = static_cast<SchedPolicy>(sched[l]);
  }
}

double KpiWindow::column_mean(Kpi k, Slice l) const {
  double sum = 0.0;
  for (int m = 0; m < kWindowRows; ++m) sum += at(m, k, l);
  return sum / kWindowRows;
}

bool KpiWindow::nonnegative() const {
  for (double v : data)
    if (v < 0.0) return false;
  return true;
}

void to_json(json& j, const KpiWindow& w) { j = w.data; }

void from_json(const json& j, KpiWindow& w) {
  if (!j.is_array() || j.size() != w.data.size())
    throw TraceError("kpi_window must be a flat array of " + std::to_string(w.data.size()) +
                     " values");
  for (size_t i = 0; i < w.data.size(); ++i) w.data[i] = j[i].get<double>();
}

TrafficProfile TrafficProfile::trf1() { return {"trf1", 4.0, 44.6, 89.3}; }
TrafficProfile TrafficProfile::trf2() { return {"trf2", 2.0, 133.9, 178.6}; }

TrafficProfile TrafficProfile::by_name(const std::string& name) {
  if (name == "trf1") return trf1();
  if (name == "trf2") return trf2();
  throw ConfigError("unknown traffic profile: " + name);
}

void to_json(json& j, const TrafficProfile& p) {
  j = json{{"name", p.name},
           {"embb_mbps", p.embb_mbps},
           {"mmtc_kbps", p.mmtc_kbps},
           {"urllc_kbps", p.urllc_kbps}};
}

void from_json(const json& j, TrafficProfile& p) {
  if (j.is_string()) {
    p = TrafficProfile::by_name(j.get<std::string>());
    return;
  }
  p.name = j.value("name", "custom");
  p.embb_mbps = j.at("embb_mbps").get<double>();
  p.mmtc_kbps = j.at("mmtc_kbps").get<double>();
  p.urllc_kbps = j.at("urllc_kbps").get<double>();
}

}  // namespace agex
