#pragma once

// JSON-lines run trace: one header line carrying the experiment config, then
// one line per decision step. Every line is a standalone JSON object; step
// indices are contiguous from 0. The per-step record carries everything needed
// to rebuild the attributed graph (per-UE samples), re-run the explanation
// pipeline, and audit steering decisions.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "agex/agent.hpp"
#include "agex/sim_env.hpp"
#include "agex/steer.hpp"
#include "agex/types.hpp"

namespace agex {

struct SteerRecord {
  Strategy strategy = Strategy::none;
  bool active = false;
  bool omega = false;
  bool gate = false;
  bool suggested = false;
  int q_size = 0;
  double expected_original = 0.0;
  double expected_chosen = 0.0;
  std::string metric;
  std::string estimate_source;
  std::string reason;
  std::optional<MultiModalAction> suggested_action;

  bool operator==(const SteerRecord&) const = default;
};

void to_json(json& j, const SteerRecord& r);
void from_json(const json& j, SteerRecord& r);

struct TraceStep {
  int step = 0;
  MultiModalAction action;  // enforced action
  KpiWindow kpi_window;     // its consequence
  PerUeSamples per_ue;
  std::optional<LatentState> latent;
  double reward = 0.0;
  bool replaced = false;
  std::optional<MultiModalAction> original_action;  // proposal, when replaced
  std::optional<SteerRecord> steer;

  bool operator==(const TraceStep&) const = default;
};

void to_json(json& j, const TraceStep& s);
void from_json(const json& j, TraceStep& s);

struct TraceHeader {
  int version = 1;
  json config;

  bool operator==(const TraceHeader&) const = default;
};

class TraceWriter {
 public:
  explicit TraceWriter(const std::filesystem::path& path);
  void write_header(const TraceHeader& header);
  void write_step(const TraceStep& step);
  void flush();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceStep> steps;

  // Parses and validates: header first, every line well-formed, step indices
  // contiguous from 0. Throws TraceError with the offending line number.
  static Trace load(const std::filesystem::path& path);
};

}  // namespace agex
