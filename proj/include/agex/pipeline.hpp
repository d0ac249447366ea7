#pragma once

// Closed loop and batch commands: run an experiment (environment -> graph ->
// encoder -> agent -> steering -> enforcement, traced as JSON lines), rebuild
// graphs from traces, synthesize explanation reports, compare two runs, and
// attribute one decision's latent features via Shapley scores.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "agex/config.hpp"
#include "agex/explain.hpp"
#include "agex/graph.hpp"
#include "agex/shapley.hpp"
#include "agex/steer.hpp"
#include "agex/trace.hpp"

namespace agex {

// Minimal in-process stand-in for the RIC message routing: named legs applied
// in order to each stepped message. With steering disabled the route is
// agent -> environment and the payload passes through untouched.
class Dispatcher {
 public:
  struct Message {
    int step = 0;
    std::string source;
    std::string kind;
    MultiModalAction action;
  };
  using Leg = std::function<Message(const Message&)>;

  void add_leg(const std::string& name, Leg leg);
  Message route(Message m);
  std::vector<std::string> route_names() const;
  long routed() const { return routed_; }

 private:
  std::vector<std::pair<std::string, Leg>> legs_;
  long routed_ = 0;
};

struct RunResult {
  std::filesystem::path trace_path;
  std::filesystem::path graph_path;
  AttributedGraph graph;
  int steps = 0;
  long replacements = 0;
  SteeringStats stats;
};

// Runs the closed loop for config.duration_steps decisions (replay traces may
// end earlier), writing trace.jsonl and graph.json under config.output_dir.
RunResult run_experiment(const ExperimentConfig& config);

AttributedGraph rebuild_graph(const Trace& trace);
std::vector<StepObservation> observations(const Trace& trace);
std::vector<SteerEvent> steer_events(const Trace& trace);

struct ExplainOptions {
  DeltaMode mode = DeltaMode::mean_diff;
  int max_depth = 4;
  int min_leaf = 5;
};

// Rebuild graph + transitions from a trace, distill, summarize; wall time for
// the synthesis goes into the report.
ExplanationReport explain_cmd(const std::filesystem::path& trace_path,
                              const ExplainOptions& options = {});
void write_report(const ExplanationReport& report, const std::filesystem::path& out_dir);

struct PercentileSet {
  double p25 = 0.0, p50 = 0.0, p75 = 0.0, p95 = 0.0;
};

struct KpiComparison {
  Kpi kpi = Kpi::tx_brate;
  Slice slice = Slice::embb;
  PercentileSet baseline, steered, delta, delta_rel;
};

struct CompareReport {
  int from_step = 0;
  int baseline_steps = 0, steered_steps = 0;
  std::vector<KpiComparison> rows;

  json to_json() const;
  std::string to_text() const;
};

// Per-(slice, KPI) percentile deltas (steered - baseline) over per-step window
// means from from_step on. Traces must share config apart from steering.
CompareReport compare_cmd(const std::filesystem::path& baseline_path,
                          const std::filesystem::path& steered_path,
                          std::optional<Slice> slice_filter = std::nullopt,
                          std::optional<Kpi> kpi_filter = std::nullopt, int from_step = 0);

// Interpolated percentile (q in [0, 1]) of an unsorted sample set.
double percentile(std::vector<double> values, double q);

struct ShapleyReport {
  int step = 0;
  std::array<double, kLatentDim> features{};
  std::array<double, kLatentDim> baseline{};  // trace means, imputed when absent
  std::vector<double> standard;
  std::vector<double> grand_diff;
  double efficiency_residual = 0.0;
  double surrogate_intercept = 0.0;
  std::array<double, kLatentDim> surrogate_coefficients{};
  double surrogate_rmse = 0.0;

  json to_json() const;
  std::string to_text() const;
};

// Fits a least-squares linear surrogate reward(latent) over the whole trace,
// then scores the requested step's latent features against the trace-mean
// baseline with both Shapley variants.
ShapleyReport shapley_cmd(const std::filesystem::path& trace_path, int step);

}  // namespace agex
