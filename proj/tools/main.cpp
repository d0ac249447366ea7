// Command-line front end: run closed-loop experiments, synthesize explanation
// reports from traces, compare runs, attribute single decisions, export graphs.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "agex/pipeline.hpp"

namespace {

using namespace agex;

struct SimulateArgs {
  std::string preset;
  std::string config_path;
  std::optional<long long> seed;
  std::optional<long long> encoder_seed;
  std::optional<int> duration;
  std::optional<int> warmup;
  std::optional<std::string> out;
  std::optional<std::string> strategy;
  std::optional<int> history_len;
  std::optional<std::string> agent;
  std::optional<std::string> policy;
  std::optional<double> epsilon;
  std::optional<std::string> traffic;
  std::vector<int> ues;
  std::string replay_path;
};

ExperimentConfig assemble_config(const SimulateArgs& a) {
  ExperimentConfig cfg;
  if (!a.preset.empty() && !a.config_path.empty())
    throw ConfigError("--preset and --config are mutually exclusive");
  if (!a.preset.empty())
    cfg = ExperimentConfig::preset(a.preset);
  else if (!a.config_path.empty())
    cfg = ExperimentConfig::load(a.config_path);

  if (a.seed) cfg.seed = static_cast<uint64_t>(*a.seed);
  if (a.encoder_seed) cfg.encoder_seed = static_cast<uint64_t>(*a.encoder_seed);
  if (a.duration) cfg.duration_steps = *a.duration;
  if (a.warmup) cfg.warmup_steps = *a.warmup;
  if (a.out) cfg.output_dir = *a.out;
  if (a.strategy) cfg.strategy = strategy_from_string(*a.strategy);
  if (a.history_len) cfg.history_len = *a.history_len;
  if (a.agent) cfg.agent_kind = agent_kind_from_string(*a.agent);
  if (a.policy) cfg.policy = policy_kind_from_string(*a.policy);
  if (a.epsilon) cfg.epsilon = *a.epsilon;
  if (a.traffic) cfg.profile = TrafficProfile::by_name(*a.traffic);
  if (!a.ues.empty()) {
    if (a.ues.size() != kNumSlices)
      throw ConfigError("--ues expects exactly three per-slice counts");
    for (int l = 0; l < kNumSlices; ++l) cfg.ues_per_slice[l] = a.ues[l];
  }
  if (!a.replay_path.empty()) {
    std::ifstream in(a.replay_path);
    if (!in) throw ConfigError("cannot open replay file: " + a.replay_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError("malformed replay file: " + std::string(e.what()));
    }
    if (!j.is_array()) throw ConfigError("replay file must hold a JSON array of actions");
    cfg.policy = PolicyKind::replay;
    cfg.replay_actions.clear();
    for (const auto& item : j) cfg.replay_actions.push_back(item.get<MultiModalAction>());
  }
  return cfg;
}

int run_simulate(const SimulateArgs& a) {
  ExperimentConfig cfg = assemble_config(a);
  RunResult result = run_experiment(cfg);
  std::cout << "completed " << result.steps << " steps (seed " << cfg.seed << ", strategy "
            << to_string(cfg.strategy) << ")\n";
  std::cout << "trace: " << result.trace_path.string() << "\n";
  std::cout << "graph: " << result.graph_path.string() << " (" << result.graph.node_count()
            << " nodes, " << result.graph.edge_count() << " edges)\n";
  if (cfg.strategy != Strategy::none) {
    std::cout << "replacements: " << result.replacements << "\n";
    std::cout << result.stats.to_text();
  }
  return 0;
}

int run_explain(const std::string& trace, const std::string& out, const std::string& mode,
                int max_depth, int min_leaf) {
  ExplainOptions options;
  options.mode = delta_mode_from_string(mode);
  options.max_depth = max_depth;
  options.min_leaf = min_leaf;
  ExplanationReport report = explain_cmd(trace, options);
  write_report(report, out);
  std::cout << report.to_text();
  std::cout << "report written under " << out << "\n";
  return 0;
}

int run_compare(const std::string& baseline, const std::string& steered,
                const std::string& slice, const std::string& kpi, int from_step,
                bool as_json) {
  std::optional<Slice> slice_filter;
  std::optional<Kpi> kpi_filter;
  if (!slice.empty()) slice_filter = slice_from_string(slice);
  if (!kpi.empty()) kpi_filter = kpi_from_string(kpi);
  CompareReport report = compare_cmd(baseline, steered, slice_filter, kpi_filter, from_step);
  if (as_json)
    std::cout << report.to_json().dump(2) << "\n";
  else
    std::cout << report.to_text();
  return 0;
}

int run_shapley(const std::string& trace, int step, bool as_json) {
  ShapleyReport report = shapley_cmd(trace, step);
  if (as_json)
    std::cout << report.to_json().dump(2) << "\n";
  else
    std::cout << report.to_text();
  return 0;
}

int run_export_dot(const std::string& graph_path, const std::string& out) {
  std::ifstream in(graph_path);
  if (!in) throw ConfigError("cannot open graph file: " + graph_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw TraceError("malformed graph file: " + std::string(e.what()));
  }
  AttributedGraph g = AttributedGraph::from_json(j);
  std::ofstream os(out);
  if (!os) throw ConfigError("cannot write dot file: " + out);
  os << g.to_dot();
  std::cout << "wrote " << out << " (" << g.node_count() << " nodes, " << g.edge_count()
            << " edges)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slice-control loop with action-consequence graphs, explanation "
               "synthesis, and intent-based steering"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the closed control loop");
  simulate->add_option("--preset", sim.preset,
                       "Named configuration (see --list-presets)");
  simulate->add_option("--config", sim.config_path, "JSON configuration file");
  simulate->add_option("--seed", sim.seed, "Simulation seed");
  simulate->add_option("--encoder-seed", sim.encoder_seed, "Latent projection seed");
  simulate->add_option("--duration", sim.duration, "Decision steps to run");
  simulate->add_option("--warmup", sim.warmup, "Steps before steering activates");
  simulate->add_option("--out", sim.out, "Output directory");
  simulate->add_option("--strategy", sim.strategy,
                       "Steering strategy: none|max-reward|min-reward|improve-bitrate");
  simulate->add_option("--history-len", sim.history_len, "Realized-reward history length");
  simulate->add_option("--agent", sim.agent, "Agent intent: high-throughput|low-latency");
  simulate->add_option("--policy", sim.policy,
                       "Decision policy: replay|greedy-graph|tabular-bandit");
  simulate->add_option("--epsilon", sim.epsilon, "Exploration rate in [0, 1]");
  simulate->add_option("--traffic", sim.traffic, "Traffic profile: trf1|trf2");
  simulate->add_option("--ues", sim.ues, "Per-slice user counts, e.g. 2,2,2")
      ->delimiter(',');
  simulate->add_option("--replay", sim.replay_path,
                       "JSON file with an action sequence to replay");
  bool list_presets = false;
  simulate->add_flag("--list-presets", list_presets, "Print preset names and exit");

  std::string ex_trace, ex_out = "explain-out", ex_mode = "mean-diff";
  int ex_depth = 4, ex_min_leaf = 5;
  auto* explain = app.add_subcommand("explain", "Synthesize an explanation report");
  explain->add_option("--trace", ex_trace, "Trace file (JSON lines)")->required();
  explain->add_option("--out", ex_out, "Report output directory");
  explain->add_option("--mode", ex_mode, "Consequence statistic: mean-diff|jsd");
  explain->add_option("--max-depth", ex_depth, "Decision tree depth limit");
  explain->add_option("--min-leaf", ex_min_leaf, "Minimum samples per leaf");

  std::string cp_baseline, cp_steered, cp_slice, cp_kpi;
  int cp_from = 0;
  bool cp_json = false;
  auto* compare = app.add_subcommand("compare", "Compare two runs' KPI percentiles");
  compare->add_option("--baseline", cp_baseline, "Baseline trace")->required();
  compare->add_option("--steered", cp_steered, "Steered trace")->required();
  compare->add_option("--slice", cp_slice, "Restrict to one slice: embb|mmtc|urllc");
  compare->add_option("--kpi", cp_kpi, "Restrict to one KPI: tx_brate|tx_pkts|dl_buffer");
  compare->add_option("--from-step", cp_from, "First step included");
  compare->add_flag("--json", cp_json, "Emit JSON instead of a table");

  std::string sh_trace;
  int sh_step = 0;
  bool sh_json = false;
  auto* shapley = app.add_subcommand("shapley", "Attribute one decision's latent features");
  shapley->add_option("--trace", sh_trace, "Trace file (JSON lines)")->required();
  shapley->add_option("--step", sh_step, "Step index to attribute")->required();
  shapley->add_flag("--json", sh_json, "Emit JSON instead of a table");

  std::string dot_graph, dot_out = "graph.dot";
  auto* export_dot = app.add_subcommand("export-dot", "Render a graph file as Graphviz dot");
  export_dot->add_option("--graph", dot_graph, "graph.json produced by simulate")->required();
  export_dot->add_option("--out", dot_out, "Output .dot path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) {
      if (list_presets) {
        for (const auto& name : ExperimentConfig::preset_names()) std::cout << name << "\n";
        return 0;
      }
      return run_simulate(sim);
    }
    if (*explain) return run_explain(ex_trace, ex_out, ex_mode, ex_depth, ex_min_leaf);
    if (*compare)
      return run_compare(cp_baseline, cp_steered, cp_slice, cp_kpi, cp_from, cp_json);
    if (*shapley) return run_shapley(sh_trace, sh_step, sh_json);
    if (*export_dot) return run_export_dot(dot_graph, dot_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const TraceError& e) {
    std::cerr << "trace error: " << e.what() << "\n";
    return 3;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
