#include "agex/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace agex {

namespace fs = std::filesystem;

// ---- dispatcher ---------------------------------------------------------------

void Dispatcher::add_leg(const std::string& name, Leg leg) {
  legs_.emplace_back(name, std::move(leg));
}

Dispatcher::Message Dispatcher::route(Message m) {
  for (auto& [name, leg] : legs_) m = leg(m);
  ++routed_;
  return m;
}

std::vector<std::string> Dispatcher::route_names() const {
  std::vector<std::string> out;
  out.reserve(legs_.size());
  for (const auto& [name, leg] : legs_) out.push_back(name);
  return out;
}

// ---- closed loop ----------------------------------------------------------------

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();

  Environment env(config.ues_per_slice, config.profile, config.seed, config.link);
  Encoder encoder(config.encoder_seed);
  AttributedGraph graph;
  // Distinct agent stream so agent draws never collide with the environment's.
  Agent agent(config.agent_profile(), config.seed ^ 0x9E3779B97F4A7C15ULL, &graph);
  const SteeringConfig steering = config.steering_config();
  const RewardConfig reward_config = config.reward_config();
  RewardHistory history(config.history_len);

  fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);
  TraceWriter writer(out_dir / "trace.jsonl");
  writer.write_header(TraceHeader{1, json(config)});

  struct StepContext {
    bool active = false;
    std::optional<MultiModalAction> previous;
    KpiWindow latest{};
    SteerDecision decision{};
  } ctx;

  const bool steering_enabled = config.strategy != Strategy::none;
  Dispatcher dispatcher;
  if (steering_enabled) {
    dispatcher.add_leg("steering", [&](const Dispatcher::Message& m) {
      Dispatcher::Message out = m;
      if (!ctx.active) {
        ctx.decision = SteerDecision{};
        ctx.decision.action = m.action;
        ctx.decision.reason = "warm-up";
        return out;
      }
      ctx.decision = steer(steering, graph, m.action, ctx.previous, history, ctx.latest);
      out.action = ctx.decision.action;
      out.source = "steering";
      return out;
    });
  }
  dispatcher.add_leg("environment", [](const Dispatcher::Message& m) { return m; });

  RunResult result;
  std::vector<SteerEvent> events;
  KpiWindow window{};  // nothing observed before the first decision

  int t = 0;
  for (; t < config.duration_steps; ++t) {
    LatentState latent = encoder.encode(window);
    std::optional<MultiModalAction> proposal = agent.decide(latent);
    if (!proposal) break;  // replay exhausted

    ctx.active = steering_enabled && t >= config.warmup_steps;
    ctx.latest = window;
    Dispatcher::Message message{t, "agent", "slice-control", *proposal};
    message = dispatcher.route(std::move(message));
    const MultiModalAction enforced = message.action;

    StepOutput out = env.step(enforced);
    graph.record(enforced, out.per_ue);
    const double realized = reward(out.window, reward_config);
    history.push(realized);
    agent.observe(enforced, realized);

    TraceStep record;
    record.step = t;
    record.action = enforced;
    record.kpi_window = out.window;
    record.per_ue = out.per_ue;
    record.latent = latent;
    record.reward = realized;
    if (steering_enabled) {
      SteerRecord sr;
      sr.strategy = config.strategy;
      sr.active = ctx.decision.active;
      sr.omega = ctx.decision.omega;
      sr.gate = ctx.decision.gate;
      sr.suggested = ctx.decision.suggested;
      sr.q_size = ctx.decision.q_size;
      sr.expected_original = ctx.decision.expected_original;
      sr.expected_chosen = ctx.decision.expected_chosen;
      sr.metric = ctx.decision.metric;
      sr.estimate_source = ctx.decision.estimate_source;
      sr.reason = ctx.decision.reason;
      sr.suggested_action = ctx.decision.suggested_action;
      record.steer = sr;
      if (ctx.decision.replaced) {
        record.replaced = true;
        record.original_action = *proposal;
        ++result.replacements;
      }
      events.push_back(SteerEvent{*proposal, ctx.decision.suggested, ctx.decision.replaced});
    }
    writer.write_step(record);

    ctx.previous = enforced;
    window = out.window;
  }
  writer.flush();

  fs::path graph_path = out_dir / "graph.json";
  std::ofstream gout(graph_path);
  if (!gout) throw ConfigError("cannot write graph file: " + graph_path.string());
  gout << graph.to_json().dump() << "\n";

  result.trace_path = out_dir / "trace.jsonl";
  result.graph_path = graph_path;
  result.graph = std::move(graph);
  result.steps = t;
  result.stats = steering_stats(events);
  return result;
}

AttributedGraph rebuild_graph(const Trace& trace) {
  AttributedGraph g;
  for (const TraceStep& s : trace.steps) g.record(s.action, s.per_ue);
  return g;
}

std::vector<StepObservation> observations(const Trace& trace) {
  std::vector<StepObservation> out;
  out.reserve(trace.steps.size());
  for (const TraceStep& s : trace.steps)
    out.push_back(StepObservation{s.step, s.action, s.kpi_window, &s.per_ue});
  return out;
}

std::vector<SteerEvent> steer_events(const Trace& trace) {
  std::vector<SteerEvent> out;
  for (const TraceStep& s : trace.steps) {
    if (!s.steer) continue;
    MultiModalAction original = s.original_action ? *s.original_action : s.action;
    out.push_back(SteerEvent{original, s.steer->suggested, s.replaced});
  }
  return out;
}

// ---- explanation command --------------------------------------------------------

ExplanationReport explain_cmd(const fs::path& trace_path, const ExplainOptions& options) {
  Trace trace = Trace::load(trace_path);
  if (trace.steps.size() < 2)
    throw TraceError("trace needs at least two steps to form transitions");

  // Synthesis time covers rebuild, transition extraction, fit, and summaries
  // (not disk I/O).
  const auto t0 = std::chrono::steady_clock::now();

  AttributedGraph graph = rebuild_graph(trace);
  if (graph.node_count() == 0) throw TraceError("trace rebuilt into an empty graph");

  std::vector<TransitionRecord> transitions = build_transitions(observations(trace), options.mode);
  DecisionTree tree = DecisionTree::fit(transitions, options.max_depth, options.min_leaf);
  const auto t1 = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(t1 - t0).count();
  return summarize(transitions, tree, options.mode, seconds);
}

void write_report(const ExplanationReport& report, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream jout(out_dir / "report.json");
  if (!jout) throw ConfigError("cannot write report.json under " + out_dir.string());
  jout << report.to_json().dump(2) << "\n";
  std::ofstream tout(out_dir / "report.txt");
  if (!tout) throw ConfigError("cannot write report.txt under " + out_dir.string());
  tout << report.to_text();
}

// ---- comparison command ----------------------------------------------------------

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of empty sample set");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("percentile q must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double rank = q * (values.size() - 1);
  const size_t lo = static_cast<size_t>(rank);
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - lo;
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

namespace {

PercentileSet percentiles_of(const std::vector<double>& values) {
  PercentileSet p;
  p.p25 = percentile(values, 0.25);
  p.p50 = percentile(values, 0.50);
  p.p75 = percentile(values, 0.75);
  p.p95 = percentile(values, 0.95);
  return p;
}

double relative(double delta, double base) {
  return std::abs(base) < 1e-12 ? 0.0 : delta / std::abs(base);
}

void fill_json(json& j, const PercentileSet& p) {
  j = json{{"p25", p.p25}, {"p50", p.p50}, {"p75", p.p75}, {"p95", p.p95}};
}

}  // namespace

CompareReport compare_cmd(const fs::path& baseline_path, const fs::path& steered_path,
                          std::optional<Slice> slice_filter, std::optional<Kpi> kpi_filter,
                          int from_step) {
  Trace baseline = Trace::load(baseline_path);
  Trace steered = Trace::load(steered_path);
  if (!comparable_configs(baseline.header.config, steered.header.config))
    throw ConfigError("traces were produced under different configs (beyond steering)");
  if (baseline.steps.size() != steered.steps.size())
    throw ConfigError("traces cover different durations");
  if (from_step < 0 || static_cast<size_t>(from_step) >= baseline.steps.size())
    throw ConfigError("from_step outside the trace");

  CompareReport report;
  report.from_step = from_step;
  report.baseline_steps = static_cast<int>(baseline.steps.size());
  report.steered_steps = static_cast<int>(steered.steps.size());

  for (int k = 0; k < kNumKpis; ++k) {
    for (int l = 0; l < kNumSlices; ++l) {
      Kpi kpi = static_cast<Kpi>(k);
      Slice slice = static_cast<Slice>(l);
      if (slice_filter && slice != *slice_filter) continue;
      if (kpi_filter && kpi != *kpi_filter) continue;

      std::vector<double> base_values, steer_values;
      for (size_t i = from_step; i < baseline.steps.size(); ++i) {
        base_values.push_back(baseline.steps[i].kpi_window.column_mean(kpi, slice));
        steer_values.push_back(steered.steps[i].kpi_window.column_mean(kpi, slice));
      }
      KpiComparison row;
      row.kpi = kpi;
      row.slice = slice;
      row.baseline = percentiles_of(base_values);
      row.steered = percentiles_of(steer_values);
      row.delta = {row.steered.p25 - row.baseline.p25, row.steered.p50 - row.baseline.p50,
                   row.steered.p75 - row.baseline.p75, row.steered.p95 - row.baseline.p95};
      row.delta_rel = {relative(row.delta.p25, row.baseline.p25),
                       relative(row.delta.p50, row.baseline.p50),
                       relative(row.delta.p75, row.baseline.p75),
                       relative(row.delta.p95, row.baseline.p95)};
      report.rows.push_back(row);
    }
  }
  return report;
}

json CompareReport::to_json() const {
  json rows_json = json::array();
  for (const auto& r : rows) {
    json jr{{"kpi", to_string(r.kpi)}, {"slice", to_string(r.slice)}};
    fill_json(jr["baseline"], r.baseline);
    fill_json(jr["steered"], r.steered);
    fill_json(jr["delta"], r.delta);
    fill_json(jr["delta_rel"], r.delta_rel);
    rows_json.push_back(jr);
  }
  return json{{"from_step", from_step},
              {"baseline_steps", baseline_steps},
              {"steered_steps", steered_steps},
              {"rows", rows_json}};
}

std::string CompareReport::to_text() const {
  std::ostringstream os;
  os << "Comparison from step " << from_step << " (" << baseline_steps << " steps)\n";
  os << std::left << std::setw(7) << "slice" << std::setw(11) << "kpi" << std::right
     << std::setw(14) << "base p50" << std::setw(14) << "steered p50" << std::setw(14)
     << "delta p50" << std::setw(14) << "delta p95" << "\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(7) << to_string(r.slice) << std::setw(11) << to_string(r.kpi)
       << std::right << std::fixed << std::setprecision(4) << std::setw(14) << r.baseline.p50
       << std::setw(14) << r.steered.p50 << std::setw(14) << r.delta.p50 << std::setw(14)
       << r.delta.p95 << "\n";
    os.unsetf(std::ios::fixed);
  }
  return os.str();
}

// ---- shapley command --------------------------------------------------------------

namespace {

// Gaussian elimination with partial pivoting for the small normal-equation
// system of the linear surrogate.
std::vector<double> solve_linear_system(std::vector<std::vector<double>> a,
                                        std::vector<double> b) {
  const size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    if (std::abs(a[col][col]) < 1e-12)
      throw std::runtime_error("surrogate fit: singular normal equations");
    for (size_t r = col + 1; r < n; ++r) {
      double factor = a[r][col] / a[col][col];
      for (size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (size_t c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

}  // namespace

ShapleyReport shapley_cmd(const fs::path& trace_path, int step) {
  Trace trace = Trace::load(trace_path);
  if (step < 0 || static_cast<size_t>(step) >= trace.steps.size())
    throw ConfigError("step " + std::to_string(step) + " outside the trace");
  if (!trace.steps[step].latent)
    throw TraceError("step " + std::to_string(step) + " carries no latent features");

  std::vector<const TraceStep*> usable;
  for (const TraceStep& s : trace.steps)
    if (s.latent) usable.push_back(&s);
  if (usable.size() < static_cast<size_t>(kLatentDim) + 1)
    throw TraceError("too few latent-bearing steps to fit a surrogate");

  constexpr int dim = kLatentDim + 1;  // intercept + features
  std::vector<std::vector<double>> xtx(dim, std::vector<double>(dim, 0.0));
  std::vector<double> xty(dim, 0.0);
  for (const TraceStep* s : usable) {
    std::array<double, dim> x;
    x[0] = 1.0;
    for (int i = 0; i < kLatentDim; ++i) x[i + 1] = s->latent->values[i];
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) xtx[r][c] += x[r] * x[c];
      xty[r] += x[r] * s->reward;
    }
  }
  for (int r = 0; r < dim; ++r) xtx[r][r] += 1e-9;  // keep the system well-posed
  std::vector<double> theta = solve_linear_system(std::move(xtx), std::move(xty));

  ShapleyReport report;
  report.step = step;
  report.features = trace.steps[step].latent->values;
  for (const TraceStep* s : usable)
    for (int i = 0; i < kLatentDim; ++i) report.baseline[i] += s->latent->values[i];
  for (int i = 0; i < kLatentDim; ++i) report.baseline[i] /= usable.size();
  report.surrogate_intercept = theta[0];
  for (int i = 0; i < kLatentDim; ++i) report.surrogate_coefficients[i] = theta[i + 1];

  double sq = 0.0;
  for (const TraceStep* s : usable) {
    double pred = theta[0];
    for (int i = 0; i < kLatentDim; ++i) pred += theta[i + 1] * s->latent->values[i];
    sq += (pred - s->reward) * (pred - s->reward);
  }
  report.surrogate_rmse = std::sqrt(sq / usable.size());

  SetFunction f = [&](uint32_t mask) {
    double value = report.surrogate_intercept;
    for (int i = 0; i < kLatentDim; ++i) {
      double xi = (mask & (1u << i)) ? report.features[i] : report.baseline[i];
      value += report.surrogate_coefficients[i] * xi;
    }
    return value;
  };
  report.standard = shapley_values(f, kLatentDim, ShapleyVariant::standard);
  report.grand_diff = shapley_values(f, kLatentDim, ShapleyVariant::grand_diff);
  report.efficiency_residual = efficiency_residual(f, kLatentDim, report.standard);
  return report;
}

json ShapleyReport::to_json() const {
  return json{{"step", step},
              {"features", features},
              {"baseline", baseline},
              {"standard", standard},
              {"grand_diff", grand_diff},
              {"efficiency_residual", efficiency_residual},
              {"surrogate",
               {{"intercept", surrogate_intercept},
                {"coefficients", surrogate_coefficients},
                {"rmse", surrogate_rmse}}}};
}

std::string ShapleyReport::to_text() const {
  std::ostringstream os;
  os << "Shapley attribution for step " << step << " (linear surrogate, rmse "
     << surrogate_rmse << ")\n";
  os << std::left << std::setw(22) << "latent feature" << std::right << std::setw(12) << "value"
     << std::setw(14) << "standard" << std::setw(14) << "grand-diff" << "\n";
  for (int i = 0; i < kLatentDim; ++i) {
    os << std::left << std::setw(22) << ("z" + std::to_string(i)) << std::right << std::fixed
       << std::setprecision(5) << std::setw(12) << features[i] << std::setw(14) << standard[i]
       << std::setw(14) << grand_diff[i] << "\n";
    os.unsetf(std::ios::fixed);
  }
  os << "efficiency residual (standard): " << efficiency_residual << "\n";
  return os.str();
}

}  // namespace agex
