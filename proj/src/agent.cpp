#include "agex/agent.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace agex {

namespace {
double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

size_t uniform_index(std::mt19937_64& rng, size_t n) {
  return std::min(static_cast<size_t>(uniform01(rng) * n), n - 1);
}
}  // namespace

// ---- reward ----------------------------------------------------------------

void RewardConfig::validate() const {
  if (!(weights[static_cast<int>(Slice::embb)] > 0.0))
    throw ConfigError("reward: eMBB weight must be positive");
  if (!(weights[static_cast<int>(Slice::mmtc)] > 0.0))
    throw ConfigError("reward: mMTC weight must be positive");
  if (!(weights[static_cast<int>(Slice::urllc)] < 0.0))
    throw ConfigError("reward: URLLC weight must be negative");
}

void to_json(json& j, const RewardConfig& c) {
  j = json{{"weights", c.weights},
           {"target",
            {to_string(c.target[0]), to_string(c.target[1]), to_string(c.target[2])}}};
}

void from_json(const json& j, RewardConfig& c) {
  RewardConfig d;
  c.weights = j.value("weights", d.weights);
  if (j.contains("target")) {
    auto names = j.at("target").get<std::array<std::string, kNumSlices>>();
    for (int l = 0; l < kNumSlices; ++l) c.target[l] = kpi_from_string(names[l]);
  } else {
    c.target = d.target;
  }
}

double reward(const KpiWindow& window, const RewardConfig& config) {
  double total = 0.0;
  for (int l = 0; l < kNumSlices; ++l) {
    Slice slice = static_cast<Slice>(l);
    total += config.weights[l] * window.column_mean(config.target[l], slice);
  }
  return total;
}

// ---- encoder ---------------------------------------------------------------

void to_json(json& j, const LatentState& s) { j = s.values; }

void from_json(const json& j, LatentState& s) {
  if (!j.is_array() || j.size() != s.values.size())
    throw TraceError("latent must be an array of " + std::to_string(s.values.size()) + " values");
  for (size_t i = 0; i < s.values.size(); ++i) s.values[i] = j[i].get<double>();
}

Encoder::Encoder(uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(kWindowRows * kNumKpis * kNumSlices));
  for (auto& row : projection_)
    for (double& w : row) w = (2.0 * uniform01(rng) - 1.0) * scale;
}

LatentState Encoder::encode(const KpiWindow& window) {
  // Widen the running per-KPI bounds with this window first.
  for (int k = 0; k < kNumKpis; ++k) {
    double lo = window.at(0, static_cast<Kpi>(k), static_cast<Slice>(0));
    double hi = lo;
    for (int m = 0; m < kWindowRows; ++m)
      for (int l = 0; l < kNumSlices; ++l) {
        double v = window.at(m, static_cast<Kpi>(k), static_cast<Slice>(l));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (!seen_any_) {
      lo_[k] = lo;
      hi_[k] = hi;
    } else {
      lo_[k] = std::min(lo_[k], lo);
      hi_[k] = std::max(hi_[k], hi);
    }
  }
  seen_any_ = true;

  std::array<double, kWindowRows * kNumKpis * kNumSlices> normalized{};
  for (int m = 0; m < kWindowRows; ++m)
    for (int k = 0; k < kNumKpis; ++k)
      for (int l = 0; l < kNumSlices; ++l) {
        int flat = KpiWindow::flat_index(m, static_cast<Kpi>(k), static_cast<Slice>(l));
        double span = hi_[k] - lo_[k];
        normalized[flat] =
            span < 1e-12 ? -1.0 : -1.0 + 2.0 * (window.data[flat] - lo_[k]) / span;
      }

  LatentState out;
  for (int i = 0; i < kLatentDim; ++i) {
    double acc = 0.0;
    for (size_t j = 0; j < normalized.size(); ++j) acc += projection_[i][j] * normalized[j];
    out.values[i] = std::tanh(acc);
  }
  return out;
}

// ---- profiles and the action grid -------------------------------------------

const char* to_string(AgentKind k) {
  switch (k) {
    case AgentKind::high_throughput: return "high-throughput";
    case AgentKind::low_latency: return "low-latency";
  }
  throw std::invalid_argument("unknown agent kind");
}

const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::replay: return "replay";
    case PolicyKind::greedy_graph: return "greedy-graph";
    case PolicyKind::tabular_bandit: return "tabular-bandit";
  }
  throw std::invalid_argument("unknown policy kind");
}

AgentKind agent_kind_from_string(const std::string& s) {
  if (s == "high-throughput" || s == "ht") return AgentKind::high_throughput;
  if (s == "low-latency" || s == "ll") return AgentKind::low_latency;
  throw ConfigError("unknown agent kind: " + s);
}

PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "replay") return PolicyKind::replay;
  if (s == "greedy-graph") return PolicyKind::greedy_graph;
  if (s == "tabular-bandit") return PolicyKind::tabular_bandit;
  throw ConfigError("unknown policy kind: " + s);
}

void AgentProfile::validate() const {
  reward_config.validate();
  if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("agent: epsilon must be in [0, 1]");
  if (policy == PolicyKind::replay) {
    if (replay.empty()) throw ConfigError("agent: replay policy needs a non-empty action trace");
    for (const auto& a : replay) a.ensure_valid();
  }
}

const std::vector<MultiModalAction>& default_action_grid() {
  static const std::vector<MultiModalAction> grid = [] {
    std::set<MultiModalAction> out;
    std::array<int, kNumSlices> prb = {3, 11, 36};
    std::sort(prb.begin(), prb.end());
    do {
      for (int s0 = 0; s0 < 3; ++s0)
        for (int s1 = 0; s1 < 3; ++s1)
          for (int s2 = 0; s2 < 3; ++s2) {
            MultiModalAction a;
            a.prb = prb;
            a.sched = {static_cast<SchedPolicy>(s0), static_cast<SchedPolicy>(s1),
                       static_cast<SchedPolicy>(s2)};
            out.insert(a);
          }
    } while (std::next_permutation(prb.begin(), prb.end()));
    return std::vector<MultiModalAction>(out.begin(), out.end());
  }();
  return grid;
}

// ---- policies ---------------------------------------------------------------

struct Agent::Policy {
  virtual ~Policy() = default;
  virtual std::optional<MultiModalAction> propose(const LatentState& latent,
                                                  std::mt19937_64& rng) = 0;
  virtual void observe(const MultiModalAction&, double) {}
};

struct Agent::ReplayPolicy : Agent::Policy {
  explicit ReplayPolicy(std::vector<MultiModalAction> trace) : trace_(std::move(trace)) {}

  std::optional<MultiModalAction> propose(const LatentState&, std::mt19937_64&) override {
    if (cursor_ >= trace_.size()) return std::nullopt;
    return trace_[cursor_++];
  }

  std::vector<MultiModalAction> trace_;
  size_t cursor_ = 0;
};

struct Agent::GreedyGraphPolicy : Agent::Policy {
  GreedyGraphPolicy(const AttributedGraph* graph, RewardConfig config, double epsilon)
      : graph_(graph), config_(config), epsilon_(epsilon) {
    if (graph_ == nullptr) throw ConfigError("greedy-graph policy needs an attributed graph");
  }

  std::optional<MultiModalAction> propose(const LatentState&, std::mt19937_64& rng) override {
    const auto& grid = default_action_grid();
    double u = uniform01(rng);
    if (u < epsilon_) return grid[uniform_index(rng, grid.size())];
    if (last_ && graph_->contains(*last_)) {
      std::vector<MultiModalAction> nbrs = graph_->neighbors(*last_);
      if (!nbrs.empty()) {
        // Neighbors arrive in ascending action order; strict improvement keeps
        // the lexicographically lowest among ties.
        MultiModalAction best = nbrs.front();
        double best_value = graph_->expected_reward(best, config_);
        for (size_t i = 1; i < nbrs.size(); ++i) {
          double v = graph_->expected_reward(nbrs[i], config_);
          if (v > best_value) {
            best = nbrs[i];
            best_value = v;
          }
        }
        return best;
      }
    }
    return grid[uniform_index(rng, grid.size())];
  }

  void observe(const MultiModalAction& action, double) override { last_ = action; }

  const AttributedGraph* graph_;
  RewardConfig config_;
  double epsilon_;
  std::optional<MultiModalAction> last_;
};

struct Agent::BanditPolicy : Agent::Policy {
  explicit BanditPolicy(double epsilon) : epsilon_(epsilon) {}

  std::optional<MultiModalAction> propose(const LatentState&, std::mt19937_64& rng) override {
    const auto& grid = default_action_grid();
    double u = uniform01(rng);
    if (u < epsilon_) return grid[uniform_index(rng, grid.size())];
    // Sweep untried arms first, in ascending action order.
    while (sweep_ < grid.size() && estimates_.count(grid[sweep_]) > 0) ++sweep_;
    if (sweep_ < grid.size()) return grid[sweep_];
    const MultiModalAction* best = nullptr;
    double best_value = 0.0;
    for (const auto& a : grid) {
      auto it = estimates_.find(a);
      if (it == estimates_.end()) continue;
      if (best == nullptr || it->second.mean > best_value) {
        best = &a;
        best_value = it->second.mean;
      }
    }
    if (best == nullptr) return grid[uniform_index(rng, grid.size())];
    return *best;
  }

  void observe(const MultiModalAction& action, double realized) override {
    Estimate& e = estimates_[action];
    ++e.count;
    e.mean += (realized - e.mean) / e.count;
  }

  struct Estimate {
    long count = 0;
    double mean = 0.0;
  };
  double epsilon_;
  std::map<MultiModalAction, Estimate> estimates_;
  size_t sweep_ = 0;
};

// ---- agent facade -----------------------------------------------------------

Agent::Agent(AgentProfile profile, uint64_t seed, const AttributedGraph* graph)
    : profile_(std::move(profile)), rng_(seed) {
  profile_.validate();
  switch (profile_.policy) {
    case PolicyKind::replay:
      policy_ = std::make_unique<ReplayPolicy>(profile_.replay);
      break;
    case PolicyKind::greedy_graph:
      policy_ = std::make_unique<GreedyGraphPolicy>(graph, profile_.reward_config,
                                                    profile_.epsilon);
      break;
    case PolicyKind::tabular_bandit:
      policy_ = std::make_unique<BanditPolicy>(profile_.epsilon);
      break;
  }
}

Agent::~Agent() = default;
Agent::Agent(Agent&&) noexcept = default;
Agent& Agent::operator=(Agent&&) noexcept = default;

std::optional<MultiModalAction> Agent::decide(const LatentState& latent) {
  std::optional<MultiModalAction> action = policy_->propose(latent, rng_);
  if (action) action->ensure_valid();
  return action;
}

void Agent::observe(const MultiModalAction& action, double realized_reward) {
  policy_->observe(action, realized_reward);
}

}  // namespace agex
