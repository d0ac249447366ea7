#pragma once

// Agent-side stack: KPI-window encoder (running min-max normalization plus a
// fixed seeded linear projection squashed into [-1, 1]) and the decision
// policies (replay, greedy-graph, tabular-bandit) behind one Agent facade.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "agex/graph.hpp"
#include "agex/reward.hpp"
#include "agex/types.hpp"

namespace agex {

inline constexpr int kLatentDim = kNumAttributes;  // 9
inline constexpr uint64_t kDefaultEncoderSeed = 0xC0FFEEULL;

struct LatentState {
  std::array<double, kLatentDim> values{};
  bool operator==(const LatentState&) const = default;
};

void to_json(json& j, const LatentState& s);
void from_json(const json& j, LatentState& s);

class Encoder {
 public:
  explicit Encoder(uint64_t seed = kDefaultEncoderSeed);

  // Deterministic given the current running bounds and the window. Bounds
  // only widen: the first window's extremes are the floor. A constant-value
  // KPI normalizes to -1.
  LatentState encode(const KpiWindow& window);

  const std::array<std::array<double, kWindowRows * kNumKpis * kNumSlices>, kLatentDim>&
  projection() const {
    return projection_;
  }

 private:
  std::array<std::array<double, kWindowRows * kNumKpis * kNumSlices>, kLatentDim> projection_{};
  std::array<double, kNumKpis> lo_{}, hi_{};
  bool seen_any_ = false;
};

enum class AgentKind { high_throughput, low_latency };
enum class PolicyKind { replay, greedy_graph, tabular_bandit };

const char* to_string(AgentKind k);
const char* to_string(PolicyKind k);
AgentKind agent_kind_from_string(const std::string& s);
PolicyKind policy_kind_from_string(const std::string& s);

struct AgentProfile {
  AgentKind kind = AgentKind::high_throughput;
  PolicyKind policy = PolicyKind::tabular_bandit;
  RewardConfig reward_config = RewardConfig::high_throughput();
  double epsilon = 0.15;
  std::vector<MultiModalAction> replay;  // used by the replay policy

  void validate() const;
};

// Coarse discretized action set: the PRB emphasis permutations of (36, 3, 11)
// crossed with all 27 scheduler triples, in ascending action order.
const std::vector<MultiModalAction>& default_action_grid();

class Agent {
 public:
  // The graph pointer is required by the greedy-graph policy and ignored by
  // the others; it must outlive the agent.
  Agent(AgentProfile profile, uint64_t seed, const AttributedGraph* graph = nullptr);
  ~Agent();
  Agent(Agent&&) noexcept;
  Agent& operator=(Agent&&) noexcept;

  // nullopt signals the end of a replay trace.
  std::optional<MultiModalAction> decide(const LatentState& latent);

  // Feed back the enforced action and its realized reward.
  void observe(const MultiModalAction& action, double realized_reward);

  const AgentProfile& profile() const { return profile_; }

 private:
  struct Policy;
  struct ReplayPolicy;
  struct GreedyGraphPolicy;
  struct BanditPolicy;

  AgentProfile profile_;
  std::mt19937_64 rng_;
  std::unique_ptr<Policy> policy_;
};

}  // namespace agex
