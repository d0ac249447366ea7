#pragma once

// Intent-based action steering. Once per decision the gate
//   (omega and max-reward) or (not omega and min-reward) or (omega and improve-bitrate)
// decides whether to consult the graph, where omega means the proposed
// action's expectation falls strictly below the running average of recent
// realized rewards. Candidates are the previously enforced action plus its
// one-hop out-neighbors; a candidate replaces the proposal only when its
// expected metric is strictly better (lower, for min-reward).

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "agex/graph.hpp"
#include "agex/reward.hpp"
#include "agex/types.hpp"

namespace agex {

enum class Strategy { none, max_reward, min_reward, improve_bitrate };
const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct SteeringConfig {
  Strategy strategy = Strategy::none;
  int history_len = 10;  // O: realized rewards in the running average
  RewardConfig reward_config;
  // improve-bitrate target attribute (which bitrate to push up).
  Kpi bitrate_kpi = Kpi::tx_brate;
  Slice bitrate_slice = Slice::embb;

  void validate() const;
};

// Ring of the last O realized rewards.
class RewardHistory {
 public:
  explicit RewardHistory(int capacity);
  void push(double realized_reward);
  bool empty() const { return values_.empty(); }
  size_t size() const { return values_.size(); }
  double mean() const;  // throws std::logic_error when empty

 private:
  size_t capacity_;
  std::deque<double> values_;
};

// Strictly below the running average; ties are not underperformance.
bool omega(double expected_reward, const RewardHistory& history);

struct SteerDecision {
  MultiModalAction action;       // what to enforce
  bool active = false;           // strategy engaged and history available
  bool omega = false;
  bool gate = false;
  bool suggested = false;        // a candidate different from the proposal was selected
  bool replaced = false;         // the candidate also passed the strict check
  int q_size = 0;
  double expected_original = 0.0;
  double expected_chosen = 0.0;  // metric of the selected candidate (when suggested)
  std::string metric;            // "reward" or the bitrate attribute name
  std::string estimate_source;   // "graph" | "window" for expected_original
  std::string reason;            // why the proposal passed through / was replaced
  std::optional<MultiModalAction> suggested_action;
};

// latest_window backs the one-sample estimate for proposals without a node.
SteerDecision steer(const SteeringConfig& config, const AttributedGraph& graph,
                    const MultiModalAction& proposed,
                    const std::optional<MultiModalAction>& previous,
                    const RewardHistory& history, const KpiWindow& latest_window);

struct ActionTally {
  long suggested = 0;
  long enforced = 0;
};

struct SteeringStats {
  std::map<MultiModalAction, ActionTally> per_action;  // keyed by the displaced action
  long total_suggested = 0;
  long total_enforced = 0;
  long max_enforced_per_action = 0;
  bool any_action_replaced_more_than_three_times = false;

  json to_json() const;
  std::string to_text() const;
};

// Tally from per-step steering decisions (original action, suggested flag,
// replaced flag).
struct SteerEvent {
  MultiModalAction original;
  bool suggested = false;
  bool replaced = false;
};
SteeringStats steering_stats(const std::vector<SteerEvent>& events);

}  // namespace agex
