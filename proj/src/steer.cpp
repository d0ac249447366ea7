#include "agex/steer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace agex {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::max_reward: return "max-reward";
    case Strategy::min_reward: return "min-reward";
    case Strategy::improve_bitrate: return "improve-bitrate";
  }
  throw std::invalid_argument("unknown strategy");
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "none") return Strategy::none;
  if (s == "max-reward" || s == "ar1") return Strategy::max_reward;
  if (s == "min-reward" || s == "ar2") return Strategy::min_reward;
  if (s == "improve-bitrate" || s == "ar3") return Strategy::improve_bitrate;
  throw ConfigError("unknown steering strategy: " + s);
}

void SteeringConfig::validate() const {
  if (history_len < 1) throw ConfigError("steering: history length must be >= 1");
  reward_config.validate();
}

RewardHistory::RewardHistory(int capacity) : capacity_(static_cast<size_t>(capacity)) {
  if (capacity < 1) throw ConfigError("reward history: capacity must be >= 1");
}

void RewardHistory::push(double realized_reward) {
  values_.push_back(realized_reward);
  if (values_.size() > capacity_) values_.pop_front();
}

double RewardHistory::mean() const {
  if (values_.empty()) throw std::logic_error("reward history: mean of empty history");
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum / values_.size();
}

bool omega(double expected_reward, const RewardHistory& history) {
  return expected_reward < history.mean();
}

SteerDecision steer(const SteeringConfig& config, const AttributedGraph& graph,
                    const MultiModalAction& proposed,
                    const std::optional<MultiModalAction>& previous,
                    const RewardHistory& history, const KpiWindow& latest_window) {
  config.validate();
  SteerDecision d;
  d.action = proposed;

  if (config.strategy == Strategy::none) {
    d.reason = "steering disabled";
    return d;
  }
  if (history.empty()) {
    d.reason = "no realized rewards yet";
    return d;
  }
  d.active = true;

  const bool bitrate_metric = config.strategy == Strategy::improve_bitrate;
  d.metric = bitrate_metric
                 ? attribute_name(attribute_index(config.bitrate_kpi, config.bitrate_slice))
                 : "reward";
  auto graph_metric = [&](const MultiModalAction& a) {
    return bitrate_metric
               ? graph.expected_slice_kpi(a, config.bitrate_kpi, config.bitrate_slice)
               : graph.expected_reward(a, config.reward_config);
  };

  // The gate always works on the expected reward; the strategy metric can be
  // a KPI instead. Proposals never seen by the graph fall back to a
  // one-sample estimate from the latest observed window.
  double expected_reward_original;
  if (graph.contains(proposed)) {
    expected_reward_original = graph.expected_reward(proposed, config.reward_config);
    d.expected_original = graph_metric(proposed);
    d.estimate_source = "graph";
  } else {
    expected_reward_original = reward(latest_window, config.reward_config);
    d.expected_original =
        bitrate_metric ? latest_window.column_mean(config.bitrate_kpi, config.bitrate_slice)
                       : expected_reward_original;
    d.estimate_source = "window";
  }

  d.omega = omega(expected_reward_original, history);
  switch (config.strategy) {
    case Strategy::max_reward: d.gate = d.omega; break;
    case Strategy::min_reward: d.gate = !d.omega; break;
    case Strategy::improve_bitrate: d.gate = d.omega; break;
    case Strategy::none: break;
  }
  if (!d.gate) {
    d.reason = "gate closed";
    return d;
  }
  if (!previous || !graph.contains(*previous)) {
    d.reason = "previous action not in graph";
    return d;
  }

  // Q = previous action plus its one-hop out-neighbors (deduplicated,
  // ascending order => ties resolve to the lowest action tuple).
  std::set<MultiModalAction> q{*previous};
  for (const auto& n : graph.neighbors(*previous)) q.insert(n);
  d.q_size = static_cast<int>(q.size());

  const bool minimize = config.strategy == Strategy::min_reward;
  std::optional<MultiModalAction> best;
  double best_value = 0.0;
  for (const auto& candidate : q) {
    double value = graph_metric(candidate);
    if (!best || (minimize ? value < best_value : value > best_value)) {
      best = candidate;
      best_value = value;
    }
  }

  if (*best == proposed) {
    d.reason = "graph offers nothing beyond the proposal";
    return d;
  }
  d.suggested = true;
  d.suggested_action = best;
  d.expected_chosen = best_value;

  const bool strictly_better =
      minimize ? best_value < d.expected_original : best_value > d.expected_original;
  if (!strictly_better) {
    d.reason = "candidate not strictly better";
    return d;
  }
  d.replaced = true;
  d.action = *best;
  d.reason = "replaced by graph candidate";
  return d;
}

SteeringStats steering_stats(const std::vector<SteerEvent>& events) {
  SteeringStats stats;
  for (const auto& e : events) {
    if (!e.suggested && !e.replaced) continue;
    ActionTally& tally = stats.per_action[e.original];
    if (e.suggested) {
      ++tally.suggested;
      ++stats.total_suggested;
    }
    if (e.replaced) {
      ++tally.enforced;
      ++stats.total_enforced;
    }
  }
  for (const auto& [action, tally] : stats.per_action)
    stats.max_enforced_per_action = std::max(stats.max_enforced_per_action, tally.enforced);
  stats.any_action_replaced_more_than_three_times = stats.max_enforced_per_action > 3;
  return stats;
}

json SteeringStats::to_json() const {
  json rows = json::array();
  for (const auto& [action, tally] : per_action)
    rows.push_back(
        json{{"action", action}, {"suggested", tally.suggested}, {"enforced", tally.enforced}});
  return json{{"per_action", rows},
              {"total_suggested", total_suggested},
              {"total_enforced", total_enforced},
              {"max_enforced_per_action", max_enforced_per_action},
              {"any_action_replaced_more_than_three_times",
               any_action_replaced_more_than_three_times}};
}

std::string SteeringStats::to_text() const {
  std::ostringstream os;
  os << "Steering interventions (suggested/enforced per displaced action):\n";
  for (const auto& [action, tally] : per_action)
    os << "  " << action.label() << ": " << tally.suggested << "/" << tally.enforced << "\n";
  os << "Totals: suggested " << total_suggested << ", enforced " << total_enforced
     << "; max substitutions of one action " << max_enforced_per_action << "\n";
  return os.str();
}

}  // namespace agex
