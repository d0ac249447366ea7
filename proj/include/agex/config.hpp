#pragma once

// Experiment configuration: agent profile, traffic, slice population,
// steering, durations, seeds, and output location. Loadable from JSON with
// named presets covering the supported configuration matrix.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "agex/agent.hpp"
#include "agex/sim_env.hpp"
#include "agex/steer.hpp"
#include "agex/types.hpp"

namespace agex {

struct ExperimentConfig {
  AgentKind agent_kind = AgentKind::high_throughput;
  PolicyKind policy = PolicyKind::tabular_bandit;
  double epsilon = 0.15;
  std::optional<std::array<double, kNumSlices>> weights_override;
  std::vector<MultiModalAction> replay_actions;  // inline replay trace

  TrafficProfile profile = TrafficProfile::trf1();
  std::array<int, kNumSlices> ues_per_slice{2, 2, 2};
  LinkConfig link;

  Strategy strategy = Strategy::none;
  int history_len = 10;

  int duration_steps = 7200;  // 30 minutes of 250 ms decisions
  int warmup_steps = 1000;    // steering disabled while the agent settles
  uint64_t seed = 1;
  uint64_t encoder_seed = kDefaultEncoderSeed;

  std::string output_dir = "run-out";

  void validate() const;
  RewardConfig reward_config() const;   // kind defaults, weights_override wins
  AgentProfile agent_profile() const;
  SteeringConfig steering_config() const;

  static ExperimentConfig load(const std::filesystem::path& json_path);
  static ExperimentConfig preset(const std::string& name);
  static std::vector<std::string> preset_names();
};

void to_json(json& j, const ExperimentConfig& c);
void from_json(const json& j, ExperimentConfig& c);

// Config equality modulo steering strategy/history and output location; used
// to check that two traces are comparable.
bool comparable_configs(const json& a, const json& b);

}  // namespace agex
