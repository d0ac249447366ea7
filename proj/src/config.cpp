#include "agex/config.hpp"

#include <fstream>

namespace agex {

void ExperimentConfig::validate() const {
  if (duration_steps < 2) throw ConfigError("config: duration_steps must be >= 2");
  if (warmup_steps < 0) throw ConfigError("config: warmup_steps must be >= 0");
  if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("config: epsilon must be in [0, 1]");
  if (history_len < 1) throw ConfigError("config: history_len must be >= 1");
  if (profile.embb_mbps < 0.0 || profile.mmtc_kbps < 0.0 || profile.urllc_kbps < 0.0)
    throw ConfigError("config: traffic rates must be non-negative");
  int total = 0;
  for (int c : ues_per_slice) {
    if (c < 0) throw ConfigError("config: negative UE count");
    total += c;
  }
  if (total == 0) throw ConfigError("config: at least one UE is required");
  link.validate();
  reward_config().validate();
  if (policy == PolicyKind::replay && replay_actions.empty())
    throw ConfigError("config: replay policy needs replay actions");
  for (const auto& a : replay_actions) a.ensure_valid();
}

RewardConfig ExperimentConfig::reward_config() const {
  RewardConfig rc = agent_kind == AgentKind::high_throughput ? RewardConfig::high_throughput()
                                                             : RewardConfig::low_latency();
  if (weights_override) rc.weights = *weights_override;
  return rc;
}

AgentProfile ExperimentConfig::agent_profile() const {
  AgentProfile p;
  p.kind = agent_kind;
  p.policy = policy;
  p.reward_config = reward_config();
  p.epsilon = epsilon;
  p.replay = replay_actions;
  return p;
}

SteeringConfig ExperimentConfig::steering_config() const {
  SteeringConfig s;
  s.strategy = strategy;
  s.history_len = history_len;
  s.reward_config = reward_config();
  return s;
}

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"agent_kind", to_string(c.agent_kind)},
           {"policy", to_string(c.policy)},
           {"epsilon", c.epsilon},
           {"profile", c.profile},
           {"ues_per_slice", c.ues_per_slice},
           {"link", c.link},
           {"strategy", to_string(c.strategy)},
           {"history_len", c.history_len},
           {"duration_steps", c.duration_steps},
           {"warmup_steps", c.warmup_steps},
           {"seed", c.seed},
           {"encoder_seed", c.encoder_seed},
           {"output_dir", c.output_dir}};
  if (c.weights_override) j["weights"] = *c.weights_override;
  if (!c.replay_actions.empty()) j["replay"] = c.replay_actions;
}

void from_json(const json& j, ExperimentConfig& c) {
  ExperimentConfig d;
  if (j.contains("agent_kind"))
    c.agent_kind = agent_kind_from_string(j.at("agent_kind").get<std::string>());
  if (j.contains("policy")) c.policy = policy_kind_from_string(j.at("policy").get<std::string>());
  c.epsilon = j.value("epsilon", d.epsilon);
  if (j.contains("weights"))
    c.weights_override = j.at("weights").get<std::array<double, kNumSlices>>();
  if (j.contains("replay"))
    c.replay_actions = j.at("replay").get<std::vector<MultiModalAction>>();
  if (j.contains("profile")) c.profile = j.at("profile").get<TrafficProfile>();
  c.ues_per_slice = j.value("ues_per_slice", d.ues_per_slice);
  if (j.contains("link")) c.link = j.at("link").get<LinkConfig>();
  if (j.contains("strategy"))
    c.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  c.history_len = j.value("history_len", d.history_len);
  c.duration_steps = j.value("duration_steps", d.duration_steps);
  c.warmup_steps = j.value("warmup_steps", d.warmup_steps);
  c.seed = j.value("seed", d.seed);
  c.encoder_seed = j.value("encoder_seed", d.encoder_seed);
  c.output_dir = j.value("output_dir", d.output_dir);
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw ConfigError("cannot open config file: " + json_path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + json_path.string() + ": " + e.what());
  }
  ExperimentConfig c = j.get<ExperimentConfig>();
  c.validate();
  return c;
}

namespace {

bool lookup_users(const std::string& token, std::array<int, kNumSlices>& out) {
  if (token == "6") out = {2, 2, 2};
  else if (token == "5") out = {2, 1, 2};
  else if (token == "4") out = {1, 1, 2};
  else if (token == "3") out = {1, 1, 1};
  else if (token == "2") out = {1, 0, 1};
  else if (token == "1e") out = {1, 0, 0};
  else if (token == "1m") out = {0, 1, 0};
  else if (token == "1u") out = {0, 0, 1};
  else return false;
  return true;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::preset(const std::string& name) {
  // "<ht|ll>-<trf1|trf2>-<users>"            population matrix, no steering
  // "<ht|ll>-<trf1|trf2>-<b|a1|a2|a3>-<O>"   steering runs at 6 users
  auto parts = split(name, '-');
  auto fail = [&]() -> ConfigError {
    return ConfigError("unknown preset: " + name);
  };
  if (parts.size() != 3 && parts.size() != 4) throw fail();

  ExperimentConfig c;
  if (parts[0] == "ht") c.agent_kind = AgentKind::high_throughput;
  else if (parts[0] == "ll") c.agent_kind = AgentKind::low_latency;
  else throw fail();
  if (parts[1] == "trf1") c.profile = TrafficProfile::trf1();
  else if (parts[1] == "trf2") c.profile = TrafficProfile::trf2();
  else throw fail();

  if (parts.size() == 3) {
    if (!lookup_users(parts[2], c.ues_per_slice)) throw fail();
  } else {
    c.ues_per_slice = {2, 2, 2};
    if (parts[2] == "b") c.strategy = Strategy::none;
    else if (parts[2] == "a1") c.strategy = Strategy::max_reward;
    else if (parts[2] == "a2") c.strategy = Strategy::min_reward;
    else if (parts[2] == "a3") c.strategy = Strategy::improve_bitrate;
    else throw fail();
    if (parts[3] == "10") c.history_len = 10;
    else if (parts[3] == "20") c.history_len = 20;
    else throw fail();
  }
  c.output_dir = "runs/" + name;
  c.validate();
  return c;
}

std::vector<std::string> ExperimentConfig::preset_names() {
  std::vector<std::string> out;
  for (const std::string agent : {"ht", "ll"})
    for (const std::string trf : {"trf1", "trf2"}) {
      for (const std::string users : {"6", "5", "4", "3", "2", "1e", "1m", "1u"})
        out.push_back(agent + "-" + trf + "-" + users);
      for (const std::string strat : {"b", "a1", "a2", "a3"})
        for (const std::string o : {"10", "20"})
          out.push_back(agent + "-" + trf + "-" + strat + "-" + o);
    }
  return out;
}

bool comparable_configs(const json& a, const json& b) {
  json ca = a, cb = b;
  for (json* j : {&ca, &cb}) {
    j->erase("strategy");
    j->erase("history_len");
    j->erase("output_dir");
  }
  return ca == cb;
}

}  // namespace agex
