#include "agex/trace.hpp"

namespace agex {

void to_json(json& j, const SteerRecord& r) {
  j = json{{"strategy", to_string(r.strategy)},
           {"active", r.active},
           {"omega", r.omega},
           {"gate", r.gate},
           {"suggested", r.suggested},
           {"q_size", r.q_size},
           {"expected_original", r.expected_original},
           {"expected_chosen", r.expected_chosen},
           {"metric", r.metric},
           {"estimate_source", r.estimate_source},
           {"reason", r.reason}};
  if (r.suggested_action)
    j["suggested_action"] = *r.suggested_action;
  else
    j["suggested_action"] = nullptr;
}

void from_json(const json& j, SteerRecord& r) {
  r.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  r.active = j.at("active").get<bool>();
  r.omega = j.at("omega").get<bool>();
  r.gate = j.at("gate").get<bool>();
  r.suggested = j.at("suggested").get<bool>();
  r.q_size = j.at("q_size").get<int>();
  r.expected_original = j.at("expected_original").get<double>();
  r.expected_chosen = j.at("expected_chosen").get<double>();
  r.metric = j.at("metric").get<std::string>();
  r.estimate_source = j.at("estimate_source").get<std::string>();
  r.reason = j.at("reason").get<std::string>();
  if (j.contains("suggested_action") && !j.at("suggested_action").is_null())
    r.suggested_action = j.at("suggested_action").get<MultiModalAction>();
  else
    r.suggested_action.reset();
}

void to_json(json& j, const TraceStep& s) {
  j = json{{"type", "step"},
           {"step", s.step},
           {"action", s.action},
           {"kpi_window", s.kpi_window},
           {"per_ue", s.per_ue},
           {"reward", s.reward},
           {"replaced", s.replaced}};
  if (s.latent) j["latent"] = *s.latent;
  if (s.original_action)
    j["original_action"] = *s.original_action;
  else
    j["original_action"] = nullptr;
  if (s.steer) j["steer"] = *s.steer;
}

void from_json(const json& j, TraceStep& s) {
  s.step = j.at("step").get<int>();
  s.action = j.at("action").get<MultiModalAction>();
  s.kpi_window = j.at("kpi_window").get<KpiWindow>();
  s.per_ue = j.at("per_ue").get<PerUeSamples>();
  s.reward = j.at("reward").get<double>();
  s.replaced = j.at("replaced").get<bool>();
  if (j.contains("latent") && !j.at("latent").is_null())
    s.latent = j.at("latent").get<LatentState>();
  else
    s.latent.reset();
  if (j.contains("original_action") && !j.at("original_action").is_null())
    s.original_action = j.at("original_action").get<MultiModalAction>();
  else
    s.original_action.reset();
  if (j.contains("steer") && !j.at("steer").is_null())
    s.steer = j.at("steer").get<SteerRecord>();
  else
    s.steer.reset();
}

TraceWriter::TraceWriter(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path);
  if (!out_) throw ConfigError("cannot open trace for writing: " + path.string());
}

void TraceWriter::write_header(const TraceHeader& header) {
  json j{{"type", "header"}, {"version", header.version}, {"config", header.config}};
  out_ << j.dump() << "\n";
}

void TraceWriter::write_step(const TraceStep& step) {
  json j = step;
  out_ << j.dump() << "\n";
}

void TraceWriter::flush() { out_.flush(); }

Trace Trace::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace: " + path.string());
  Trace trace;
  std::string line;
  long line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw TraceError("line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    try {
      const std::string type = j.value("type", "");
      if (type == "header") {
        if (have_header)
          throw TraceError("line " + std::to_string(line_no) + ": duplicate header");
        trace.header.version = j.value("version", 1);
        trace.header.config = j.value("config", json::object());
        have_header = true;
      } else if (type == "step") {
        trace.steps.push_back(j.get<TraceStep>());
      } else {
        throw TraceError("line " + std::to_string(line_no) + ": unknown record type '" + type +
                         "'");
      }
    } catch (const TraceError&) {
      throw;
    } catch (const std::exception& e) {
      throw TraceError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw TraceError("trace has no header line");
  for (size_t i = 0; i < trace.steps.size(); ++i) {
    if (trace.steps[i].step != static_cast<int>(i))
      throw TraceError("step indices not contiguous at position " + std::to_string(i));
  }
  return trace;
}

}  // namespace agex
