#include "agex/graph.hpp"

#include <sstream>

namespace agex {

void AttributedGraph::record(const MultiModalAction& action, const PerUeSamples& consequence) {
  action.ensure_valid();
  NodeAttribute& node = nodes_[action];
  for (int p = 0; p < kNumAttributes; ++p) node.samples[p].push_back(consequence.values[p]);
  ++node.occurrence_count;
  if (last_) ++edges_[{*last_, action}];
  last_ = action;
}

bool AttributedGraph::contains(const MultiModalAction& a) const { return nodes_.count(a) > 0; }

const NodeAttribute& AttributedGraph::node(const MultiModalAction& a) const {
  auto it = nodes_.find(a);
  if (it == nodes_.end()) throw NotFoundError("no node for action " + a.label());
  return it->second;
}

double AttributedGraph::expected_kpi(const MultiModalAction& a, int p) const {
  if (p < 0 || p >= kNumAttributes) throw std::invalid_argument("attribute index out of range");
  const NodeAttribute& n = node(a);
  double sum = 0.0;
  long count = 0;
  for (const auto& occurrence : n.samples[p]) {
    for (double v : occurrence) sum += v;
    count += static_cast<long>(occurrence.size());
  }
  return count == 0 ? 0.0 : sum / count;
}

double AttributedGraph::expected_slice_kpi(const MultiModalAction& a, Kpi k, Slice l) const {
  const NodeAttribute& n = node(a);
  const auto& occurrences = n.samples[attribute_index(k, l)];
  double sum = 0.0;
  for (const auto& occurrence : occurrences)
    for (double v : occurrence) sum += v;
  return sum / (static_cast<double>(kWindowRows) * n.occurrence_count);
}

double AttributedGraph::expected_reward(const MultiModalAction& a,
                                        const RewardConfig& config) const {
  double total = 0.0;
  for (int l = 0; l < kNumSlices; ++l) {
    Slice slice = static_cast<Slice>(l);
    total += config.weights[l] * expected_slice_kpi(a, config.target[l], slice);
  }
  return total;
}

std::vector<MultiModalAction> AttributedGraph::neighbors(const MultiModalAction& a) const {
  node(a);  // anchor must exist
  std::vector<MultiModalAction> out;
  // edges_ is ordered by (from, to), so the slice for `a` is contiguous and
  // already in ascending target order.
  for (auto it = edges_.lower_bound({a, MultiModalAction{}}); it != edges_.end(); ++it) {
    if (it->first.first != a) break;
    out.push_back(it->first.second);
  }
  return out;
}

long AttributedGraph::total_traversals() const {
  long total = 0;
  for (const auto& [key, count] : edges_) total += count;
  return total;
}

long AttributedGraph::edge_traversals(const MultiModalAction& from,
                                      const MultiModalAction& to) const {
  auto it = edges_.find({from, to});
  return it == edges_.end() ? 0 : it->second;
}

std::vector<MultiModalAction> AttributedGraph::actions() const {
  std::vector<MultiModalAction> out;
  out.reserve(nodes_.size());
  for (const auto& [action, node] : nodes_) out.push_back(action);
  return out;
}

json AttributedGraph::to_json() const {
  json nodes = json::array();
  for (const auto& [action, node] : nodes_) {
    nodes.push_back(json{{"action", action},
                         {"occurrences", node.occurrence_count},
                         {"attributes", node.samples}});
  }
  json edges = json::array();
  for (const auto& [key, count] : edges_)
    edges.push_back(json{{"from", key.first}, {"to", key.second}, {"count", count}});
  json j{{"nodes", nodes}, {"edges", edges}};
  if (last_)
    j["last"] = *last_;
  else
    j["last"] = nullptr;
  return j;
}

AttributedGraph AttributedGraph::from_json(const json& j) {
  AttributedGraph g;
  for (const auto& jn : j.at("nodes")) {
    MultiModalAction action = jn.at("action").get<MultiModalAction>();
    NodeAttribute node;
    node.occurrence_count = jn.at("occurrences").get<int>();
    if (node.occurrence_count <= 0) throw TraceError("graph node with non-positive occurrences");
    const auto& attrs = jn.at("attributes");
    if (!attrs.is_array() || attrs.size() != kNumAttributes)
      throw TraceError("graph node must carry " + std::to_string(kNumAttributes) +
                       " attribute lists");
    for (int p = 0; p < kNumAttributes; ++p)
      node.samples[p] = attrs[p].get<std::vector<std::vector<double>>>();
    g.nodes_[action] = std::move(node);
  }
  for (const auto& je : j.at("edges")) {
    auto from = je.at("from").get<MultiModalAction>();
    auto to = je.at("to").get<MultiModalAction>();
    g.edges_[{from, to}] = je.at("count").get<long>();
  }
  if (j.contains("last") && !j.at("last").is_null())
    g.last_ = j.at("last").get<MultiModalAction>();
  return g;
}

std::string AttributedGraph::to_dot() const {
  std::map<MultiModalAction, size_t> ids;
  size_t next = 0;
  for (const auto& [action, node] : nodes_) ids[action] = next++;

  std::ostringstream os;
  os << "digraph action_graph {\n";
  os << "  rankdir=LR;\n  node [shape=box];\n";
  for (const auto& [action, node] : nodes_) {
    os << "  n" << ids.at(action) << " [label=\"" << action.label()
       << "\\nocc=" << node.occurrence_count << "\"];\n";
  }
  for (const auto& [key, count] : edges_) {
    os << "  n" << ids.at(key.first) << " -> n" << ids.at(key.second) << " [label=\"" << count
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace agex
