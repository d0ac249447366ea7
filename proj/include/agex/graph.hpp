#pragma once

// Attributed action graph: one node per exact enforced action, directed edges
// between consecutively enforced actions with traversal counts, and per-node
// KPI attributes holding the raw per-UE samples of every occurrence. The
// structure is value-semantic; callers serialize writes, reads may interleave
// freely between them.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agex/reward.hpp"
#include "agex/sim_env.hpp"
#include "agex/types.hpp"

namespace agex {

// Per-node attribute store: samples[p][occurrence] is the flattened
// rows-by-UEs sample vector of attribute p for that visit.
struct NodeAttribute {
  std::array<std::vector<std::vector<double>>, kNumAttributes> samples;
  int occurrence_count = 0;

  bool operator==(const NodeAttribute&) const = default;
};

class AttributedGraph {
 public:
  // Append one enforced action and the per-UE samples of its consequence
  // window; links an edge from the previously recorded action.
  void record(const MultiModalAction& action, const PerUeSamples& consequence);

  bool contains(const MultiModalAction& a) const;
  const NodeAttribute& node(const MultiModalAction& a) const;  // throws NotFoundError

  // Arithmetic mean of every stored raw sample of attribute p (0 when the
  // attribute has no samples, e.g. a slice with no UEs).
  double expected_kpi(const MultiModalAction& a, int p) const;

  // Mean per-row slice aggregate of attribute (k, l): total samples divided by
  // rows * occurrences. This is the scale at which the reward is defined.
  double expected_slice_kpi(const MultiModalAction& a, Kpi k, Slice l) const;

  // Weighted target-KPI expectation of a node under the given reward config;
  // equals reward() of the occurrence's window for a single-occurrence node.
  double expected_reward(const MultiModalAction& a, const RewardConfig& config) const;

  // One-hop out-neighbors in ascending action order. Throws NotFoundError
  // when the anchor node does not exist.
  std::vector<MultiModalAction> neighbors(const MultiModalAction& a) const;

  size_t node_count() const { return nodes_.size(); }
  size_t edge_count() const { return edges_.size(); }
  long total_traversals() const;
  long edge_traversals(const MultiModalAction& from, const MultiModalAction& to) const;
  const std::optional<MultiModalAction>& last_node() const { return last_; }
  std::vector<MultiModalAction> actions() const;

  json to_json() const;
  static AttributedGraph from_json(const json& j);
  std::string to_dot() const;

  bool operator==(const AttributedGraph&) const = default;

 private:
  std::map<MultiModalAction, NodeAttribute> nodes_;
  std::map<std::pair<MultiModalAction, MultiModalAction>, long> edges_;
  std::optional<MultiModalAction> last_;
};

}  // namespace agex
