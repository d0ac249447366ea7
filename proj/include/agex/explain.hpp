#pragma once

// Transition-based explanation synthesis: classify consecutive action pairs
// into the four (PRB, scheduling) change categories, quantify per-attribute
// KPI movement, distill the mapping into a small CART tree, and render
// per-category natural-language summaries.

#include <array>
#include <string>
#include <vector>

#include "agex/graph.hpp"
#include "agex/types.hpp"

namespace agex {

// 2^2 categories over (PRB part changed?, scheduling part changed?).
enum class TransitionCategory : int {
  same_prb = 0,    // PRBs equal, scheduling differs
  same_sched = 1,  // scheduling equal, PRBs differ
  self_loop = 2,   // both equal
  distinct = 3,    // both differ
};
inline constexpr int kNumCategories = 4;

const char* to_string(TransitionCategory c);
TransitionCategory classify_transition(const MultiModalAction& prev,
                                       const MultiModalAction& next);

enum class DeltaMode { mean_diff, jsd };
const char* to_string(DeltaMode m);
DeltaMode delta_mode_from_string(const std::string& s);

inline constexpr int kJsdBins = 32;

// Jensen-Shannon divergence between two sample sets via equal-width
// histograms over the pooled range; natural log, so the range is [0, ln 2].
// Empty inputs yield 0.
double jensen_shannon(const std::vector<double>& a, const std::vector<double>& b,
                      int bins = kJsdBins);

// Node-level per-attribute movement between two graph nodes: signed mean
// difference (antisymmetric) or JSD over the pooled node samples (symmetric).
std::array<double, kNumAttributes> kpi_delta(const AttributedGraph& g,
                                             const MultiModalAction& prev,
                                             const MultiModalAction& next, DeltaMode mode);

struct TransitionRecord {
  int step = 0;  // index of the later of the two steps
  MultiModalAction from, to;
  TransitionCategory category = TransitionCategory::self_loop;
  std::array<double, kNumAttributes> delta{};
};

// Minimal per-step view needed to build transitions (the trace module's step
// record converts to this).
struct StepObservation {
  int step = 0;
  MultiModalAction action;
  KpiWindow window;
  const PerUeSamples* per_ue = nullptr;  // required for DeltaMode::jsd
};

// One record per consecutive step pair; deltas come from the two steps' own
// consequence measurements (per-event, not pooled over node history).
std::vector<TransitionRecord> build_transitions(const std::vector<StepObservation>& steps,
                                                DeltaMode mode = DeltaMode::mean_diff);

// ---- CART distillation -------------------------------------------------------

struct TreeNode {
  bool leaf = true;
  int feature = -1;         // split: attribute index
  double threshold = 0.0;   // x[feature] <= threshold goes left
  int left = -1, right = -1;
  TransitionCategory label = TransitionCategory::self_loop;
  double purity = 0.0;      // majority fraction at the node
  int count = 0;
  std::array<int, kNumCategories> class_counts{};
};

class DecisionTree {
 public:
  // Gini-impurity CART with a deterministic feature/threshold scan order.
  // Single-category input yields a flagged single-leaf tree.
  static DecisionTree fit(const std::vector<TransitionRecord>& records, int max_depth = 4,
                          int min_leaf = 5);

  TransitionCategory predict(const std::array<double, kNumAttributes>& features) const;
  double training_accuracy(const std::vector<TransitionRecord>& records) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int root() const { return 0; }
  bool degenerate_single_class() const { return degenerate_; }
  int depth() const;

  // Root-to-leaf condition strings for every leaf whose majority class is c.
  std::vector<std::pair<int, std::string>> paths_for(TransitionCategory c,
                                                     DeltaMode mode) const;

  json to_json() const;
  std::string to_text(DeltaMode mode) const;

 private:
  std::vector<TreeNode> nodes_;
  bool degenerate_ = false;
};

// ---- summaries ----------------------------------------------------------------

struct CategorySummary {
  TransitionCategory category = TransitionCategory::self_loop;
  int count = 0;
  double fraction = 0.0;
  std::string conditions;        // conjunction from the best-supported leaf
  int dominant_attribute = -1;   // argmax |mean delta| over the category's records
  double dominant_mean = 0.0;
  std::string statement;
};

struct ExplanationReport {
  DeltaMode mode = DeltaMode::mean_diff;
  int record_count = 0;
  std::array<double, kNumCategories> fractions{};
  DecisionTree tree;
  double training_accuracy = 0.0;
  double majority_baseline = 0.0;
  std::vector<CategorySummary> summaries;
  double synthesis_seconds = 0.0;

  json to_json() const;
  std::string to_text() const;
};

ExplanationReport summarize(const std::vector<TransitionRecord>& records,
                            const DecisionTree& tree, DeltaMode mode,
                            double synthesis_seconds);

}  // namespace agex
