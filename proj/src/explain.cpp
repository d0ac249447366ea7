#include "agex/explain.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace agex {

const char* to_string(TransitionCategory c) {
  switch (c) {
    case TransitionCategory::same_prb: return "same-prb";
    case TransitionCategory::same_sched: return "same-sched";
    case TransitionCategory::self_loop: return "self";
    case TransitionCategory::distinct: return "distinct";
  }
  throw std::invalid_argument("unknown transition category");
}

TransitionCategory classify_transition(const MultiModalAction& prev,
                                       const MultiModalAction& next) {
  const bool prb_equal = prev.prb == next.prb;
  const bool sched_equal = prev.sched == next.sched;
  if (prb_equal && sched_equal) return TransitionCategory::self_loop;
  if (prb_equal) return TransitionCategory::same_prb;
  if (sched_equal) return TransitionCategory::same_sched;
  return TransitionCategory::distinct;
}

const char* to_string(DeltaMode m) {
  switch (m) {
    case DeltaMode::mean_diff: return "mean-diff";
    case DeltaMode::jsd: return "jsd";
  }
  throw std::invalid_argument("unknown delta mode");
}

DeltaMode delta_mode_from_string(const std::string& s) {
  if (s == "mean-diff") return DeltaMode::mean_diff;
  if (s == "jsd") return DeltaMode::jsd;
  throw ConfigError("unknown delta mode: " + s);
}

double jensen_shannon(const std::vector<double>& a, const std::vector<double>& b, int bins) {
  if (bins < 1) throw std::invalid_argument("jsd: bins must be >= 1");
  if (a.empty() || b.empty()) return 0.0;
  double lo = a.front(), hi = a.front();
  for (double v : a) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : b) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo <= 0.0) return 0.0;  // identical constant distributions

  std::vector<double> pa(bins, 0.0), pb(bins, 0.0);
  const double width = (hi - lo) / bins;
  auto accumulate = [&](const std::vector<double>& samples, std::vector<double>& prob) {
    const double share = 1.0 / samples.size();
    for (double v : samples) {
      int idx = std::clamp(static_cast<int>((v - lo) / width), 0, bins - 1);
      prob[idx] += share;
    }
  };
  accumulate(a, pa);
  accumulate(b, pb);

  double divergence = 0.0;
  for (int i = 0; i < bins; ++i) {
    const double mid = 0.5 * (pa[i] + pb[i]);
    if (pa[i] > 0.0) divergence += 0.5 * pa[i] * std::log(pa[i] / mid);
    if (pb[i] > 0.0) divergence += 0.5 * pb[i] * std::log(pb[i] / mid);
  }
  return divergence;
}

std::array<double, kNumAttributes> kpi_delta(const AttributedGraph& g,
                                             const MultiModalAction& prev,
                                             const MultiModalAction& next, DeltaMode mode) {
  std::array<double, kNumAttributes> out{};
  if (mode == DeltaMode::mean_diff) {
    for (int p = 0; p < kNumAttributes; ++p)
      out[p] = g.expected_kpi(next, p) - g.expected_kpi(prev, p);
    return out;
  }
  const NodeAttribute& np = g.node(prev);
  const NodeAttribute& nn = g.node(next);
  for (int p = 0; p < kNumAttributes; ++p) {
    std::vector<double> pooled_prev, pooled_next;
    for (const auto& occ : np.samples[p])
      pooled_prev.insert(pooled_prev.end(), occ.begin(), occ.end());
    for (const auto& occ : nn.samples[p])
      pooled_next.insert(pooled_next.end(), occ.begin(), occ.end());
    out[p] = jensen_shannon(pooled_prev, pooled_next);
  }
  return out;
}

std::vector<TransitionRecord> build_transitions(const std::vector<StepObservation>& steps,
                                                DeltaMode mode) {
  std::vector<TransitionRecord> out;
  if (steps.size() < 2) return out;
  out.reserve(steps.size() - 1);
  for (size_t i = 1; i < steps.size(); ++i) {
    const StepObservation& prev = steps[i - 1];
    const StepObservation& next = steps[i];
    TransitionRecord rec;
    rec.step = next.step;
    rec.from = prev.action;
    rec.to = next.action;
    rec.category = classify_transition(prev.action, next.action);
    if (mode == DeltaMode::mean_diff) {
      for (int p = 0; p < kNumAttributes; ++p) {
        Kpi k = attribute_kpi(p);
        Slice l = attribute_slice(p);
        rec.delta[p] = next.window.column_mean(k, l) - prev.window.column_mean(k, l);
      }
    } else {
      if (prev.per_ue == nullptr || next.per_ue == nullptr)
        throw std::invalid_argument("jsd transitions need per-UE samples for both steps");
      for (int p = 0; p < kNumAttributes; ++p)
        rec.delta[p] = jensen_shannon(prev.per_ue->values[p], next.per_ue->values[p]);
    }
    out.push_back(rec);
  }
  return out;
}

// ---- CART -------------------------------------------------------------------

namespace {

double gini(const std::array<int, kNumCategories>& counts, int total) {
  if (total == 0) return 0.0;
  double impurity = 1.0;
  for (int c : counts) {
    double p = static_cast<double>(c) / total;
    impurity -= p * p;
  }
  return impurity;
}

std::string feature_label(int p, DeltaMode mode) {
  return (mode == DeltaMode::mean_diff ? "delta " : "jsd ") + attribute_name(p);
}

struct Builder {
  const std::vector<TransitionRecord>& records;
  int max_depth;
  int min_leaf;
  std::vector<TreeNode> nodes;

  int build(std::vector<int> indices, int depth) {
    TreeNode node;
    node.count = static_cast<int>(indices.size());
    for (int idx : indices) ++node.class_counts[static_cast<int>(records[idx].category)];
    int best_count = -1;
    for (int c = 0; c < kNumCategories; ++c) {
      if (node.class_counts[c] > best_count) {  // strict: ties keep the lowest id
        best_count = node.class_counts[c];
        node.label = static_cast<TransitionCategory>(c);
      }
    }
    node.purity = node.count == 0 ? 0.0 : static_cast<double>(best_count) / node.count;

    const double parent_gini = gini(node.class_counts, node.count);
    bool stop = depth >= max_depth || node.count < 2 * min_leaf || parent_gini <= 0.0;

    int best_feature = -1;
    double best_threshold = 0.0, best_gain = 1e-12;
    if (!stop) {
      for (int f = 0; f < kNumAttributes; ++f) {
        std::vector<std::pair<double, int>> ordered;
        ordered.reserve(indices.size());
        for (int idx : indices)
          ordered.emplace_back(records[idx].delta[f], static_cast<int>(records[idx].category));
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::array<int, kNumCategories> left_counts{};
        int left_n = 0;
        for (size_t i = 0; i + 1 < ordered.size(); ++i) {
          ++left_counts[ordered[i].second];
          ++left_n;
          if (ordered[i].first == ordered[i + 1].first) continue;
          int right_n = node.count - left_n;
          if (left_n < min_leaf || right_n < min_leaf) continue;
          std::array<int, kNumCategories> right_counts{};
          for (int c = 0; c < kNumCategories; ++c)
            right_counts[c] = node.class_counts[c] - left_counts[c];
          double weighted = (left_n * gini(left_counts, left_n) +
                             right_n * gini(right_counts, right_n)) /
                            node.count;
          double gain = parent_gini - weighted;
          if (gain > best_gain) {  // strict: ties keep the first scanned split
            best_gain = gain;
            best_feature = f;
            best_threshold = 0.5 * (ordered[i].first + ordered[i + 1].first);
          }
        }
      }
    }

    int my_index = static_cast<int>(nodes.size());
    nodes.push_back(node);
    if (best_feature < 0) return my_index;

    std::vector<int> left, right;
    for (int idx : indices) {
      if (records[idx].delta[best_feature] <= best_threshold)
        left.push_back(idx);
      else
        right.push_back(idx);
    }
    nodes[my_index].leaf = false;
    nodes[my_index].feature = best_feature;
    nodes[my_index].threshold = best_threshold;
    int l = build(std::move(left), depth + 1);
    int r = build(std::move(right), depth + 1);
    nodes[my_index].left = l;
    nodes[my_index].right = r;
    return my_index;
  }
};

}  // namespace

DecisionTree DecisionTree::fit(const std::vector<TransitionRecord>& records, int max_depth,
                               int min_leaf) {
  if (records.empty()) throw std::invalid_argument("decision tree: empty training set");
  if (max_depth < 1 || min_leaf < 1)
    throw std::invalid_argument("decision tree: bad max_depth/min_leaf");
  Builder builder{records, max_depth, min_leaf, {}};
  std::vector<int> all(records.size());
  std::iota(all.begin(), all.end(), 0);
  builder.build(std::move(all), 0);

  DecisionTree tree;
  tree.nodes_ = std::move(builder.nodes);
  std::array<bool, kNumCategories> present{};
  for (const auto& r : records) present[static_cast<int>(r.category)] = true;
  int distinct = 0;
  for (bool b : present) distinct += b ? 1 : 0;
  tree.degenerate_ = distinct < 2;
  return tree;
}

TransitionCategory DecisionTree::predict(
    const std::array<double, kNumAttributes>& features) const {
  int idx = 0;
  while (!nodes_[idx].leaf)
    idx = features[nodes_[idx].feature] <= nodes_[idx].threshold ? nodes_[idx].left
                                                                 : nodes_[idx].right;
  return nodes_[idx].label;
}

double DecisionTree::training_accuracy(const std::vector<TransitionRecord>& records) const {
  if (records.empty()) return 0.0;
  int hits = 0;
  for (const auto& r : records)
    if (predict(r.delta) == r.category) ++hits;
  return static_cast<double>(hits) / records.size();
}

int DecisionTree::depth() const {
  // Iterative depth over the index-linked nodes.
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int deepest = 0;
  while (!stack.empty()) {
    auto [idx, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[idx].leaf) {
      stack.push_back({nodes_[idx].left, d + 1});
      stack.push_back({nodes_[idx].right, d + 1});
    }
  }
  return deepest;
}

std::vector<std::pair<int, std::string>> DecisionTree::paths_for(TransitionCategory c,
                                                                 DeltaMode mode) const {
  std::vector<std::pair<int, std::string>> out;
  struct Frame {
    int idx;
    std::string path;
  };
  std::vector<Frame> stack{{0, ""}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const TreeNode& n = nodes_[f.idx];
    if (n.leaf) {
      if (n.label == c) out.emplace_back(f.idx, f.path.empty() ? "always" : f.path);
      continue;
    }
    std::ostringstream le, ri;
    le << feature_label(n.feature, mode) << " <= " << n.threshold;
    ri << feature_label(n.feature, mode) << " > " << n.threshold;
    std::string joiner = f.path.empty() ? "" : " and ";
    stack.push_back({n.right, f.path + joiner + ri.str()});
    stack.push_back({n.left, f.path + joiner + le.str()});
  }
  return out;
}

json DecisionTree::to_json() const {
  json out = json::array();
  for (const auto& n : nodes_) {
    json jn{{"leaf", n.leaf},
            {"count", n.count},
            {"purity", n.purity},
            {"label", to_string(n.label)},
            {"class_counts", n.class_counts}};
    if (!n.leaf) {
      jn["feature"] = n.feature;
      jn["feature_name"] = attribute_name(n.feature);
      jn["threshold"] = n.threshold;
      jn["left"] = n.left;
      jn["right"] = n.right;
    }
    out.push_back(jn);
  }
  return json{{"nodes", out}, {"degenerate_single_class", degenerate_}};
}

std::string DecisionTree::to_text(DeltaMode mode) const {
  std::ostringstream os;
  struct Frame {
    int idx;
    int indent;
    std::string guard;
  };
  std::vector<Frame> stack{{0, 0, ""}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const TreeNode& n = nodes_[f.idx];
    std::string pad(2 * f.indent, ' ');
    if (!f.guard.empty()) os << pad << f.guard << ":\n";
    std::string body_pad(2 * (f.indent + (f.guard.empty() ? 0 : 1)), ' ');
    if (n.leaf) {
      os << body_pad << "-> " << to_string(n.label) << " (purity " << std::fixed
         << std::setprecision(2) << n.purity << ", n=" << n.count << ")\n";
      os.unsetf(std::ios::fixed);
      continue;
    }
    std::ostringstream le, ri;
    le << "if " << feature_label(n.feature, mode) << " <= " << n.threshold;
    ri << "else (" << feature_label(n.feature, mode) << " > " << n.threshold << ")";
    int child_indent = f.indent + (f.guard.empty() ? 0 : 1);
    stack.push_back({n.right, child_indent, ri.str()});
    stack.push_back({n.left, child_indent, le.str()});
  }
  return os.str();
}

// ---- summaries ----------------------------------------------------------------

ExplanationReport summarize(const std::vector<TransitionRecord>& records,
                            const DecisionTree& tree, DeltaMode mode,
                            double synthesis_seconds) {
  ExplanationReport report;
  report.mode = mode;
  report.record_count = static_cast<int>(records.size());
  report.tree = tree;
  report.synthesis_seconds = synthesis_seconds;
  if (records.empty()) return report;

  std::array<int, kNumCategories> counts{};
  std::array<std::array<double, kNumAttributes>, kNumCategories> mean_delta{};
  for (const auto& r : records) {
    int c = static_cast<int>(r.category);
    ++counts[c];
    for (int p = 0; p < kNumAttributes; ++p) mean_delta[c][p] += r.delta[p];
  }
  int majority = 0;
  for (int c = 0; c < kNumCategories; ++c) {
    report.fractions[c] = static_cast<double>(counts[c]) / records.size();
    majority = std::max(majority, counts[c]);
    if (counts[c] > 0)
      for (int p = 0; p < kNumAttributes; ++p) mean_delta[c][p] /= counts[c];
  }
  report.majority_baseline = static_cast<double>(majority) / records.size();
  report.training_accuracy = tree.training_accuracy(records);

  for (int c = 0; c < kNumCategories; ++c) {
    if (counts[c] == 0) continue;
    TransitionCategory cat = static_cast<TransitionCategory>(c);
    CategorySummary s;
    s.category = cat;
    s.count = counts[c];
    s.fraction = report.fractions[c];

    auto paths = tree.paths_for(cat, mode);
    if (paths.empty()) {
      s.conditions = "no leaf rule isolates this category";
    } else {
      // Best-supported leaf: most records of this category.
      int best = 0;
      for (size_t i = 1; i < paths.size(); ++i) {
        int cur = tree.nodes()[paths[i].first].class_counts[c];
        int top = tree.nodes()[paths[best].first].class_counts[c];
        if (cur > top) best = static_cast<int>(i);
      }
      s.conditions = paths[best].second;
    }

    for (int p = 0; p < kNumAttributes; ++p) {
      if (s.dominant_attribute < 0 || std::abs(mean_delta[c][p]) > std::abs(s.dominant_mean)) {
        s.dominant_attribute = p;
        s.dominant_mean = mean_delta[c][p];
      }
    }

    std::ostringstream st;
    st << "The agent uses " << to_string(cat) << " transitions when " << s.conditions << "; "
       << "dominant effect: ";
    if (mode == DeltaMode::mean_diff) {
      st << (s.dominant_mean >= 0.0 ? "raises " : "lowers ")
         << attribute_name(s.dominant_attribute) << " by " << std::abs(s.dominant_mean)
         << " on average";
    } else {
      st << "largest distribution shift in " << attribute_name(s.dominant_attribute) << " (jsd "
         << s.dominant_mean << ")";
    }
    st << ".";
    s.statement = st.str();
    report.summaries.push_back(std::move(s));
  }
  return report;
}

json ExplanationReport::to_json() const {
  json fractions_by_name;
  for (int c = 0; c < kNumCategories; ++c)
    fractions_by_name[to_string(static_cast<TransitionCategory>(c))] = fractions[c];
  json summaries_json = json::array();
  for (const auto& s : summaries) {
    summaries_json.push_back(json{{"category", to_string(s.category)},
                                  {"count", s.count},
                                  {"fraction", s.fraction},
                                  {"conditions", s.conditions},
                                  {"dominant_attribute", s.dominant_attribute >= 0
                                                             ? attribute_name(s.dominant_attribute)
                                                             : "none"},
                                  {"dominant_mean", s.dominant_mean},
                                  {"statement", s.statement}});
  }
  return json{{"mode", to_string(mode)},
              {"record_count", record_count},
              {"fractions", fractions_by_name},
              {"training_accuracy", training_accuracy},
              {"majority_baseline", majority_baseline},
              {"tree", tree.to_json()},
              {"summaries", summaries_json},
              {"synthesis_seconds", synthesis_seconds}};
}

std::string ExplanationReport::to_text() const {
  std::ostringstream os;
  os << "Explanation report (" << to_string(mode) << ", " << record_count << " transitions, "
     << "synthesized in " << synthesis_seconds << " s)\n";
  os << "Category fractions:\n";
  for (int c = 0; c < kNumCategories; ++c)
    os << "  " << to_string(static_cast<TransitionCategory>(c)) << ": " << fractions[c] << "\n";
  os << "Distilled tree (training accuracy " << training_accuracy << ", majority baseline "
     << majority_baseline << (tree.degenerate_single_class() ? ", degenerate single class" : "")
     << "):\n";
  os << tree.to_text(mode);
  os << "Summaries:\n";
  for (const auto& s : summaries) os << "  - " << s.statement << "\n";
  return os.str();
}

}  // namespace agex
