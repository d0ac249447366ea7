#pragma once

// Independent brute-force oracles used by the test suites. These are written
// as plain direct computations, deliberately sharing no code with the library
// implementations they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

// Naive double loop over the KPI window definition of the reward:
// sum over slices of w_l * (1/M) * sum over rows of window[row][target_kpi(l)][l].
inline double naive_reward(const std::array<double, 90>& window_row_kpi_slice,
                           const std::array<double, 3>& weights,
                           const std::array<int, 3>& target_kpi) {
  double total = 0.0;
  for (int l = 0; l < 3; ++l) {
    double acc = 0.0;
    for (int m = 0; m < 10; ++m) {
      int flat = (m * 3 + target_kpi[l]) * 3 + l;
      acc += window_row_kpi_slice[flat];
    }
    total += weights[l] * (acc / 10.0);
  }
  return total;
}

// Mean-then-weight recomputation of a node's expected reward from raw
// per-occurrence sample vectors: for each slice, pool every sample of the
// target attribute, divide by (rows * occurrences) to get the mean per-row
// slice aggregate, then weight.
inline double mean_then_weight(
    const std::array<std::vector<std::vector<double>>, 9>& samples_per_attribute,
    int occurrence_count, int rows, const std::array<double, 3>& weights,
    const std::array<int, 3>& target_kpi) {
  double total = 0.0;
  for (int l = 0; l < 3; ++l) {
    int p = target_kpi[l] * 3 + l;
    double acc = 0.0;
    for (const auto& occurrence : samples_per_attribute[p])
      for (double v : occurrence) acc += v;
    total += weights[l] * (acc / (static_cast<double>(rows) * occurrence_count));
  }
  return total;
}

// Water-level search by direct scan: find the largest integer level such that
// sum(min(level, demand)) fits in the budget, then hand out the remainder one
// PRB at a time in ascending UE order.
inline std::vector<int> waterfill_search(int prbs, const std::vector<int>& demands) {
  std::vector<int> shares(demands.size(), 0);
  long total_demand = 0;
  for (int d : demands) total_demand += d;
  if (total_demand <= prbs) {
    for (size_t i = 0; i < demands.size(); ++i) shares[i] = demands[i];
    return shares;
  }
  int level = 0;
  for (;; ++level) {
    long used = 0;
    for (int d : demands) used += std::min(level + 1, d);
    if (used > prbs) break;
  }
  long used = 0;
  for (size_t i = 0; i < demands.size(); ++i) {
    shares[i] = std::min(level, demands[i]);
    used += shares[i];
  }
  for (size_t i = 0; i < demands.size() && used < prbs; ++i) {
    if (demands[i] > shares[i]) {
      ++shares[i];
      ++used;
    }
  }
  return shares;
}

// Direct Jensen-Shannon divergence between two sample sets via equal-width
// histograms over the pooled range, natural logarithm.
inline double direct_jsd(const std::vector<double>& a, const std::vector<double>& b, int bins) {
  if (a.empty() || b.empty()) return 0.0;
  double lo = a[0], hi = a[0];
  for (double v : a) { lo = std::min(lo, v); hi = std::max(hi, v); }
  for (double v : b) { lo = std::min(lo, v); hi = std::max(hi, v); }
  if (hi <= lo) return 0.0;
  std::vector<double> pa(bins, 0.0), pb(bins, 0.0);
  auto bucket = [&](double v) {
    int idx = static_cast<int>((v - lo) / (hi - lo) * bins);
    return std::clamp(idx, 0, bins - 1);
  };
  for (double v : a) pa[bucket(v)] += 1.0 / a.size();
  for (double v : b) pb[bucket(v)] += 1.0 / b.size();
  double out = 0.0;
  for (int i = 0; i < bins; ++i) {
    double m = 0.5 * (pa[i] + pb[i]);
    if (pa[i] > 0.0) out += 0.5 * pa[i] * std::log(pa[i] / m);
    if (pb[i] > 0.0) out += 0.5 * pb[i] * std::log(pb[i] / m);
  }
  return out;
}

// Majority-class count over integer labels.
inline int majority_count(const std::vector<int>& labels) {
  std::map<int, int> counts;
  for (int v : labels) ++counts[v];
  int best = 0;
  for (const auto& [label, count] : counts) best = std::max(best, count);
  return best;
}

// Exact standard Shapley values by direct permutation-free subset enumeration,
// with weights computed from exact binomials. f is indexed by bitmask.
inline std::vector<double> shapley_subsets(const std::vector<double>& f, int n) {
  auto binom = [](int nn, int kk) {
    double r = 1.0;
    for (int i = 1; i <= kk; ++i) r = r * (nn - kk + i) / i;
    return r;
  };
  std::vector<double> phi(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (uint32_t s = 0; s < (1u << n); ++s) {
      if (s & (1u << i)) continue;
      int size = __builtin_popcount(s);
      double w = 1.0 / (n * binom(n - 1, size));
      phi[i] += w * (f[s | (1u << i)] - f[s]);
    }
  }
  return phi;
}

}  // namespace oracle
