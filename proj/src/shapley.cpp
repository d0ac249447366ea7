#include "agex/shapley.hpp"

#include <bit>
#include <stdexcept>

namespace agex {

namespace {

// Exact binomial coefficient as double (n <= 20 keeps this exact).
double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::vector<double> tabulate(const SetFunction& f, int n) {
  std::vector<double> table(size_t{1} << n);
  for (uint32_t mask = 0; mask < table.size(); ++mask) table[mask] = f(mask);
  return table;
}

}  // namespace

const char* to_string(ShapleyVariant v) {
  switch (v) {
    case ShapleyVariant::standard: return "standard";
    case ShapleyVariant::grand_diff: return "grand-diff";
  }
  throw std::invalid_argument("unknown shapley variant");
}

std::vector<double> shapley_values(const SetFunction& f, int n, ShapleyVariant variant) {
  if (n < 1) throw std::invalid_argument("shapley: need at least one feature");
  if (n > kMaxShapleyFeatures)
    throw std::invalid_argument("shapley: refusing full enumeration beyond " +
                                std::to_string(kMaxShapleyFeatures) + " features");
  const std::vector<double> table = tabulate(f, n);
  const uint32_t full = (1u << n) - 1;
  std::vector<double> scores(n, 0.0);

  if (variant == ShapleyVariant::standard) {
    for (int i = 0; i < n; ++i) {
      const uint32_t bit = 1u << i;
      for (uint32_t s = 0; s <= full; ++s) {
        if (s & bit) continue;
        int size = std::popcount(s);
        double weight = 1.0 / (n * binomial(n - 1, size));
        scores[i] += weight * (table[s | bit] - table[s]);
      }
    }
    return scores;
  }

  // grand_diff: (1/(n-1)!) * sum over sizes k=1..n-1 of
  //             C(n-1,k)^-1 * sum over S subset of (full \ {i}), |S| = k,
  //             of f(full) - f(S).
  const double front = 1.0 / factorial(n - 1);
  const double f_full = table[full];
  for (int i = 0; i < n; ++i) {
    const uint32_t bit = 1u << i;
    double acc = 0.0;
    for (uint32_t s = 0; s <= full; ++s) {
      if (s & bit) continue;
      int size = std::popcount(s);
      if (size < 1 || size > n - 1) continue;
      acc += (f_full - table[s]) / binomial(n - 1, size);
    }
    scores[i] = front * acc;
  }
  return scores;
}

double efficiency_residual(const SetFunction& f, int n, const std::vector<double>& scores) {
  const uint32_t full = (1u << n) - 1;
  double sum = 0.0;
  for (double v : scores) sum += v;
  return sum - (f(full) - f(0));
}

}  // namespace agex
