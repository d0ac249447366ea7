#pragma once

// Exact Shapley attribution over a set function by full subset enumeration.
// Two variants ship:
//   - standard: inverse-binomial-weighted marginal contributions
//     f(S u {i}) - f(S); satisfies efficiency, symmetry, null player.
//   - grand_diff: the literal non-marginal form that averages
//     f(full) - f(S) over proper subsets S of the other features with
//     inverse-binomial weights and a 1/(N-1)! front factor. Kept for
//     comparison; it does not satisfy the Shapley axioms in general.
// Enumeration is 2^n, so n > 20 features is refused.

#include <cstdint>
#include <functional>
#include <vector>

namespace agex {

inline constexpr int kMaxShapleyFeatures = 20;

// f receives a bitmask over the n features (bit i set = feature i present).
using SetFunction = std::function<double(uint32_t)>;

enum class ShapleyVariant { standard, grand_diff };
const char* to_string(ShapleyVariant v);

std::vector<double> shapley_values(const SetFunction& f, int n,
                                   ShapleyVariant variant = ShapleyVariant::standard);

// Efficiency residual of a score vector: sum(scores) - (f(full) - f(empty)).
double efficiency_residual(const SetFunction& f, int n, const std::vector<double>& scores);

}  // namespace agex
