#pragma once

#include <cstdint>
#include <vector>

namespace abm {

// Binomial weights attached to the descending order statistics by the
// all-block-maxima likelihood: values[i-1] = C(n-i, m-1) / C(n, m) for
// i = 1..n-m+1. They sum to one and decrease strictly in i.
struct WeightVector {
  std::vector<double> values;
  std::int64_t n = 0;
  std::int64_t m = 0;
};

// Computes the weight vector by the stable linear-space recursion
//   p_1 = m/n,  p_{i+1} = p_i * (n - m - i + 1) / (n - i).
// Once a weight drops below 1e-300 the remaining entries are exactly 0.0
// (no renormalization; the mass lost there is below representable noise).
// Requires 2 <= m <= n.
WeightVector abm_weights(std::int64_t n, std::int64_t m);

// Exponential approximation q_i = (1/k) * exp(-(i-1)/k) with k = n/m taken as
// a real number; `count` entries, count <= n - m + 1.
std::vector<double> exp_weights(std::int64_t n, std::int64_t m, std::size_t count);

// max over 1 <= i <= clamp(floor(k (log k)^d), 1, n-m+1) of |p_i/q_i - 1|,
// the finite-sample distance between the exact weights and their exponential
// approximation on the index range where the approximation is meant to hold.
// Requires n > m (so k > 1 and log k > 0) and d > 0.
double weight_approximation_error(std::int64_t n, std::int64_t m, double d);

}  // namespace abm
