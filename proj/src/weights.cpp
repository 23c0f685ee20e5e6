#include "abm/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace abm {

namespace {

constexpr double kUnderflowFloor = 1e-300;

void check_nm(std::int64_t n, std::int64_t m) {
  if (n < 2) throw std::invalid_argument("weights: n must be >= 2");
  if (m < 2 || m > n) throw std::invalid_argument("weights: m must satisfy 2 <= m <= n");
}

}  // namespace

WeightVector abm_weights(std::int64_t n, std::int64_t m) {
  check_nm(n, m);
  WeightVector out;
  out.n = n;
  out.m = m;
  out.values.assign(static_cast<std::size_t>(n - m + 1), 0.0);
  double p = static_cast<double>(m) / static_cast<double>(n);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (p < kUnderflowFloor) break;  // rest stays exactly 0.0
    out.values[i] = p;
    const auto idx = static_cast<std::int64_t>(i) + 1;  // weight index just stored
    p *= static_cast<double>(n - m - idx + 1) / static_cast<double>(n - idx);
  }
  return out;
}

std::vector<double> exp_weights(std::int64_t n, std::int64_t m, std::size_t count) {
  check_nm(n, m);
  if (count > static_cast<std::size_t>(n - m + 1))
    throw std::invalid_argument("exp_weights: count exceeds n - m + 1");
  const double k = static_cast<double>(n) / static_cast<double>(m);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::exp(-static_cast<double>(i) / k) / k;
  return out;
}

double weight_approximation_error(std::int64_t n, std::int64_t m, double d) {
  check_nm(n, m);
  if (n == m) throw std::invalid_argument("weight_approximation_error: requires n > m");
  if (!(d > 0.0)) throw std::invalid_argument("weight_approximation_error: d must be positive");
  const double k = static_cast<double>(n) / static_cast<double>(m);
  double bound = k * std::pow(std::log(k), d);
  // The comparison range is at least {1} and at most the full weight support.
  auto i_max = static_cast<std::int64_t>(std::floor(bound));
  i_max = std::max<std::int64_t>(i_max, 1);
  i_max = std::min<std::int64_t>(i_max, n - m + 1);

  double p = static_cast<double>(m) / static_cast<double>(n);
  double worst = 0.0;
  for (std::int64_t i = 1; i <= i_max && p >= kUnderflowFloor; ++i) {
    const double q = std::exp(-static_cast<double>(i - 1) / k) / k;
    worst = std::max(worst, std::abs(p / q - 1.0));
    p *= static_cast<double>(n - m - i + 1) / static_cast<double>(n - i);
  }
  return worst;
}

}  // namespace abm
