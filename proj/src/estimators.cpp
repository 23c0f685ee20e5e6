#include "abm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>

#include "abm/errors.hpp"
#include "abm/numerics.hpp"
#include "abm/weights.hpp"

namespace abm {

const char* method_name(Method m) {
  switch (m) {
    case Method::Abm: return "abm";
    case Method::DisjointBm: return "bm";
    case Method::SlidingBm: return "sliding";
    case Method::Hill: return "hill";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "abm") return Method::Abm;
  if (name == "bm") return Method::DisjointBm;
  if (name == "sliding") return Method::SlidingBm;
  if (name == "hill") return Method::Hill;
  return std::nullopt;
}

namespace {

constexpr double kGammaMin = 1e-6;
constexpr double kGammaMax = 1e3;
constexpr double kBracketGrow = 4.0;
constexpr int kMaxIterations = 200;

void validate_fit_input(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) throw std::invalid_argument("fit: empty sample");
  if (values.size() != weights.size())
    throw std::invalid_argument("fit: values and weights differ in length");
  double wsum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      throw std::invalid_argument("fit: weights must be finite and nonnegative");
    wsum += w;
  }
  if (!(wsum > 0.0)) throw std::invalid_argument("fit: weights sum to zero");
  for (double v : values) {
    if (!std::isfinite(v) || v <= 0.0)
      throw std::invalid_argument("fit: values must be finite and positive");
  }
}

// Score evaluation on precomputed logs, factored around the smallest value
// carrying positive weight: with e_i = exp(-(log x_i - log x_min)/g) every
// term lies in (0, 1], the denominator stays >= w(x_min) > 0, and the common
// factor x_min^(-1/g) cancels in the ratio. Underflow of far terms is benign.
double psi_logs(double gamma, std::span<const double> logs,
                std::span<const double> weights, double log_min, double wlog_sum) {
  KahanSum num, den;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const double e = std::exp(-(logs[i] - log_min) / gamma);
    num.add(weights[i] * e * logs[i]);
    den.add(weights[i] * e);
  }
  return gamma + num.value() / den.value() - wlog_sum;
}

struct PreparedSample {
  std::vector<double> logs;
  double log_min = 0.0;
  double wlog_sum = 0.0;  // sum of w_i log x_i
  bool degenerate = false;  // all weighted values identical
};

PreparedSample prepare(std::span<const double> values, std::span<const double> weights) {
  PreparedSample p;
  p.logs.resize(values.size());
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    p.logs[i] = std::log(values[i]);
    if (weights[i] > 0.0) {
      vmin = std::min(vmin, values[i]);
      vmax = std::max(vmax, values[i]);
    }
  }
  p.degenerate = (vmin == vmax);
  p.log_min = std::log(vmin);
  KahanSum wl;
  for (std::size_t i = 0; i < values.size(); ++i) wl.add(weights[i] * p.logs[i]);
  p.wlog_sum = wl.value();
  return p;
}

}  // namespace

double psi(double gamma, std::span<const double> values, std::span<const double> weights) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("psi: gamma must be positive and finite");
  validate_fit_input(values, weights);
  const PreparedSample p = prepare(values, weights);
  if (p.degenerate) return gamma;  // score has no zero; caller detects separately
  return psi_logs(gamma, p.logs, weights, p.log_min, p.wlog_sum);
}

WmlFit fit_frechet_wml(std::span<const double> values, std::span<const double> weights,
                       const FitOptions& options) {
  validate_fit_input(values, weights);
  if (!(options.tol > 0.0)) throw std::invalid_argument("fit: tol must be positive");
  const PreparedSample p = prepare(values, weights);
  if (p.degenerate)
    throw NoUniqueMaximizerError(
        "fit: all observations with positive weight are identical; "
        "the likelihood has no interior maximizer");

  auto score = [&](double g) {
    return psi_logs(g, p.logs, weights, p.log_min, p.wlog_sum);
  };

  double lo = 0.05, hi = 2.0;
  if (options.bracket_hint) {
    lo = options.bracket_hint->first;
    hi = options.bracket_hint->second;
    if (!(lo > 0.0) || !(hi > lo))
      throw std::invalid_argument("fit: bracket hint must satisfy 0 < low < high");
  }
  lo = std::clamp(lo, kGammaMin, kGammaMax);
  hi = std::clamp(hi, kGammaMin, kGammaMax);

  // The score tends to log(x_min) - sum(w log x) < 0 as gamma -> 0 and grows
  // like gamma as gamma -> inf, so expand until psi(lo) < 0 <= psi(hi).
  double flo = score(lo);
  while (flo > 0.0 && lo > kGammaMin) {
    lo = std::max(lo / kBracketGrow, kGammaMin);
    flo = score(lo);
  }
  double fhi = score(hi);
  while (fhi < 0.0 && hi < kGammaMax) {
    hi = std::min(hi * kBracketGrow, kGammaMax);
    fhi = score(hi);
  }
  if (!(flo <= 0.0 && fhi >= 0.0)) {
    throw BracketingFailedError(
        "fit: score has no sign change on [" + std::to_string(lo) + ", " +
            std::to_string(hi) + "]",
        flo, fhi);
  }

  RootResult root = brent_root(score, lo, hi, flo, fhi, options.tol, kMaxIterations);

  WmlFit out;
  out.gamma_hat = root.x;
  out.solver.iterations = root.iterations;
  out.solver.bracket = {lo, hi};
  out.solver.residual = root.fx;

  // sigma_hat = (sum w x^(-1/g))^(-g) = x_min * (sum w e_i)^(-g).
  KahanSum den;
  for (std::size_t i = 0; i < p.logs.size(); ++i) {
    if (weights[i] == 0.0) continue;
    den.add(weights[i] * std::exp(-(p.logs[i] - p.log_min) / out.gamma_hat));
  }
  out.sigma_hat = std::exp(p.log_min) * std::pow(den.value(), -out.gamma_hat);
  return out;
}

namespace {

void validate_series(std::span<const double> raw) {
  if (raw.empty()) throw std::invalid_argument("estimate: empty sample");
  for (double v : raw)
    if (!std::isfinite(v)) throw std::invalid_argument("estimate: sample contains non-finite values");
}

std::vector<double> truncated_descending(std::span<const double> raw, double c) {
  std::vector<double> x(raw.begin(), raw.end());
  for (double& v : x) v = std::max(v, c);
  std::sort(x.begin(), x.end(), std::greater<>());
  return x;
}

}  // namespace

EstimateResult abm_estimate(std::span<const double> raw, std::int64_t m, double c, double tol) {
  validate_series(raw);
  const auto n = static_cast<std::int64_t>(raw.size());
  if (m < 2 || m > n) throw std::invalid_argument("abm: m must satisfy 2 <= m <= n");
  if (!(c > 0.0)) throw std::invalid_argument("abm: truncation constant c must be positive");

  std::vector<double> x = truncated_descending(raw, c);
  x.resize(static_cast<std::size_t>(n - m + 1));
  const WeightVector w = abm_weights(n, m);
  const WmlFit fit = fit_frechet_wml(x, w.values, {.tol = tol, .bracket_hint = {}});

  EstimateResult out;
  out.method = Method::Abm;
  out.gamma_hat = fit.gamma_hat;
  out.sigma_hat = fit.sigma_hat;
  out.block_size = m;
  out.k_effective = static_cast<double>(n) / static_cast<double>(m);
  out.solver = fit.solver;
  return out;
}

EstimateResult disjoint_bm_estimate(std::span<const double> raw, std::int64_t m, double c,
                                    double tol) {
  validate_series(raw);
  const auto n = static_cast<std::int64_t>(raw.size());
  if (m < 1) throw std::invalid_argument("bm: m must be >= 1");
  if (n < 2 * m) throw std::invalid_argument("bm: need n >= 2m for at least two blocks");
  if (!(c > 0.0)) throw std::invalid_argument("bm: truncation constant c must be positive");

  const std::int64_t blocks = n / m;
  std::vector<double> maxima(static_cast<std::size_t>(blocks));
  for (std::int64_t b = 0; b < blocks; ++b) {
    double mx = raw[static_cast<std::size_t>(b * m)];
    for (std::int64_t j = 1; j < m; ++j)
      mx = std::max(mx, raw[static_cast<std::size_t>(b * m + j)]);
    maxima[static_cast<std::size_t>(b)] = std::max(mx, c);
  }
  const std::vector<double> w(maxima.size(), 1.0 / static_cast<double>(blocks));
  const WmlFit fit = fit_frechet_wml(maxima, w, {.tol = tol, .bracket_hint = {}});

  EstimateResult out;
  out.method = Method::DisjointBm;
  out.gamma_hat = fit.gamma_hat;
  out.sigma_hat = fit.sigma_hat;
  out.block_size = m;
  out.k_effective = static_cast<double>(blocks);
  out.solver = fit.solver;
  return out;
}

EstimateResult sliding_bm_estimate(std::span<const double> raw, std::int64_t m, double c,
                                   double tol) {
  validate_series(raw);
  const auto n = static_cast<std::int64_t>(raw.size());
  if (m < 1) throw std::invalid_argument("sliding: m must be >= 1");
  if (n <= m) throw std::invalid_argument("sliding: need n > m");
  if (!(c > 0.0)) throw std::invalid_argument("sliding: truncation constant c must be positive");

  // Monotone deque of candidate indices; front is the running window maximum.
  std::vector<double> maxima;
  maxima.reserve(static_cast<std::size_t>(n - m + 1));
  std::deque<std::int64_t> q;
  for (std::int64_t t = 0; t < n; ++t) {
    while (!q.empty() && raw[static_cast<std::size_t>(q.back())] <= raw[static_cast<std::size_t>(t)])
      q.pop_back();
    q.push_back(t);
    if (q.front() <= t - m) q.pop_front();
    if (t >= m - 1) maxima.push_back(std::max(raw[static_cast<std::size_t>(q.front())], c));
  }
  const std::vector<double> w(maxima.size(), 1.0 / static_cast<double>(maxima.size()));
  const WmlFit fit = fit_frechet_wml(maxima, w, {.tol = tol, .bracket_hint = {}});

  EstimateResult out;
  out.method = Method::SlidingBm;
  out.gamma_hat = fit.gamma_hat;
  out.sigma_hat = fit.sigma_hat;
  out.block_size = m;
  out.k_effective = static_cast<double>(n) / static_cast<double>(m);
  out.solver = fit.solver;
  return out;
}

EstimateResult hill_estimate(std::span<const double> raw, std::int64_t k) {
  validate_series(raw);
  const auto n = static_cast<std::int64_t>(raw.size());
  if (k < 1 || k > n - 1) throw std::invalid_argument("hill: k must satisfy 1 <= k <= n-1");

  std::vector<double> x(raw.begin(), raw.end());
  std::sort(x.begin(), x.end(), std::greater<>());
  const double pivot = x[static_cast<std::size_t>(k)];  // X_{n-k:n}
  if (!(pivot > 0.0))
    throw std::invalid_argument("hill: X_{n-k:n} must be positive (found " +
                                std::to_string(pivot) + ")");
  KahanSum s;
  for (std::int64_t i = 0; i < k; ++i) s.add(std::log(x[static_cast<std::size_t>(i)]));
  EstimateResult out;
  out.method = Method::Hill;
  out.gamma_hat = s.value() / static_cast<double>(k) - std::log(pivot);
  out.k_effective = static_cast<double>(k);
  return out;
}

std::vector<SweepRow> k_sweep(std::span<const double> raw, Method method,
                              std::span<const std::int64_t> k_grid, double c, double tol) {
  validate_series(raw);
  if (k_grid.empty()) throw std::invalid_argument("k_sweep: empty k grid");
  std::set<std::int64_t> seen;
  for (std::int64_t k : k_grid) {
    if (k < 1) throw std::invalid_argument("k_sweep: k values must be >= 1");
    if (!seen.insert(k).second)
      throw std::invalid_argument("k_sweep: duplicate k value " + std::to_string(k));
  }
  const auto n = static_cast<std::int64_t>(raw.size());

  std::vector<SweepRow> rows;
  rows.reserve(k_grid.size());
  for (std::int64_t k : k_grid) {
    SweepRow row;
    row.k = k;
    try {
      if (method == Method::Hill) {
        row.result = hill_estimate(raw, k);
      } else {
        const std::int64_t m = n / k;
        if (m < 2)
          throw std::invalid_argument("m = floor(n/k) = " + std::to_string(m) +
                                      " < 2; block too short");
        switch (method) {
          case Method::Abm: row.result = abm_estimate(raw, m, c, tol); break;
          case Method::DisjointBm: row.result = disjoint_bm_estimate(raw, m, c, tol); break;
          case Method::SlidingBm: row.result = sliding_bm_estimate(raw, m, c, tol); break;
          case Method::Hill: break;  // handled above
        }
      }
    } catch (const std::exception& e) {
      row.result.reset();
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace abm
