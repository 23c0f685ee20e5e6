#include "abm/asymptotics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "abm/numerics.hpp"
#include "abm/parallel.hpp"

namespace abm {

namespace {

constexpr double kPi = 3.141592653589793238463;
constexpr double kLog2 = 0.69314718055994530942;

void check_gamma(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("asymptotics: gamma must be positive");
}

}  // namespace

double gamma_second_derivative_at_two() {
  const double t = 1.0 - kEulerMascheroni;  // digamma(2)
  return t * t + kPi * kPi / 6.0 - 1.0;     // + trigamma(2) = pi^2/6 - 1
}

Mat2x3 m_matrix(double gamma) {
  check_gamma(gamma);
  const double tau = kEulerMascheroni;
  const double scale = 6.0 / (kPi * kPi);
  const double g2pp = gamma_second_derivative_at_two();
  return {{{scale / (gamma * gamma), scale * (1.0 - tau) / gamma, -scale / (gamma * gamma)},
           {scale * (tau - 1.0), -scale * gamma * (g2pp + 1.0), scale * (1.0 - tau)}}};
}

Mat3x3 sigma_matrix(double gamma) {
  check_gamma(gamma);
  const double tau = kEulerMascheroni;
  const double g2 = gamma * gamma;
  const double tl = tau + kLog2;
  const double p = 0.5 * (tau + 3.0 * kLog2 - 1.0) -
                   (kPi * kPi - 6.0 * tl + 6.0 * tl * tl) / 12.0 -
                   (1.0 - tau - kLog2) + (2.0 - tau) * (1.0 - tau);
  const double s11 = g2 * p;
  const double s21 = -0.5 * gamma * (1.0 - tau + kLog2);
  const double s31 = g2 * ((3.0 - tau - 0.5 * kLog2) * kLog2 - kPi * kPi / 12.0);
  const double s32 = -gamma * kLog2;
  const double s33 = 2.0 * g2 * kLog2;
  return {{{s11, s21, s31}, {s21, 0.5, s32}, {s31, s32, s33}}};
}

Mat2x2 limit_covariance(double gamma) {
  const Mat2x3 m = m_matrix(gamma);
  const Mat3x3 s = sigma_matrix(gamma);
  Mat2x2 out{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double acc = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) acc += m[i][a] * s[a][b] * m[j][b];
      out[i][j] = acc;
    }
  }
  return out;
}

double abm_variance_constant(double gamma) {
  return gamma * gamma * limit_covariance(gamma)[0][0];
}

AsymptoticMatrices asymptotic_matrices(double gamma) {
  AsymptoticMatrices out;
  out.gamma = gamma;
  out.m = m_matrix(gamma);
  out.sigma = sigma_matrix(gamma);
  out.limit_cov = limit_covariance(gamma);
  out.variance_constant_a = abm_variance_constant(gamma);
  return out;
}

McCovarianceCheck covariance_mc_check(double gamma, std::int64_t reps,
                                      const RngStream& stream, int threads) {
  check_gamma(gamma);
  if (reps < 2) throw std::invalid_argument("covariance_mc_check: reps must be >= 2");

  // Six distinct entries (i >= j), symmetrized per draw for i != j.
  constexpr int kEntries = 6;
  constexpr std::int64_t kChunk = 65536;
  const std::int64_t n_chunks = (reps + kChunk - 1) / kChunk;

  struct ChunkSums {
    std::array<double, kEntries> s{};
    std::array<double, kEntries> s2{};
  };
  std::vector<ChunkSums> chunks(static_cast<std::size_t>(n_chunks));

  parallel_for(static_cast<std::size_t>(n_chunks), threads, [&](std::size_t ci) {
    RngStream rng = stream.substream(static_cast<std::uint64_t>(ci));
    const std::int64_t begin = static_cast<std::int64_t>(ci) * kChunk;
    const std::int64_t end = std::min(begin + kChunk, reps);
    ChunkSums acc;
    for (std::int64_t r = begin; r < end; ++r) {
      const double u = rng.exponential();
      const double s = rng.exponential();
      const double mn = std::min(u, s);
      const double g1u = gamma * (1.0 + std::log(u));
      const double g1s = gamma * (1.0 + std::log(s));
      const double g3u = gamma / u;
      const double g3s = gamma / s;
      // order: (1,1), (2,1), (2,2), (3,1), (3,2), (3,3); g2 = -1
      const std::array<double, kEntries> vals = {
          g1u * g1s * mn,
          0.5 * (-g1s - g1u) * mn,
          mn,
          0.5 * (g3u * g1s + g1u * g3s) * mn,
          0.5 * (-g3u - g3s) * mn,
          g3u * g3s * mn,
      };
      for (int e = 0; e < kEntries; ++e) {
        acc.s[e] += vals[e];
        acc.s2[e] += vals[e] * vals[e];
      }
    }
    chunks[ci] = acc;
  });

  // Deterministic reduction in chunk order.
  std::array<KahanSum, kEntries> total_s{}, total_s2{};
  for (const ChunkSums& c : chunks) {
    for (int e = 0; e < kEntries; ++e) {
      total_s[e].add(c.s[e]);
      total_s2[e].add(c.s2[e]);
    }
  }

  const double n = static_cast<double>(reps);
  std::array<double, kEntries> mean{}, sem{};
  for (int e = 0; e < kEntries; ++e) {
    mean[e] = total_s[e].value() / n;
    const double var = (total_s2[e].value() - n * mean[e] * mean[e]) / (n - 1.0);
    sem[e] = std::sqrt(std::max(var, 0.0) / n);
  }

  McCovarianceCheck out;
  out.reps = reps;
  const int idx[3][3] = {{0, 1, 3}, {1, 2, 4}, {3, 4, 5}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.estimate[i][j] = mean[idx[i][j]];
      out.standard_error[i][j] = sem[idx[i][j]];
    }
  }
  return out;
}

}  // namespace abm
