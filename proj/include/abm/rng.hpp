#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace abm {

// Seeded random stream with all distribution transforms implemented in-repo,
// so that a given stream id yields the identical draw sequence on every
// platform and standard library. std::mt19937_64 itself is fully specified by
// the standard; the std::*_distribution adaptors are not, hence the manual
// inverse-transform / Box-Muller / Marsaglia-Tsang implementations below.
//
// Streams are addressed by a 64-bit id. Construction from (base_seed, stream)
// uses id = base_seed XOR stream; parallel workers must use distinct stream
// indices. substream(j) derives an unrelated id for nested parallelism.
class RngStream {
 public:
  explicit RngStream(std::uint64_t id) : id_(id), eng_(splitmix64(id)) {
    eng_.discard(8);  // flush the low-entropy warmup of a single-word seed
  }

  RngStream(std::uint64_t base_seed, std::uint64_t stream)
      : RngStream(base_seed ^ stream) {}

  std::uint64_t id() const { return id_; }

  RngStream substream(std::uint64_t j) const {
    return RngStream(splitmix64(splitmix64(id_) + 0x9E3779B97F4A7C15ULL) ^ j);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0, 1); safe under log() and x^(-1/g).
  double uniform_open() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard exponential via inversion.
  double exponential() { return -std::log(uniform_open()); }

  // Standard normal, Box-Muller cosine branch (one value per two uniforms;
  // no cached second value, keeping the stream position easy to reason about).
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // Gamma(shape alpha, scale 1), Marsaglia-Tsang squeeze method.
  double gamma_shape(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("gamma_shape: alpha must be positive");
    if (alpha < 1.0) {
      // boost by one and shrink with a uniform power
      return gamma_shape(alpha + 1.0) * std::pow(uniform_open(), 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open();
      if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_square(double nu) { return 2.0 * gamma_shape(0.5 * nu); }

  // Student-t via normal over root-chi-square.
  double student_t(double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("student_t: nu must be positive");
    return normal() / std::sqrt(chi_square(nu) / nu);
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t id_;
  std::mt19937_64 eng_;
};

}  // namespace abm
