#pragma once

#include <stdexcept>
#include <string>

namespace abm {

// The weighted Frechet likelihood has no interior stationary point, e.g. when
// every observation carrying positive weight equals the same value (then the
// score equals gamma for all gamma > 0 and never crosses zero).
class NoUniqueMaximizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bracket expansion exhausted the allowed gamma range without finding a sign
// change of the score. Carries the score at both ends for diagnostics.
class BracketingFailedError : public std::runtime_error {
 public:
  BracketingFailedError(const std::string& msg, double score_low, double score_high)
      : std::runtime_error(msg), score_low_(score_low), score_high_(score_high) {}

  double score_low() const { return score_low_; }
  double score_high() const { return score_high_; }

 private:
  double score_low_;
  double score_high_;
};

// E(l1*eps^2 + l2)^kappa = 1 has no root kappa in (0, nu/2): the squared
// process has no Kesten-type power tail with these coefficients.
class NoKestenIndexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace abm
