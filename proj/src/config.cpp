#include "diffrank/config.hpp"

#include <cmath>
#include <string>

#include "diffrank/errors.hpp"

namespace diffrank {

SolverConfig SolverConfig::uniform(std::size_t n, double damping, double epsilon,
                                   std::size_t max_rounds) {
  SolverConfig cfg;
  cfg.damping = damping;
  cfg.zap.assign(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
  cfg.epsilon = epsilon;
  cfg.max_rounds = max_rounds;
  return cfg;
}

void SolverConfig::validate(std::size_t n) const {
  if (!(damping > 0.0 && damping < 1.0)) {
    throw ConfigError("damping must lie in (0, 1), got " + std::to_string(damping));
  }
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (max_rounds == 0) throw ConfigError("max_rounds must be positive");
  if (zap.size() != n) {
    throw ConfigError("default distribution has " + std::to_string(zap.size()) +
                      " entries, graph has " + std::to_string(n) + " nodes");
  }
  // Compensated sum: plain accumulation of 1/n over large n drifts past 1e-12.
  double total = 0.0;
  double carry = 0.0;
  for (double z : zap) {
    if (!(z >= 0.0) || !std::isfinite(z)) {
      throw ConfigError("default distribution has a negative or non-finite entry");
    }
    const double t = total + z;
    carry += std::abs(total) >= z ? (total - t) + z : (z - t) + total;
    total = t;
  }
  total += carry;
  if (n > 0 && std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("default distribution sums to " + std::to_string(total) +
                      ", expected 1");
  }
}

bool SolverConfig::zap_is_uniform() const {
  if (zap.empty()) return true;
  for (double z : zap) {
    if (z != zap.front()) return false;
  }
  return true;
}

double l1_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ConfigError("l1_distance on vectors of different length");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

RankVector normalized(std::span<const double> v) {
  RankVector out(v.begin(), v.end());
  const double total = l1_norm(v);
  if (total > 0.0) {
    for (double& x : out) x /= total;
  }
  return out;
}

}  // namespace diffrank
