#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace diffrank {

/// Dense vector indexed by node id.
using RankVector = std::vector<double>;

/// Parameters of x = dPx + (1-d)Z plus the stopping rule.
struct SolverConfig {
  static constexpr double kDefaultDamping = 0.85;
  static constexpr double kDefaultEpsilon = 1e-9;
  static constexpr std::size_t kDefaultMaxRounds = 1000;

  double damping = kDefaultDamping;
  RankVector zap;  // default distribution Z
  double epsilon = kDefaultEpsilon;
  std::size_t max_rounds = kDefaultMaxRounds;

  /// Uniform Z over n nodes.
  static SolverConfig uniform(std::size_t n, double damping = kDefaultDamping,
                              double epsilon = kDefaultEpsilon,
                              std::size_t max_rounds = kDefaultMaxRounds);

  /// Throws ConfigError unless 0 < d < 1, Z is a distribution of length n,
  /// epsilon > 0 and max_rounds > 0.
  void validate(std::size_t n) const;

  bool zap_is_uniform() const;
};

double l1_norm(std::span<const double> v);
double l1_distance(std::span<const double> a, std::span<const double> b);

/// v scaled to unit L1 norm (v itself when the norm is zero).
RankVector normalized(std::span<const double> v);

}  // namespace diffrank
