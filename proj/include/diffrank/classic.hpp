#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diffrank/config.hpp"
#include "diffrank/graph.hpp"
#include "diffrank/scheduler.hpp"
#include "diffrank/trace.hpp"

namespace diffrank {

struct SolveResult {
  RankVector x;
  ConvergenceTrace trace;
  bool converged = false;
  std::size_t rounds = 0;
};

/// Options shared by the pull solvers.
struct PullOptions {
  /// Replace dangling columns of P by Z before iterating.
  bool completed = false;
  /// Starting vector; Z when absent.
  std::optional<RankVector> start;
  /// When set, every trace row records |error_scale * x_k - reference|_1.
  std::span<const double> reference{};
  double error_scale = 1.0;
  std::string label;
};

/// x_{k+1} = dPx_k + (1-d)Z from x_0 = Z until |x_{k+1} - x_k|_1 <= epsilon.
SolveResult power_iteration(const Graph& g, const SolverConfig& cfg,
                            const PullOptions& options = {});

/// In-place sweeps in ascending node order, pulling from the in-edge index.
SolveResult gauss_seidel(const Graph& g, const SolverConfig& cfg,
                         const PullOptions& options = {});

/// OPIC run on the damped stochastic matrix
///   P'(i, j) = d P(i, j) + (1-d)/n   for a non-dangling column j,
///   P'(i, j) = 1/n                   for a dangling column j.
/// The uniform part of every column is kept as a scalar pool: a node's
/// effective fluid is fluid[i] + (pool - claimed[i]) / n, which makes a
/// diffusion cost O(out-degree) instead of O(n).
struct OpicState {
  RankVector fluid;
  RankVector history;
  double pool = 0.0;
  RankVector claimed;
  std::uint64_t steps = 0;

  std::size_t size() const noexcept { return fluid.size(); }
  double effective_fluid(NodeId i) const noexcept {
    return fluid[i] + (pool - claimed[i]) / static_cast<double>(size());
  }
  double total_fluid() const;
  /// Folds the pool into the per-node fluid and resets it to zero.
  void rebase();
};

class OpicFluidView {
 public:
  explicit OpicFluidView(const OpicState& s) : s_(&s) {}
  std::size_t size() const noexcept { return s_->size(); }
  double magnitude(NodeId i) const noexcept { return std::abs(s_->effective_fluid(i)); }
  // Differs from the effective fluid by the common pool share.
  double priority(NodeId i) const noexcept {
    return s_->fluid[i] - s_->claimed[i] / static_cast<double>(s_->size());
  }
  // Fluid is conserved, so the argmax threshold stays at 1/n.
  double total() const noexcept { return s_->size() == 0 ? 0.0 : 1.0; }

 private:
  const OpicState* s_;
};

/// Uniform initial fluid of total mass 1, empty history.
OpicState opic_init(std::size_t n);

void opic_step(OpicState& state, const Graph& g, double damping, NodeId j);

struct OpicOptions {
  std::span<const double> reference{};
  std::string label = "opic";
};

/// Runs cfg.max_rounds rounds of n diffusions and returns the history scaled
/// to unit mass. OPIC has no residual certificate, so `converged` is false.
/// Throws ConfigError unless Z is uniform.
SolveResult opic(const Graph& g, const SolverConfig& cfg, Scheduler& sched,
                 const OpicOptions& options = {});

inline constexpr std::size_t kDenseOracleLimit = 5000;

/// Solves (I - dP)x = (1-d)Z by Gaussian elimination with partial pivoting.
/// With `completed`, dangling columns of P are replaced by Z first.
/// Throws OracleSizeError above kDenseOracleLimit nodes.
RankVector dense_reference_solve(const Graph& g, const SolverConfig& cfg, bool completed);

}  // namespace diffrank
