#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "diffrank/config.hpp"
#include "diffrank/graph.hpp"
#include "diffrank/scheduler.hpp"
#include "diffrank/trace.hpp"

namespace diffrank {

/// Fluid/history state of a D-Iteration run.
///
/// Every step keeps H + F = (1-d)Z + dPH. `leak` is the history held by
/// dangling nodes, i.e. the fluid that left the system through them, and
/// drives the normalization (1-d)/(1-d-d*leak) that maps H onto the solution
/// for the matrix completed with Z.
struct DiState {
  double damping = 0.85;
  RankVector zap;
  RankVector fluid;
  RankVector history;
  double leak = 0.0;
  std::uint64_t steps = 0;
  double fluid_l1 = 0.0;  // maintained sum_i |F(i)|

  std::size_t size() const noexcept { return fluid.size(); }

  /// Recomputes fluid_l1 from scratch.
  void refresh_fluid_l1();
};

/// Adapts a DiState to the scheduler's FluidView.
class DiFluidView {
 public:
  explicit DiFluidView(const DiState& s) : s_(&s) {}
  std::size_t size() const noexcept { return s_->fluid.size(); }
  double magnitude(NodeId i) const noexcept { return std::abs(s_->fluid[i]); }
  double priority(NodeId i) const noexcept { return std::abs(s_->fluid[i]); }
  double total() const noexcept { return s_->fluid_l1; }

 private:
  const DiState* s_;
};

/// F = (1-d)Z, H = 0.
DiState di_init(const Graph& g, const SolverConfig& cfg);

/// One elementary diffusion of node i.
void di_step(DiState& state, const Graph& g, NodeId i);

/// Picks the next node for `state`; nullopt signals that no fluid is left.
/// A greedy scheduler pops the node it returns, so callers that diffuse it
/// must report the touched nodes (di_advance does this).
std::optional<Selection> schedule_next(Scheduler& sched, const DiState& state);

/// schedule_next + di_step, notifying the scheduler of every changed node.
std::optional<Selection> di_advance(DiState& state, const Graph& g, Scheduler& sched);

/// False while 1-d-d*leak <= 1e-15. Only reachable transiently after an
/// update, when signed fluid has over-credited dangling nodes.
bool has_normalization(const DiState& state);

/// f_abs / (1-d-d*leak). Throws InvariantError if the denominator is <= 1e-15.
double residual_bound(const DiState& state);

/// (1-d)/(1-d-d*leak), the factor applied by normalized_history().
double normalization_factor(const DiState& state);

/// H scaled onto the completed-matrix solution.
RankVector normalized_history(const DiState& state);

struct DiRunOptions {
  double epsilon = SolverConfig::kDefaultEpsilon;
  std::size_t max_rounds = SolverConfig::kDefaultMaxRounds;
  /// Compared against normalized_history() in every trace row when set.
  std::span<const double> reference{};
  /// Keep diffusing after convergence until the current round is complete,
  /// so that every trace row sits on a round boundary.
  bool whole_rounds = false;
  std::string label = "di";
};

struct DiRunResult {
  DiState state;
  ConvergenceTrace trace;
  bool converged = false;
  std::uint64_t diffusions = 0;  // performed by this run
  std::uint64_t scans = 0;
};

/// Runs from di_init until residual_bound <= cfg.epsilon or
/// cfg.max_rounds * n diffusions.
DiRunResult di_run(const Graph& g, const SolverConfig& cfg, Scheduler& sched);

/// Continues an existing state on `g`. Rows taken while has_normalization()
/// is false carry neither bound nor error.
DiRunResult di_resume(DiState state, const Graph& g, Scheduler& sched,
                      const DiRunOptions& options);

/// Moves a state computed on g_old onto g_new: F += d (P' - P) H over the
/// changed columns, vectors zero-padded when n grows, leak recomputed from
/// the history of g_new's dangling nodes. `new_zap` replaces Z when given;
/// otherwise a uniform Z stays uniform and any other Z is zero-padded. A
/// change of Z injects (1-d)(Z' - Z) into F.
///
/// Throws UpdateError if a column outside `changed_columns` differs.
DiState di_update(const DiState& state, const Graph& g_old, const Graph& g_new,
                  std::span<const NodeId> changed_columns,
                  std::optional<RankVector> new_zap = std::nullopt);

/// "DI-STATE v1" text format; reals round-trip bit-exactly. The factor field
/// reads "inf" when has_normalization() is false.
void save_state(const DiState& state, std::ostream& out);

/// Reads a state written by save_state. Z is not part of the file: `zap`
/// supplies it, uniform when omitted.
DiState load_state(std::istream& in, std::optional<RankVector> zap = std::nullopt);

}  // namespace diffrank
