#include "diffrank/classic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "diffrank/errors.hpp"

namespace diffrank {

namespace {

RankVector starting_vector(const SolverConfig& cfg, const PullOptions& options,
                           std::size_t n) {
  if (!options.start) return cfg.zap;
  if (options.start->size() != n) {
    throw ConfigError("starting vector length does not match the graph");
  }
  return *options.start;
}

void check_reference(std::span<const double> reference, std::size_t n) {
  if (!reference.empty() && reference.size() != n) {
    throw ConfigError("reference vector length does not match the graph");
  }
}

double scaled_error(std::span<const double> x, const PullOptions& options) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += std::abs(options.error_scale * x[i] - options.reference[i]);
  }
  return s;
}

void record_round(SolveResult& result, const PullOptions& options,
                  const std::string& fallback_label, std::size_t round, std::size_t n) {
  TraceRow row;
  row.algo = options.label.empty() ? fallback_label : options.label;
  row.round = round;
  row.diffusions = static_cast<std::uint64_t>(round) * n;
  if (!options.reference.empty()) row.l1_error = scaled_error(result.x, options);
  result.trace.rows.push_back(std::move(row));
}

}  // namespace

SolveResult power_iteration(const Graph& g, const SolverConfig& cfg,
                            const PullOptions& options) {
  const std::size_t n = g.size();
  cfg.validate(n);
  check_reference(options.reference, n);
  const double d = cfg.damping;

  SolveResult result;
  result.x = starting_vector(cfg, options, n);
  RankVector next(n);

  for (std::size_t round = 1; round <= cfg.max_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) next[i] = (1.0 - d) * cfg.zap[i];
    double dangling_mass = 0.0;
    for (NodeId j = 0; j < n; ++j) {
      const auto col = g.column(j);
      if (col.empty()) {
        dangling_mass += result.x[j];
        continue;
      }
      const double push = d * result.x[j];
      for (const auto& t : col) next[t.target] += push * t.prob;
    }
    if (options.completed && dangling_mass != 0.0) {
      for (std::size_t i = 0; i < n; ++i) next[i] += d * dangling_mass * cfg.zap[i];
    }
    const double change = l1_distance(next, result.x);
    std::swap(result.x, next);
    result.rounds = round;
    record_round(result, options, "pi", round, n);
    if (change <= cfg.epsilon) {
      result.converged = true;
      break;
    }
  }
  return result;
}

SolveResult gauss_seidel(const Graph& g, const SolverConfig& cfg,
                         const PullOptions& options) {
  const std::size_t n = g.size();
  cfg.validate(n);
  check_reference(options.reference, n);
  const double d = cfg.damping;
  const InEdges& rows = g.in_edges();

  SolveResult result;
  result.x = starting_vector(cfg, options, n);
  RankVector& x = result.x;

  for (std::size_t round = 1; round <= cfg.max_rounds; ++round) {
    // Mass currently held by dangling nodes; updated as the sweep goes, so
    // entries j < i contribute their new value and j >= i their old one.
    double dangling_mass = 0.0;
    if (options.completed) {
      for (NodeId j = 0; j < n; ++j) {
        if (g.dangling(j)) dangling_mass += x[j];
      }
    }
    double change = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      const auto src = rows.sources_of(i);
      const auto prob = rows.probs_of(i);
      double pulled = 0.0;
      for (std::size_t t = 0; t < src.size(); ++t) pulled += prob[t] * x[src[t]];
      if (options.completed) pulled += cfg.zap[i] * dangling_mass;
      const double value = d * pulled + (1.0 - d) * cfg.zap[i];
      change += std::abs(value - x[i]);
      if (options.completed && g.dangling(i)) dangling_mass += value - x[i];
      x[i] = value;
    }
    result.rounds = round;
    record_round(result, options, "gs", round, n);
    if (change <= cfg.epsilon) {
      result.converged = true;
      break;
    }
  }
  return result;
}

double OpicState::total_fluid() const {
  double total = 0.0;
  for (NodeId i = 0; i < size(); ++i) total += effective_fluid(i);
  return total;
}

void OpicState::rebase() {
  for (NodeId i = 0; i < size(); ++i) {
    fluid[i] = effective_fluid(i);
    claimed[i] = 0.0;
  }
  pool = 0.0;
}

OpicState opic_init(std::size_t n) {
  OpicState s;
  s.fluid.assign(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
  s.history.assign(n, 0.0);
  s.claimed.assign(n, 0.0);
  return s;
}

void opic_step(OpicState& state, const Graph& g, double damping, NodeId j) {
  if (j >= state.size()) {
    throw DomainError("cannot diffuse node " + std::to_string(j) + " of a " +
                      std::to_string(state.size()) + "-node OPIC state");
  }
  const double f = state.effective_fluid(j);
  state.history[j] += f;
  state.fluid[j] = 0.0;
  state.claimed[j] = state.pool;

  const auto col = g.column(j);
  if (col.empty()) {
    state.pool += f;
  } else {
    const double pushed = damping * f;
    for (const auto& t : col) state.fluid[t.target] += pushed * t.prob;
    state.pool += (1.0 - damping) * f;
  }
  ++state.steps;
}

SolveResult opic(const Graph& g, const SolverConfig& cfg, Scheduler& sched,
                 const OpicOptions& options) {
  const std::size_t n = g.size();
  cfg.validate(n);
  check_reference(options.reference, n);
  if (!cfg.zap_is_uniform()) {
    throw ConfigError("OPIC emulation requires a uniform default distribution");
  }

  SolveResult result;
  OpicState state = opic_init(n);
  const OpicFluidView view(state);
  sched.invalidate();
  std::uint64_t scans = 0;

  for (std::size_t round = 1; round <= cfg.max_rounds && n > 0; ++round) {
    for (std::size_t s = 0; s < n; ++s) {
      auto sel = sched.next(view);
      const NodeId node = sel ? sel->node : static_cast<NodeId>(s);
      if (sel) scans += sel->scans;
      opic_step(state, g, cfg.damping, node);
      if (sched.kind() == SchedulerKind::greedy) {
        sched.touched(node, view);
        for (const auto& t : g.column(node)) sched.touched(t.target, view);
      }
    }
    // Keeps pool - claimed[i] from losing precision as the pool grows.
    state.rebase();
    sched.invalidate();

    result.rounds = round;
    TraceRow row;
    row.algo = options.label;
    row.round = round;
    row.diffusions = state.steps;
    row.scans = scans;
    if (!options.reference.empty()) {
      row.l1_error = l1_distance(normalized(state.history), options.reference);
    }
    result.trace.rows.push_back(std::move(row));
  }
  result.x = normalized(state.history);
  return result;
}

RankVector dense_reference_solve(const Graph& g, const SolverConfig& cfg, bool completed) {
  const std::size_t n = g.size();
  if (n > kDenseOracleLimit) {
    throw OracleSizeError("dense reference solve refuses n = " + std::to_string(n) +
                          " (limit " + std::to_string(kDenseOracleLimit) +
                          "); it is meant for desk-scale verification");
  }
  cfg.validate(n);
  const double d = cfg.damping;

  // Row-major A = I - dP, right-hand side b = (1-d)Z.
  std::vector<double> a(n * n, 0.0);
  RankVector b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] = 1.0;
    b[i] = (1.0 - d) * cfg.zap[i];
  }
  for (NodeId j = 0; j < n; ++j) {
    const auto col = g.column(j);
    if (col.empty() && completed) {
      for (std::size_t i = 0; i < n; ++i) a[i * n + j] -= d * cfg.zap[i];
    }
    for (const auto& t : col) a[t.target * n + j] -= d * t.prob;
  }

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(a[r * n + k]) > std::abs(a[pivot * n + k])) pivot = r;
    }
    if (a[pivot * n + k] == 0.0) throw InvariantError("singular system in dense solve");
    if (pivot != k) {
      std::swap_ranges(a.begin() + k * n, a.begin() + (k + 1) * n, a.begin() + pivot * n);
      std::swap(b[k], b[pivot]);
    }
    const double diag = a[k * n + k];
    for (std::size_t r = k + 1; r < n; ++r) {
      const double factor = a[r * n + k] / diag;
      if (factor == 0.0) continue;
      a[r * n + k] = 0.0;
      for (std::size_t c = k + 1; c < n; ++c) a[r * n + c] -= factor * a[k * n + c];
      b[r] -= factor * b[k];
    }
  }

  RankVector x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t c = k + 1; c < n; ++c) s -= a[k * n + c] * x[c];
    x[k] = s / a[k * n + k];
  }
  return x;
}

}  // namespace diffrank
