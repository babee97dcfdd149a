#include "diffrank/diteration.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "diffrank/errors.hpp"
#include "text_util.hpp"

namespace diffrank {

void DiState::refresh_fluid_l1() { fluid_l1 = l1_norm(fluid); }

DiState di_init(const Graph& g, const SolverConfig& cfg) {
  cfg.validate(g.size());
  DiState s;
  s.damping = cfg.damping;
  s.zap = cfg.zap;
  s.fluid.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) s.fluid[i] = (1.0 - cfg.damping) * cfg.zap[i];
  s.history.assign(g.size(), 0.0);
  s.refresh_fluid_l1();
  return s;
}

void di_step(DiState& state, const Graph& g, NodeId i) {
  if (i >= state.size() || i >= g.size()) {
    throw DomainError("cannot diffuse node " + std::to_string(i) + " of a " +
                      std::to_string(state.size()) + "-node state");
  }
  const double f = state.fluid[i];
  state.history[i] += f;
  state.fluid[i] = 0.0;
  double l1 = state.fluid_l1 - std::abs(f);

  const auto col = g.column(i);
  if (col.empty()) {
    state.leak += f;
  } else {
    const double pushed = state.damping * f;
    for (const auto& t : col) {
      double& dst = state.fluid[t.target];
      const double before = std::abs(dst);
      dst += pushed * t.prob;
      l1 += std::abs(dst) - before;
    }
  }
  state.fluid_l1 = std::max(l1, 0.0);
  ++state.steps;
}

std::optional<Selection> schedule_next(Scheduler& sched, const DiState& state) {
  return sched.next(DiFluidView(state));
}

std::optional<Selection> di_advance(DiState& state, const Graph& g, Scheduler& sched) {
  const DiFluidView view(state);
  auto sel = sched.next(view);
  if (!sel) return sel;
  di_step(state, g, sel->node);
  if (sched.kind() == SchedulerKind::greedy) {
    sched.touched(sel->node, view);
    for (const auto& t : g.column(sel->node)) sched.touched(t.target, view);
  }
  return sel;
}

namespace {

double leak_denominator(const DiState& state) {
  const double d = state.damping;
  const double denom = 1.0 - d - d * state.leak;
  if (!(denom > 1e-15)) {
    throw InvariantError("dangling leak " + std::to_string(state.leak) +
                         " leaves no positive normalization denominator");
  }
  return denom;
}

}  // namespace

bool has_normalization(const DiState& state) {
  return 1.0 - state.damping - state.damping * state.leak > 1e-15;
}

double residual_bound(const DiState& state) {
  return state.fluid_l1 / leak_denominator(state);
}

double normalization_factor(const DiState& state) {
  return (1.0 - state.damping) / leak_denominator(state);
}

RankVector normalized_history(const DiState& state) {
  const double factor = normalization_factor(state);
  RankVector out(state.history);
  for (double& x : out) x *= factor;
  return out;
}

DiRunResult di_run(const Graph& g, const SolverConfig& cfg, Scheduler& sched) {
  DiRunOptions options;
  options.epsilon = cfg.epsilon;
  options.max_rounds = cfg.max_rounds;
  return di_resume(di_init(g, cfg), g, sched, options);
}

DiRunResult di_resume(DiState state, const Graph& g, Scheduler& sched,
                      const DiRunOptions& options) {
  const std::size_t n = g.size();
  if (state.size() != n) {
    throw ConfigError("state has " + std::to_string(state.size()) +
                      " nodes, graph has " + std::to_string(n));
  }
  if (!(options.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!options.reference.empty() && options.reference.size() != n) {
    throw ConfigError("reference vector length does not match the graph");
  }

  DiRunResult result;
  sched.invalidate();

  auto emit_row = [&](std::size_t round) {
    TraceRow row;
    row.algo = options.label;
    row.round = round;
    row.diffusions = result.diffusions;
    row.scans = result.scans;
    if (!has_normalization(state)) {
      result.trace.rows.push_back(std::move(row));
      return;
    }
    row.bound = residual_bound(state);
    if (!options.reference.empty()) {
      row.l1_error = l1_distance(normalized_history(state), options.reference);
    }
    result.trace.rows.push_back(std::move(row));
  };
  // The maintained L1 can carry rounding drift; confirm with a fresh sum.
  auto reached_tolerance = [&] {
    if (!has_normalization(state)) return false;
    if (residual_bound(state) > options.epsilon) return false;
    state.refresh_fluid_l1();
    return residual_bound(state) <= options.epsilon;
  };
  auto step = [&]() -> bool {
    auto sel = di_advance(state, g, sched);
    if (!sel) {
      state.refresh_fluid_l1();
      if (state.fluid_l1 > 0.0) {
        sched.invalidate();
        sel = di_advance(state, g, sched);
      }
      if (!sel) return false;
    }
    ++result.diffusions;
    result.scans += sel->scans;
    if (result.diffusions % n == 0) {
      state.refresh_fluid_l1();
      emit_row(result.diffusions / n);
    }
    return true;
  };

  const std::uint64_t budget = static_cast<std::uint64_t>(options.max_rounds) * n;
  result.converged = n == 0 || reached_tolerance();
  while (!result.converged && result.diffusions < budget) {
    if (!step()) {
      result.converged = reached_tolerance();
      if (!result.converged) throw InvariantError("scheduler found no fluid above tolerance");
      break;
    }
    if (reached_tolerance()) result.converged = true;
  }

  if (options.whole_rounds && n > 0) {
    while (result.diffusions % n != 0) {
      if (!step()) {
        // No fluid anywhere: the remaining steps of the round are no-ops.
        di_step(state, g, static_cast<NodeId>(result.diffusions % n));
        ++result.diffusions;
        if (result.diffusions % n == 0) {
          state.refresh_fluid_l1();
          emit_row(result.diffusions / n);
        }
      }
    }
  }
  if (n > 0 && result.diffusions % n != 0) {
    state.refresh_fluid_l1();
    emit_row(result.diffusions / n + 1);
  }

  result.state = std::move(state);
  return result;
}

DiState di_update(const DiState& state, const Graph& g_old, const Graph& g_new,
                  std::span<const NodeId> changed_columns,
                  std::optional<RankVector> new_zap) {
  const std::size_t n_old = g_old.size();
  const std::size_t n_new = g_new.size();
  if (state.size() != n_old) {
    throw UpdateError("state has " + std::to_string(state.size()) +
                      " nodes but the old graph has " + std::to_string(n_old));
  }
  if (n_new < n_old) throw UpdateError("the new graph has fewer nodes than the old one");

  std::vector<bool> changed(n_new, false);
  for (NodeId j : changed_columns) {
    if (j >= n_new) {
      throw UpdateError("changed column " + std::to_string(j) + " is out of range");
    }
    changed[j] = true;
  }
  for (NodeId j = 0; j < n_new; ++j) {
    if (changed[j]) continue;
    const bool same = j < n_old ? std::ranges::equal(g_old.column(j), g_new.column(j))
                                : g_new.dangling(j);
    if (!same) {
      throw UpdateError("column " + std::to_string(j) +
                        " differs between the graphs but is not listed as changed");
    }
  }

  RankVector zap;
  if (new_zap) {
    zap = std::move(*new_zap);
  } else if (n_new == n_old) {
    zap = state.zap;
  } else {
    SolverConfig probe;
    probe.zap = state.zap;
    if (probe.zap_is_uniform()) {
      zap.assign(n_new, 1.0 / static_cast<double>(n_new));
    } else {
      zap = state.zap;
      zap.resize(n_new, 0.0);
    }
  }
  SolverConfig check;
  check.damping = state.damping;
  check.zap = zap;
  check.validate(n_new);

  const bool zap_changed = zap.size() != state.zap.size() || zap != state.zap;
  if (changed_columns.empty() && !zap_changed) return state;

  DiState out = state;
  out.fluid.resize(n_new, 0.0);
  out.history.resize(n_new, 0.0);
  const double d = state.damping;

  for (NodeId j : changed_columns) {
    if (j >= n_old) continue;  // new nodes have no history
    const double h = out.history[j];
    if (h == 0.0) continue;
    for (const auto& t : g_old.column(j)) out.fluid[t.target] -= d * h * t.prob;
    for (const auto& t : g_new.column(j)) out.fluid[t.target] += d * h * t.prob;
  }
  if (zap_changed) {
    for (std::size_t i = 0; i < n_new; ++i) {
      const double before = i < state.zap.size() ? state.zap[i] : 0.0;
      out.fluid[i] += (1.0 - d) * (zap[i] - before);
    }
  }
  out.zap = std::move(zap);

  out.leak = 0.0;
  for (NodeId j = 0; j < n_new; ++j) {
    if (g_new.dangling(j)) out.leak += out.history[j];
  }
  out.refresh_fluid_l1();
  return out;
}

namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double read_real(std::string_view token, std::size_t line, const char* what) {
  double v = 0.0;
  if (!detail::parse_real(token, v) || !std::isfinite(v)) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(token) + "'");
  }
  return v;
}

}  // namespace

void save_state(const DiState& state, std::ostream& out) {
  out << "DI-STATE v1\n";
  out << state.size() << ' ' << format_real(state.damping) << ' ' << state.steps << ' '
      << format_real(state.leak) << ' '
      << (has_normalization(state) ? format_real(normalization_factor(state)) : "inf")
      << '\n';
  for (std::size_t i = 0; i < state.size(); ++i) {
    out << format_real(state.history[i]) << ' ' << format_real(state.fluid[i]) << '\n';
  }
}

DiState load_state(std::istream& in, std::optional<RankVector> zap) {
  std::string line;
  std::size_t number = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++number;
      if (!detail::split_ws(line).empty()) return true;
    }
    return false;
  };

  if (!next_line() || detail::split_ws(line) != std::vector<std::string_view>{"DI-STATE", "v1"}) {
    throw ParseError(number, "expected header 'DI-STATE v1'");
  }
  if (!next_line()) throw ParseError(number, "missing state summary line");
  auto head = detail::split_ws(line);
  if (head.size() != 5) throw ParseError(number, "expected 'n d k l norm_factor'");

  std::size_t n = 0;
  std::uint64_t k = 0;
  if (!detail::parse_integer(head[0], n)) throw ParseError(number, "invalid node count");
  if (!detail::parse_integer(head[2], k)) throw ParseError(number, "invalid step count");

  DiState s;
  s.damping = read_real(head[1], number, "damping");
  s.steps = k;
  s.leak = read_real(head[3], number, "leak");
  const bool factor_undefined = head[4] == "inf";
  const double stored_factor =
      factor_undefined ? 0.0 : read_real(head[4], number, "normalization factor");
  if (!(s.damping > 0.0 && s.damping < 1.0)) throw ParseError(number, "damping outside (0, 1)");
  const std::size_t summary_line = number;

  s.history.resize(n);
  s.fluid.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!next_line()) {
      throw ParseError(number + 1, "expected " + std::to_string(n) + " node lines, got " +
                                       std::to_string(i));
    }
    auto tok = detail::split_ws(line);
    if (tok.size() != 2) throw ParseError(number, "expected 'H F'");
    s.history[i] = read_real(tok[0], number, "history value");
    s.fluid[i] = read_real(tok[1], number, "fluid value");
  }
  if (next_line()) throw ParseError(number, "unexpected content after the node lines");

  if (factor_undefined != !has_normalization(s)) {
    throw ParseError(summary_line, "normalization factor does not match d and l");
  }
  if (!factor_undefined) {
    const double factor = normalization_factor(s);
    if (std::abs(factor - stored_factor) > 1e-12 * std::abs(factor)) {
      throw ParseError(summary_line, "normalization factor does not match d and l");
    }
  }

  if (zap) {
    s.zap = std::move(*zap);
  } else {
    s.zap.assign(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
  }
  SolverConfig check;
  check.damping = s.damping;
  check.zap = s.zap;
  check.validate(n);
  s.refresh_fluid_l1();
  return s;
}

}  // namespace diffrank
