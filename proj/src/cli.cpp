#include "diffrank/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "diffrank/bench.hpp"
#include "diffrank/classic.hpp"
#include "diffrank/diteration.hpp"
#include "diffrank/errors.hpp"
#include "diffrank/graph.hpp"
#include "text_util.hpp"

namespace diffrank {

RankVector load_zap(std::istream& in, std::size_t n) {
  RankVector zap(n, 0.0);
  std::vector<bool> listed(n, false);
  detail::for_each_record(in, [&](std::size_t line, const std::vector<std::string_view>& tok) {
    if (tok.size() != 2) throw ParseError(line, "expected 'node_id weight'");
    std::size_t id = 0;
    double w = 0.0;
    if (!detail::parse_integer(tok[0], id)) {
      throw ParseError(line, "invalid node id '" + std::string(tok[0]) + "'");
    }
    if (id >= n) {
      throw ParseError(line, "node " + std::to_string(id) + " is not in the " +
                                 std::to_string(n) + "-node graph");
    }
    if (listed[id]) throw ParseError(line, "node " + std::to_string(id) + " listed twice");
    if (!detail::parse_real(tok[1], w) || !std::isfinite(w) || w < 0.0) {
      throw ParseError(line, "weight must be a non-negative number, got '" +
                                 std::string(tok[1]) + "'");
    }
    listed[id] = true;
    zap[id] = w;
  });
  double total = 0.0;
  for (double z : zap) total += z;
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("zap weights sum to " + std::to_string(total) +
                      ", expected a distribution summing to 1");
  }
  for (double& z : zap) z /= total;
  return zap;
}

namespace {

struct CommonOptions {
  double damping = SolverConfig::kDefaultDamping;
  double epsilon = SolverConfig::kDefaultEpsilon;
  std::size_t max_rounds = SolverConfig::kDefaultMaxRounds;
};

struct SolveArgs {
  CommonOptions common;
  std::string graph, algo, scheduler = "argmax", zap, output, save_state;
  bool normalize = false;
};

struct BenchArgs {
  CommonOptions common;
  std::string graph, algos, trace, synthetic;
};

struct UpdateArgs {
  std::string state, graph, delta, output, save_state, scheduler = "argmax";
  double epsilon = SolverConfig::kDefaultEpsilon;
  std::size_t max_rounds = SolverConfig::kDefaultMaxRounds;
  bool normalize = false;
};

/// Input problem the user can fix; reported with exit status 1.
class InputError : public Error {
 public:
  using Error::Error;
};

std::ifstream open_input(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw InputError(std::string("cannot read ") + what + " file '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path, const char* what) {
  std::ofstream out(path);
  if (!out) throw InputError(std::string("cannot write ") + what + " file '" + path + "'");
  return out;
}

template <class Fn>
auto with_input_name(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
}

Graph read_graph(const std::string& path) {
  auto in = open_input(path, "graph");
  return with_input_name(path, [&] { return load_edge_list(in); });
}

void write_vector(const std::string& path, const RankVector& values) {
  auto out = open_output(path, "output");
  char buf[40];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", values[i]);
    out << i << ' ' << buf << '\n';
  }
  if (!out) throw InputError("failed writing output file '" + path + "'");
}

void write_state(const std::string& path, const DiState& state) {
  auto out = open_output(path, "state");
  save_state(state, out);
  if (!out) throw InputError("failed writing state file '" + path + "'");
}

int solve(const SolveArgs& args) {
  const Graph g = read_graph(args.graph);
  SolverConfig cfg = SolverConfig::uniform(g.size(), args.common.damping, args.common.epsilon,
                                           args.common.max_rounds);
  if (!args.zap.empty()) {
    auto in = open_input(args.zap, "zap");
    cfg.zap = with_input_name(args.zap, [&] { return load_zap(in, g.size()); });
  }
  cfg.validate(g.size());
  if (!args.save_state.empty() && args.algo != "di") {
    throw InputError("--save-state is only meaningful with --algo di");
  }

  if (args.algo == "pi" || args.algo == "gs") {
    auto result = args.algo == "pi" ? power_iteration(g, cfg) : gauss_seidel(g, cfg);
    write_vector(args.output, args.normalize ? normalized(result.x) : result.x);
    return result.converged ? kExitConverged : kExitUnconverged;
  }

  Scheduler sched(parse_scheduler_kind(args.scheduler));
  if (args.algo == "opic") {
    auto result = opic(g, cfg, sched);
    write_vector(args.output, result.x);
    return result.converged ? kExitConverged : kExitUnconverged;
  }

  auto result = di_run(g, cfg, sched);
  write_vector(args.output,
               args.normalize ? normalized_history(result.state) : result.state.history);
  if (!args.save_state.empty()) write_state(args.save_state, result.state);
  return result.converged ? kExitConverged : kExitUnconverged;
}

int bench(const BenchArgs& args) {
  if (args.graph.empty() == args.synthetic.empty()) {
    throw InputError("bench needs exactly one of --graph and --synthetic");
  }
  const auto algos = parse_algorithm_list(args.algos);
  const Graph g = args.synthetic.empty()
                      ? read_graph(args.graph)
                      : generate_synthetic(parse_synthetic_spec(args.synthetic));
  const SolverConfig cfg = SolverConfig::uniform(g.size(), args.common.damping,
                                                 args.common.epsilon, args.common.max_rounds);
  cfg.validate(g.size());
  const Reference ref = compute_reference(g, cfg);
  const ConvergenceTrace trace = run_benchmark(g, cfg, algos, ref.values);
  auto out = open_output(args.trace, "trace");
  trace.write_csv(out);
  if (!out) throw InputError("failed writing trace file '" + args.trace + "'");
  return kExitConverged;
}

int update(const UpdateArgs& args) {
  const Graph g_old = read_graph(args.graph);
  DiState state = [&] {
    auto in = open_input(args.state, "state");
    return with_input_name(args.state, [&] { return load_state(in); });
  }();
  if (state.size() != g_old.size()) {
    throw InputError("state file '" + args.state + "' has " + std::to_string(state.size()) +
                     " nodes but graph '" + args.graph + "' has " +
                     std::to_string(g_old.size()));
  }
  GraphDelta delta = [&] {
    auto in = open_input(args.delta, "delta");
    return with_input_name(args.delta, [&] { return load_delta(in); });
  }();
  DeltaResult next = [&] {
    try {
      return apply_delta(g_old, delta);
    } catch (const DeltaError& e) {
      throw InputError(args.delta + ": " + e.what());
    }
  }();

  DiState moved = di_update(state, g_old, next.graph, next.changed_columns);
  Scheduler sched(parse_scheduler_kind(args.scheduler));
  DiRunOptions options;
  options.epsilon = args.epsilon;
  options.max_rounds = args.max_rounds;
  auto result = di_resume(std::move(moved), next.graph, sched, options);

  write_vector(args.output,
               args.normalize ? normalized_history(result.state) : result.state.history);
  if (!args.save_state.empty()) write_state(args.save_state, result.state);
  return result.converged ? kExitConverged : kExitUnconverged;
}

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--damping", common.damping, "damping factor d in (0,1)")
      ->capture_default_str();
  cmd->add_option("--epsilon", common.epsilon, "stopping tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-rounds", common.max_rounds, "round budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"PageRank by D-Iteration and baseline solvers", "diffrank"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "compute a PageRank vector");
  solve_cmd->add_option("--graph", solve_args.graph, "edge list file")->required();
  solve_cmd->add_option("--algo", solve_args.algo, "solver")
      ->required()
      ->check(CLI::IsMember({"pi", "gs", "opic", "di"}));
  solve_cmd->add_option("--scheduler", solve_args.scheduler, "diffusion order for di/opic")
      ->check(CLI::IsMember({"cyc", "argmax", "greedy"}))
      ->capture_default_str();
  add_common(solve_cmd, solve_args.common);
  solve_cmd->add_option("--zap", solve_args.zap, "default distribution file");
  solve_cmd->add_flag("--normalize", solve_args.normalize,
                      "scale onto the solution of the dangling-completed matrix");
  solve_cmd->add_option("--output", solve_args.output, "result file")->required();
  solve_cmd->add_option("--save-state", solve_args.save_state,
                        "write the final D-Iteration state (di only)");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "per-round convergence trace of several solvers");
  bench_cmd->add_option("--graph", bench_args.graph, "edge list file");
  bench_cmd->add_option("--algos", bench_args.algos,
                        "comma-separated: pi,gs,opic-cyc,opic-argmax,di-cyc,di-argmax,di-greedy")
      ->required();
  add_common(bench_cmd, bench_args.common);
  bench_cmd->add_option("--trace", bench_args.trace, "CSV output file")->required();
  bench_cmd->add_option("--synthetic", bench_args.synthetic,
                        "generate kind,n,deg,seed instead of reading --graph");

  UpdateArgs update_args;
  auto* update_cmd = app.add_subcommand("update", "apply a graph delta to a saved state and resume");
  update_cmd->add_option("--state", update_args.state, "state file")->required();
  update_cmd->add_option("--graph", update_args.graph, "graph the state was computed on")
      ->required();
  update_cmd->add_option("--delta", update_args.delta, "delta file")->required();
  update_cmd->add_option("--epsilon", update_args.epsilon, "stopping tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  update_cmd->add_option("--max-rounds", update_args.max_rounds, "round budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  update_cmd->add_option("--scheduler", update_args.scheduler, "diffusion order")
      ->check(CLI::IsMember({"cyc", "argmax", "greedy"}))
      ->capture_default_str();
  update_cmd->add_flag("--normalize", update_args.normalize,
                       "scale onto the solution of the dangling-completed matrix");
  update_cmd->add_option("--output", update_args.output, "result file")->required();
  update_cmd->add_option("--save-state", update_args.save_state, "write the resumed state");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitConverged : kExitInputError;
  }

  try {
    if (*solve_cmd) return solve(solve_args);
    if (*bench_cmd) return bench(bench_args);
    return update(update_args);
  } catch (const Error& e) {
    err << "diffrank: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace diffrank
