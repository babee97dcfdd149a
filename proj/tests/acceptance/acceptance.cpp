// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../support.hpp"
#include "diffrank/bench.hpp"
#include "diffrank/classic.hpp"
#include "diffrank/diteration.hpp"

using namespace diffrank;
using namespace diffrank::testing;

namespace {

constexpr double kD = 0.85;

class Check {
 public:
  void require(bool ok, const std::string& what) {
    ++count_;
    if (!ok && failures_.size() < 8) failures_.push_back(what);
    failed_ |= !ok;
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool failed() const { return failed_; }
  std::size_t count() const { return count_; }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  bool failed_ = false;
  std::size_t count_ = 0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

struct CorpusGraph {
  std::size_t n;
  std::uint64_t seed;
  Graph g;
  Graph twin;  // same seed, no dangling nodes
};

const std::vector<CorpusGraph>& corpus() {
  static const std::vector<CorpusGraph> graphs = [] {
    std::vector<CorpusGraph> out;
    const std::size_t sizes[] = {10, 50, 200};
    for (std::uint64_t i = 0; i < 20; ++i) {
      const std::size_t n = sizes[i % 3];
      const std::uint64_t seed = 1000 + i;
      out.push_back({n, seed, random_graph(n, 4.0, 0.1, seed), random_graph(n, 4.0, 0.0, seed)});
    }
    return out;
  }();
  return graphs;
}

std::string graph_tag(const CorpusGraph& c) {
  return "n=" + std::to_string(c.n) + " seed=" + std::to_string(c.seed);
}

constexpr SchedulerKind kDiKinds[] = {SchedulerKind::cyclic, SchedulerKind::argmax,
                                      SchedulerKind::greedy};

// Criteria 1, 2 and 9 share the same DI runs.
struct DiCorpusRun {
  const CorpusGraph* graph;
  SchedulerKind kind;
  double worst_conservation = 0.0;
  DiRunResult result;
};

const std::vector<DiCorpusRun>& di_corpus_runs() {
  static const std::vector<DiCorpusRun> runs = [] {
    std::vector<DiCorpusRun> out;
    for (const auto& c : corpus()) {
      const SolverConfig cfg = SolverConfig::uniform(c.n, kD, 1e-12, 100000);
      for (auto kind : kDiKinds) {
        DiCorpusRun run{&c, kind, 0.0, {}};
        DiState s = di_init(c.g, cfg);
        const RankVector f0 = s.fluid;
        Scheduler sched(kind);
        for (std::size_t k = 0; k < 10 * c.n; ++k) {
          if (!di_advance(s, c.g, sched)) break;
          run.worst_conservation =
              std::max(run.worst_conservation, conservation_residual(s, c.g, f0));
        }
        DiRunOptions opt;
        opt.epsilon = cfg.epsilon;
        opt.max_rounds = cfg.max_rounds;
        run.result = di_resume(std::move(s), c.g, sched, opt);
        out.push_back(std::move(run));
      }
    }
    return out;
  }();
  return runs;
}

void criterion1(Check& check) {
  double worst = 0.0;
  for (const auto& c : corpus()) {
    const SolverConfig cfg = SolverConfig::uniform(c.n, kD, 1e-12, 100000);
    const RankVector plain = dense_reference_solve(c.g, cfg, false);
    const RankVector completed = dense_reference_solve(c.g, cfg, true);
    // The library oracle is itself checked against an independent LU solve.
    check.require(l1_distance(plain, eigen_solution(c.g, cfg, false)) <= 1e-12,
                  graph_tag(c) + ": dense solve disagrees with Eigen");
    check.require(l1_distance(completed, eigen_solution(c.g, cfg, true)) <= 1e-12,
                  graph_tag(c) + ": completed dense solve disagrees with Eigen");

    for (const char* algo : {"pi", "gs"}) {
      const auto r = std::string(algo) == "pi" ? power_iteration(c.g, cfg) : gauss_seidel(c.g, cfg);
      const double err = l1_distance(r.x, plain);
      worst = std::max(worst, err);
      check.require(r.converged && err <= 1e-8,
                    graph_tag(c) + " " + algo + ": error " + fmt("%.3g", err));
    }
  }
  for (const auto& run : di_corpus_runs()) {
    const SolverConfig cfg = SolverConfig::uniform(run.graph->n, kD);
    const RankVector plain = dense_reference_solve(run.graph->g, cfg, false);
    const RankVector completed = dense_reference_solve(run.graph->g, cfg, true);
    const double raw = l1_distance(run.result.state.history, plain);
    const double norm = l1_distance(normalized_history(run.result.state), completed);
    worst = std::max({worst, raw, norm});
    check.require(run.result.converged && raw <= 1e-8 && norm <= 1e-8,
                  graph_tag(*run.graph) + " di-" + std::string(scheduler_name(run.kind)) +
                      ": raw " + fmt("%.3g", raw) + " normalized " + fmt("%.3g", norm));
  }
  check.note("worst L1 error " + fmt("%.3g", worst) + " (limit 1e-8)");
}

void criterion2(Check& check) {
  double worst = 0.0;
  for (const auto& run : di_corpus_runs()) {
    worst = std::max(worst, run.worst_conservation);
    check.require(run.worst_conservation <= 1e-12,
                  graph_tag(*run.graph) + " di-" + std::string(scheduler_name(run.kind)) +
                      ": residual " + fmt("%.3g", run.worst_conservation));
  }
  check.note("worst relative residual over the first 10n steps " + fmt("%.3g", worst) +
             " (limit 1e-12)");
}

void criterion3(Check& check) {
  double worst_slack = -1.0;
  std::size_t rows = 0;
  for (const auto& c : corpus()) {
    const SolverConfig cfg = SolverConfig::uniform(c.n, kD, 1e-12, 100000);
    const RankVector completed = eigen_solution(c.g, cfg, true);
    for (auto kind : kDiKinds) {
      Scheduler sched(kind);
      DiRunOptions opt;
      opt.epsilon = cfg.epsilon;
      opt.max_rounds = cfg.max_rounds;
      opt.reference = completed;
      const auto r = di_resume(di_init(c.g, cfg), c.g, sched, opt);
      for (const auto& row : r.trace.rows) {
        ++rows;
        worst_slack = std::max(worst_slack, *row.l1_error - *row.bound);
        check.require(*row.l1_error <= *row.bound + 1e-9,
                      graph_tag(c) + " round " + std::to_string(row.round) + ": error " +
                          fmt("%.3g", *row.l1_error) + " > bound " + fmt("%.3g", *row.bound));
      }
    }
    // Dangling-free twin: |x - H_k| <= |F_k| / (1 - d) at every step.
    const RankVector x = eigen_solution(c.twin, cfg, false);
    for (auto kind : kDiKinds) {
      DiState s = di_init(c.twin, cfg);
      Scheduler sched(kind);
      for (std::size_t k = 0; k < 30 * c.n; ++k) {
        if (!di_advance(s, c.twin, sched)) break;
        const double err = l1_distance(x, s.history);
        check.require(err <= l1_norm(s.fluid) / (1.0 - kD) + 1e-12,
                      graph_tag(c) + " twin step " + std::to_string(k) + ": error " +
                          fmt("%.3g", err));
      }
    }
  }
  check.note(std::to_string(rows) + " traced rounds; max(error - bound) " +
             fmt("%.3g", worst_slack));
}

void criterion4(Check& check) {
  double worst_ratio = 0.0;
  for (const auto& c : corpus()) {
    const SolverConfig cfg = SolverConfig::uniform(c.n, kD);
    const RankVector x = eigen_solution(c.twin, cfg, false);
    DiState s = di_init(c.twin, cfg);
    Scheduler sched(SchedulerKind::cyclic);
    for (std::size_t k = 1; k <= 30 * c.n; ++k) {
      di_advance(s, c.twin, sched);
      const double bound = std::pow(kD, std::floor(double(k) / double(c.n)));
      const double err = l1_distance(x, s.history);
      worst_ratio = std::max(worst_ratio, err / bound);
      check.require(err <= bound + 1e-12, graph_tag(c) + " k=" + std::to_string(k) +
                                              ": error " + fmt("%.3g", err) + " > " +
                                              fmt("%.3g", bound));
    }
  }
  check.note("corpus: max error/bound " + fmt("%.3f", worst_ratio));

  // Worst case: cycle i -> i-1 with all the default mass on the last node,
  // diffused in ascending order. Fluid moves one hop per round.
  const std::size_t n = 10;
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    edges.push_back({NodeId(i), NodeId((i + n - 1) % n), 1.0});
  }
  const Graph cycle = Graph::from_edges(edges, n);
  SolverConfig cfg = SolverConfig::uniform(n, kD);
  cfg.zap.assign(n, 0.0);
  cfg.zap[n - 1] = 1.0;
  const RankVector x = eigen_solution(cycle, cfg, false);
  DiState s = di_init(cycle, cfg);
  Scheduler sched(SchedulerKind::cyclic);
  double worst_gap = 0.0;
  for (std::size_t k = 1; k <= 30 * n; ++k) {
    di_advance(s, cycle, sched);
    const double bound = std::pow(kD, std::floor(double(k) / double(n)));
    const double err = l1_distance(x, s.history);
    check.require(err <= bound + 1e-12, "cycle k=" + std::to_string(k) + ": above the bound");
    // One hop per round until the fluid wraps from node 0 back to node n-1,
    // which costs two hops in round n; equality is only attainable before that.
    if (k % n == 0 && k / n < n) {
      worst_gap = std::max(worst_gap, std::abs(bound - err));
      check.require(std::abs(bound - err) <= 1e-12,
                    "cycle round " + std::to_string(k / n) + ": gap " +
                        fmt("%.3g", bound - err));
    }
  }
  check.note("reversed 10-cycle: max |bound - error| at the ends of rounds 1..9 " +
             fmt("%.3g", worst_gap));
}

void criterion5(Check& check) {
  double worst_ratio = 0.0;
  for (const auto& c : corpus()) {
    const SolverConfig cfg = SolverConfig::uniform(c.n, kD);
    const RankVector x = eigen_solution(c.twin, cfg, false);
    const double rate = 1.0 - (1.0 - kD) / double(c.n);
    DiState s = di_init(c.twin, cfg);
    Scheduler sched(SchedulerKind::argmax);
    for (std::size_t k = 1; k <= 30 * c.n; ++k) {
      if (!di_advance(s, c.twin, sched)) break;
      const double bound = std::pow(rate, double(k));
      const double err = l1_distance(x, s.history);
      worst_ratio = std::max(worst_ratio, err / bound);
      check.require(err <= bound + 1e-12, graph_tag(c) + " k=" + std::to_string(k) +
                                              ": error " + fmt("%.3g", err) + " > " +
                                              fmt("%.3g", bound));
    }
  }
  check.note("max error/bound " + fmt("%.3g", worst_ratio));
}

std::optional<std::size_t> rounds_to(const ConvergenceTrace& t, const std::string& algo,
                                     double target) {
  for (const auto& row : t.rows_for(algo)) {
    if (*row.l1_error <= target) return row.round;
  }
  return std::nullopt;
}

std::string rounds_str(std::optional<std::size_t> r) {
  return r ? std::to_string(*r) : std::string("never");
}

// Shared between criteria 6 and 7.
struct PowerLawBench {
  Graph g;
  Reference ref;
  ConvergenceTrace trace;
};

const PowerLawBench& power_law_bench() {
  static const PowerLawBench bench = [] {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::power_law;
    spec.n = 100000;
    spec.avg_degree = 10.0;
    spec.seed = 2024;
    PowerLawBench b{generate_synthetic(spec), {}, {}};
    SolverConfig cfg = SolverConfig::uniform(spec.n, kD, 1e-9, 300);
    b.ref = compute_reference(b.g, cfg);
    const std::vector<std::string> converging{"pi", "gs", "di-cyc", "di-argmax", "di-greedy"};
    b.trace = run_benchmark(b.g, cfg, converging, b.ref.values);
    cfg.max_rounds = 50;
    const std::vector<std::string> opic_runs{"opic-cyc", "opic-argmax"};
    b.trace.append(run_benchmark(b.g, cfg, opic_runs, b.ref.values));
    return b;
  }();
  return bench;
}

void criterion6(Check& check) {
  const auto& b = power_law_bench();
  const auto& t = b.trace;
  const double target = 1e-6;
  const auto argmax = rounds_to(t, "di-argmax", target);
  const auto cyc = rounds_to(t, "di-cyc", target);
  const auto gs = rounds_to(t, "gs", target);
  const auto pi = rounds_to(t, "pi", target);
  const auto greedy = rounds_to(t, "di-greedy", target);
  check.require(argmax && cyc && gs && pi, "some solver never reached 1e-6");
  if (argmax && cyc && gs && pi) {
    check.require(*argmax < *cyc, "di-argmax is not faster than di-cyc");
    check.require(*cyc <= *gs, "di-cyc is slower than gs");
    check.require(*gs < *pi, "gs is not faster than pi");
  }
  for (const char* algo : {"opic-cyc", "opic-argmax"}) {
    const auto rows = t.rows_for(algo);
    double best = INFINITY;
    for (const auto& row : rows) best = std::min(best, *row.l1_error);
    check.require(rows.size() == 50 && best > 1e-4,
                  std::string(algo) + ": best error " + fmt("%.3g", best));
    check.note(std::string(algo) + " best error in 50 rounds " + fmt("%.3g", best));
  }
  // Diagnostic only: gs from x0 = 0, the starting point DI effectively uses.
  PullOptions from_zero;
  from_zero.start = RankVector(b.g.size(), 0.0);
  from_zero.reference = b.ref.values;
  from_zero.error_scale = completion_scale(b.g, kD, b.ref.values);
  from_zero.label = "gs0";
  const auto gs0 = gauss_seidel(b.g, SolverConfig::uniform(b.g.size(), kD, 1e-9, 300), from_zero);
  check.note("diagnostic: gs started from 0 reaches 1e-6 in " +
             rounds_str(rounds_to(gs0.trace, "gs0", target)) + " rounds");
  check.note("rounds to 1e-6: di-argmax " + rounds_str(argmax) + ", di-greedy " +
             rounds_str(greedy) + ", di-cyc " + rounds_str(cyc) + ", gs " + rounds_str(gs) +
             ", pi " + rounds_str(pi) + " (reference: " + b.ref.method + ", " +
             std::to_string(b.g.edges().size()) + " edges)");
}

void criterion7(Check& check) {
  double worst_ratio = 0.0;
  auto inspect = [&](const ConvergenceTrace& t, double slack, const std::string& tag) {
    const auto rows = t.rows_for("pi");
    check.require(rows.size() >= 2, tag + ": fewer than two rounds");
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const double prev = *rows[k - 1].l1_error;
      const double cur = *rows[k].l1_error;
      if (prev > 1e-9) worst_ratio = std::max(worst_ratio, cur / prev);
      check.require(cur <= (kD + 1e-12) * prev + slack,
                    tag + " round " + std::to_string(rows[k].round) + ": ratio " +
                        fmt("%.6f", cur / prev));
    }
  };
  const std::vector<std::string> pi{"pi"};
  for (const auto& c : corpus()) {
    const SolverConfig cfg = SolverConfig::uniform(c.n, kD, 1e-12, 100000);
    const auto ref = compute_reference(c.g, cfg);
    inspect(run_benchmark(c.g, cfg, pi, ref.values), 1e-12 + 2.0 * ref.certified_l1,
            graph_tag(c));
  }
  const auto& b = power_law_bench();
  inspect(b.trace, 1e-12 + 2.0 * b.ref.certified_l1, "power-law n=100000");
  check.note("largest per-round ratio (errors above 1e-9) " + fmt("%.6f", worst_ratio));
}

GraphDelta perturb(const Graph& g, double fraction, std::mt19937_64& rng) {
  const auto edges = g.edges();
  const auto count = static_cast<std::size_t>(fraction * double(edges.size()));
  std::uniform_int_distribution<std::size_t> pick_edge(0, edges.size() - 1);
  std::uniform_int_distribution<NodeId> pick_node(0, NodeId(g.size() - 1));
  std::set<std::pair<NodeId, NodeId>> existing, used;
  for (const auto& e : edges) existing.insert({e.source, e.target});
  GraphDelta delta;
  while (delta.removals.size() < count) {
    const auto& e = edges[pick_edge(rng)];
    if (!used.insert({e.source, e.target}).second) continue;
    delta.removals.push_back({e.source, e.target});
    // Rewire the edge to a fresh target.
    for (;;) {
      const NodeId t = pick_node(rng);
      if (t == e.source || existing.count({e.source, t}) || !used.insert({e.source, t}).second) {
        continue;
      }
      delta.additions.push_back({e.source, t, e.weight});
      break;
    }
  }
  return delta;
}

void criterion8(Check& check) {
  int fewer = 0;
  double worst = 0.0;
  std::string counts;
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    const Graph g = random_graph(10000, 8.0, 0.1, 500 + trial);
    SolverConfig cfg = SolverConfig::uniform(g.size(), kD, 1e-10, 100000);
    Scheduler first(SchedulerKind::argmax);
    const auto base = di_run(g, cfg, first);
    check.require(base.converged && residual_bound(base.state) <= 1e-10,
                  "trial " + std::to_string(trial) + ": initial run did not converge");

    std::mt19937_64 rng(900 + trial);
    const auto next = apply_delta(g, perturb(g, 0.01, rng));
    DiRunOptions opt;
    opt.epsilon = 1e-10;
    opt.max_rounds = 100000;
    Scheduler again(SchedulerKind::argmax);
    const auto resumed =
        di_resume(di_update(base.state, g, next.graph, next.changed_columns), next.graph, again,
                  opt);
    Scheduler scratch(SchedulerKind::argmax);
    const auto fresh = di_resume(di_init(next.graph, cfg), next.graph, scratch, opt);
    check.require(resumed.converged && fresh.converged,
                  "trial " + std::to_string(trial) + ": a run did not converge");

    const double dist =
        l1_distance(normalized_history(resumed.state), normalized_history(fresh.state));
    worst = std::max(worst, dist);
    check.require(dist <= 2e-10,
                  "trial " + std::to_string(trial) + ": distance " + fmt("%.3g", dist));
    fewer += resumed.diffusions < fresh.diffusions;
    counts += (counts.empty() ? "" : " ") + std::to_string(resumed.diffusions) + "/" +
              std::to_string(fresh.diffusions);
  }
  check.require(fewer >= 8, "resumed run cheaper in only " + std::to_string(fewer) + "/10 trials");
  check.note("resumed cheaper in " + std::to_string(fewer) + "/10; worst distance " +
             fmt("%.6g", worst) + "; diffusions resumed/fresh: " + counts);
}

void criterion9(Check& check) {
  double worst = 0.0, worst_sum = 0.0;
  for (const auto& run : di_corpus_runs()) {
    const SolverConfig cfg = SolverConfig::uniform(run.graph->n, kD);
    const RankVector normed = normalized_history(run.result.state);
    const double err = l1_distance(normed, dense_reference_solve(run.graph->g, cfg, true));
    const double sum_gap = std::abs(l1_norm(normed) - 1.0);
    worst = std::max(worst, err);
    worst_sum = std::max(worst_sum, sum_gap);
    check.require(err <= 1e-8 && sum_gap <= 1e-9,
                  graph_tag(*run.graph) + ": error " + fmt("%.3g", err) + ", |sum - 1| " +
                      fmt("%.3g", sum_gap));
  }
  check.note("worst error " + fmt("%.3g", worst) + ", worst |sum - 1| " + fmt("%.3g", worst_sum));
}

void criterion10(Check& check) {
  double worst = 0.0;
  for (std::size_t n : {10u, 100u, 500u, 1000u}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Graph g = random_topological_dag(n, 3.0, seed * 31 + n);
      SolverConfig cfg = SolverConfig::uniform(n, kD, 1e-300, 1);
      const RankVector x = eigen_solution(g, cfg, false);

      PullOptions opt;
      opt.reference = x;
      opt.label = "gs";
      const auto gs = gauss_seidel(g, cfg, opt);
      const double gs_err = *gs.trace.rows.at(0).l1_error;

      Scheduler sched(SchedulerKind::cyclic);
      DiState s = di_init(g, cfg);
      for (std::size_t k = 0; k < n; ++k) di_advance(s, g, sched);
      const double di_err = l1_distance(x, s.history);

      worst = std::max({worst, gs_err, di_err});
      const std::string tag = "dag n=" + std::to_string(n) + " seed=" + std::to_string(seed);
      check.require(gs_err <= 1e-14, tag + " gs: " + fmt("%.3g", gs_err));
      check.require(di_err <= 1e-14, tag + " di-cyc: " + fmt("%.3g", di_err));
      check.require(l1_norm(s.fluid) == 0.0, tag + " di-cyc: fluid left after one round");
    }
  }
  check.note("worst one-sweep error " + fmt("%.3g", worst));
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence on the 20-graph corpus", criterion1},
      {2, "conservation identity over the first 10n steps", criterion2},
      {3, "residual bound and fluid bound", criterion3},
      {4, "round-robin bound d^floor(k/n), tight on the reversed cycle", criterion4},
      {5, "argmax bound (1-(1-d)/n)^k", criterion5},
      {6, "convergence ordering on a 1e5-node power-law graph", criterion6},
      {7, "power iteration contracts by d per round", criterion7},
      {8, "update then resume matches a fresh run and is cheaper", criterion8},
      {9, "normalized history equals the completed solution", criterion9},
      {10, "one-sweep exactness on topologically ordered DAGs", criterion10},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s (%zu checks, %.1fs)\n", check.failed() ? "FAIL" : "PASS",
                c.id, c.title, check.count(), secs);
    for (const auto& n : check.notes()) std::printf("       %s\n", n.c_str());
    for (const auto& f : check.failures()) std::printf("       failed: %s\n", f.c_str());
    std::fflush(stdout);
    failed += check.failed();
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
