#include "diffrank/bench.hpp"

#include <algorithm>
#include <future>
#include <random>
#include <string>
#include <unordered_set>

#include "diffrank/classic.hpp"
#include "diffrank/diteration.hpp"
#include "diffrank/errors.hpp"
#include "diffrank/scheduler.hpp"
#include "text_util.hpp"

namespace diffrank {

Reference compute_reference(const Graph& g, const SolverConfig& cfg) {
  if (g.size() <= kDenseReferenceLimit) {
    return {dense_reference_solve(g, cfg, /*completed=*/true), 0.0, "dense"};
  }
  DiRunOptions options;
  options.epsilon = kReferenceEpsilon;
  options.max_rounds = std::max<std::size_t>(cfg.max_rounds, 10000);
  Scheduler sched(SchedulerKind::argmax);
  auto run = di_resume(di_init(g, cfg), g, sched, options);
  if (!run.converged) {
    throw Error("reference run did not reach " + std::to_string(kReferenceEpsilon) +
                " within " + std::to_string(options.max_rounds) + " rounds");
  }
  return {normalized_history(run.state), residual_bound(run.state), "di-argmax"};
}

const std::vector<std::string>& benchmark_algorithms() {
  static const std::vector<std::string> labels = {
      "pi", "gs", "opic-cyc", "opic-argmax", "di-cyc", "di-argmax", "di-greedy"};
  return labels;
}

std::vector<std::string> parse_algorithm_list(std::string_view csv) {
  std::vector<std::string> out;
  const auto& known = benchmark_algorithms();
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = std::min(csv.find(',', start), csv.size());
    std::string label(csv.substr(start, comma - start));
    if (std::find(known.begin(), known.end(), label) == known.end()) {
      throw ConfigError("unknown algorithm '" + label + "'");
    }
    out.push_back(std::move(label));
    start = comma + 1;
  }
  return out;
}

double completion_scale(const Graph& g, double damping,
                        std::span<const double> completed_solution) {
  double dangling_mass = 0.0;
  for (NodeId j = 0; j < g.size(); ++j) {
    if (g.dangling(j)) dangling_mass += completed_solution[j];
  }
  return (1.0 - damping + damping * dangling_mass) / (1.0 - damping);
}

namespace {

ConvergenceTrace run_one(const Graph& g, const SolverConfig& cfg, const std::string& algo,
                         std::span<const double> reference, double scale) {
  if (algo == "pi" || algo == "gs") {
    PullOptions options;
    options.reference = reference;
    options.error_scale = scale;
    options.label = algo;
    return (algo == "pi" ? power_iteration(g, cfg, options) : gauss_seidel(g, cfg, options))
        .trace;
  }
  const auto dash = algo.find('-');
  Scheduler sched(parse_scheduler_kind(std::string_view(algo).substr(dash + 1)));
  if (algo.starts_with("opic")) {
    OpicOptions options;
    options.reference = reference;
    options.label = algo;
    return opic(g, cfg, sched, options).trace;
  }
  DiRunOptions options;
  options.epsilon = cfg.epsilon;
  options.max_rounds = cfg.max_rounds;
  options.reference = reference;
  options.whole_rounds = true;
  options.label = algo;
  return di_resume(di_init(g, cfg), g, sched, options).trace;
}

}  // namespace

ConvergenceTrace run_benchmark(const Graph& g, const SolverConfig& cfg,
                               std::span<const std::string> algos,
                               std::span<const double> reference) {
  cfg.validate(g.size());
  const auto& known = benchmark_algorithms();
  for (const auto& a : algos) {
    if (std::find(known.begin(), known.end(), a) == known.end()) {
      throw ConfigError("unknown algorithm '" + a + "'");
    }
    if (a.starts_with("opic") && !cfg.zap_is_uniform()) {
      throw ConfigError("OPIC emulation requires a uniform default distribution");
    }
  }
  if (reference.size() != g.size()) {
    throw ConfigError("reference vector length does not match the graph");
  }
  const double scale = completion_scale(g, cfg.damping, reference);

  std::vector<std::future<ConvergenceTrace>> runs;
  runs.reserve(algos.size());
  for (const auto& a : algos) {
    runs.push_back(std::async(std::launch::async, run_one, std::cref(g), std::cref(cfg),
                              std::cref(a), reference, scale));
  }
  ConvergenceTrace trace;
  for (auto& r : runs) trace.append(r.get());
  return trace;
}

SyntheticKind parse_synthetic_kind(std::string_view name) {
  if (name == "cycle") return SyntheticKind::cycle;
  if (name == "chain") return SyntheticKind::chain;
  if (name == "power-law") return SyntheticKind::power_law;
  throw ConfigError("unknown synthetic graph kind '" + std::string(name) + "'");
}

SyntheticSpec parse_synthetic_spec(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    parts.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  if (parts.size() != 4) {
    throw ConfigError("synthetic graph spec must be 'kind,n,deg,seed', got '" +
                      std::string(text) + "'");
  }
  SyntheticSpec spec;
  spec.kind = parse_synthetic_kind(parts[0]);
  if (!detail::parse_integer(parts[1], spec.n) ||
      !detail::parse_real(parts[2], spec.avg_degree) ||
      !detail::parse_integer(parts[3], spec.seed)) {
    throw ConfigError("malformed synthetic graph spec '" + std::string(text) + "'");
  }
  return spec;
}

Graph generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n == 0) throw ConfigError("synthetic graph needs n >= 1");
  if (!(spec.avg_degree >= 0.0)) throw ConfigError("average degree must be non-negative");
  if (!(spec.dangling_fraction >= 0.0 && spec.dangling_fraction < 1.0)) {
    throw ConfigError("dangling fraction must lie in [0, 1)");
  }
  const std::size_t n = spec.n;
  std::vector<WeightedEdge> edges;

  switch (spec.kind) {
    case SyntheticKind::cycle:
      for (std::size_t i = 0; i < n; ++i) {
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n), 1.0});
      }
      return Graph::from_edges(edges, n);
    case SyntheticKind::chain:
      for (std::size_t i = 0; i + 1 < n; ++i) {
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1), 1.0});
      }
      return Graph::from_edges(edges, n);
    case SyntheticKind::power_law:
      break;
  }

  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution is_dangling(spec.dangling_fraction);
  const double linked_mean = spec.avg_degree / (1.0 - spec.dangling_fraction);
  // At least one out-edge for linked nodes when the mean allows it.
  const bool shifted = linked_mean >= 1.0;
  const double extra_mean = shifted ? linked_mean - 1.0 : linked_mean;
  std::poisson_distribution<std::size_t> extra(extra_mean > 0.0 ? extra_mean : 1.0);
  const std::size_t max_degree = n > 1 ? n - 1 : 0;

  // Every node once, plus one copy per received edge: sampling from this urn
  // picks targets proportionally to in-degree + 1.
  std::vector<NodeId> urn(n);
  for (std::size_t i = 0; i < n; ++i) urn[i] = static_cast<NodeId>(i);
  std::vector<NodeId> order = urn;
  std::shuffle(order.begin(), order.end(), rng);

  std::unordered_set<NodeId> chosen;
  for (NodeId source : order) {
    if (is_dangling(rng)) continue;
    std::size_t degree = (shifted ? 1 : 0) + (extra_mean > 0.0 ? extra(rng) : 0);
    degree = std::min(degree, max_degree);
    chosen.clear();
    for (std::size_t tries = 0; chosen.size() < degree && tries < 20 * degree + 20; ++tries) {
      std::uniform_int_distribution<std::size_t> pick(0, urn.size() - 1);
      const NodeId target = urn[pick(rng)];
      if (target == source || !chosen.insert(target).second) continue;
      edges.push_back({source, target, 1.0});
      urn.push_back(target);
    }
  }
  return Graph::from_edges(edges, n);
}

}  // namespace diffrank
