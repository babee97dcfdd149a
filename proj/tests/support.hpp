#pragma once

// Test-only helpers: small graphs, seeded corpora and an Eigen-based oracle
// that shares no code with the library's solvers.

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "diffrank/bench.hpp"
#include "diffrank/config.hpp"
#include "diffrank/diteration.hpp"
#include "diffrank/graph.hpp"

namespace diffrank::testing {

inline Graph graph_from(const std::string& text, std::size_t min_nodes = 0) {
  std::istringstream in(text);
  return load_edge_list(in, min_nodes);
}

inline Graph two_cycle() { return graph_from("0 1\n1 0\n"); }
inline Graph three_chain() { return graph_from("0 1\n1 2\n"); }
inline Graph single_dangling() { return graph_from("", 1); }

/// Column-stochastic (or substochastic) P as a dense matrix.
inline Eigen::MatrixXd dense_p(const Graph& g, const RankVector* completion = nullptr) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (NodeId j = 0; j < g.size(); ++j) {
    if (g.dangling(j) && completion) {
      for (Eigen::Index i = 0; i < n; ++i) p(i, j) = (*completion)[i];
    }
    for (const auto& t : g.column(j)) p(t.target, j) += t.prob;
  }
  return p;
}

/// x = (1-d)(I - dP)^{-1} Z, solved with Eigen's LU.
inline RankVector eigen_solution(const Graph& g, double d, const RankVector& zap,
                                 bool completed) {
  const auto n = static_cast<Eigen::Index>(g.size());
  const Eigen::MatrixXd p = dense_p(g, completed ? &zap : nullptr);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - d * p;
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) b(i) = (1.0 - d) * zap[i];
  const Eigen::VectorXd x = a.partialPivLu().solve(b);
  return RankVector(x.data(), x.data() + n);
}

inline RankVector eigen_solution(const Graph& g, const SolverConfig& cfg, bool completed) {
  return eigen_solution(g, cfg.damping, cfg.zap, completed);
}

/// Largest entrywise violation of H + F = F0 + dPH, relative to 1 + |F0|_1.
inline double conservation_residual(const DiState& s, const Graph& g, const RankVector& f0) {
  RankVector rhs = f0;
  for (NodeId j = 0; j < g.size(); ++j) {
    for (const auto& t : g.column(j)) rhs[t.target] += s.damping * t.prob * s.history[j];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    worst = std::max(worst, std::abs(s.history[i] + s.fluid[i] - rhs[i]));
  }
  return worst / (1.0 + l1_norm(f0));
}

/// Random digraph with the requested dangling fraction.
inline Graph random_graph(std::size_t n, double avg_degree, double dangling_fraction,
                          std::uint64_t seed) {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::power_law;
  spec.n = n;
  spec.avg_degree = avg_degree;
  spec.seed = seed;
  spec.dangling_fraction = dangling_fraction;
  return generate_synthetic(spec);
}

/// Random DAG whose numbering is a topological order (edges go up in id).
inline Graph random_topological_dag(std::size_t n, double avg_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<WeightedEdge> edges;
  std::poisson_distribution<int> degree(avg_degree);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const int k = degree(rng);
    std::uniform_int_distribution<std::size_t> pick(j + 1, n - 1);
    std::uniform_real_distribution<double> weight(0.5, 2.0);
    for (int e = 0; e < k; ++e) {
      edges.push_back({static_cast<NodeId>(j), static_cast<NodeId>(pick(rng)), weight(rng)});
    }
  }
  return Graph::from_edges(edges, n);
}

}  // namespace diffrank::testing
