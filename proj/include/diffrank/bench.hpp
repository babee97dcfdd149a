#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diffrank/config.hpp"
#include "diffrank/graph.hpp"
#include "diffrank/trace.hpp"

namespace diffrank {

/// Completed-matrix solution used as ground truth by the benchmark.
struct Reference {
  RankVector values;
  /// Upper bound on the L1 distance between `values` and the exact solution
  /// (the residual bound for DI, 0 for the dense solve).
  double certified_l1 = 0.0;
  std::string method;
};

/// Graphs up to this size get the dense solve; larger ones run DI-argmax.
inline constexpr std::size_t kDenseReferenceLimit = 1000;
inline constexpr double kReferenceEpsilon = 1e-12;

/// Throws Error if DI-argmax exhausts its budget before 1e-12.
Reference compute_reference(const Graph& g, const SolverConfig& cfg);

/// Labels accepted by run_benchmark, in canonical order.
const std::vector<std::string>& benchmark_algorithms();

/// Splits "pi,gs,di-argmax" and checks every label. Throws ConfigError.
std::vector<std::string> parse_algorithm_list(std::string_view csv);

/// Runs each algorithm from scratch and records one row per round.
///
/// A round is n entry updates for pi/gs and n elementary diffusions for the
/// push methods. Every error is measured against `reference` in the
/// completed-matrix scale: DI through normalized_history, OPIC through its
/// unit-mass history, and pi/gs (which iterate on P itself) through the
/// constant factor (1 - d + d*L)/(1 - d), where L is the reference mass on
/// dangling nodes. Independent runs execute concurrently; rows come back
/// grouped in the order of `algos`.
ConvergenceTrace run_benchmark(const Graph& g, const SolverConfig& cfg,
                               std::span<const std::string> algos,
                               std::span<const double> reference);

/// Factor mapping the solution of x = dPx + (1-d)Z onto the completed one.
double completion_scale(const Graph& g, double damping,
                        std::span<const double> completed_solution);

enum class SyntheticKind { cycle, chain, power_law };

SyntheticKind parse_synthetic_kind(std::string_view name);

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::power_law;
  std::size_t n = 0;
  double avg_degree = 0.0;
  std::uint64_t seed = 0;
  /// power-law only: probability that a node gets no out-edge.
  double dangling_fraction = 0.1;
};

/// Parses "kind,n,deg,seed".
SyntheticSpec parse_synthetic_spec(std::string_view text);

/// cycle: i -> i+1 mod n. chain: i -> i+1. power-law: out-degrees drawn
/// independently (mean avg_degree over all nodes), targets picked by
/// preferential attachment on in-degree. Deterministic for a given seed.
Graph generate_synthetic(const SyntheticSpec& spec);

}  // namespace diffrank
