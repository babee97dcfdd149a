#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <span>
#include <vector>

namespace diffrank {

using NodeId = std::uint32_t;

/// One non-zero entry P(target, source) of a column of the transition matrix.
struct Transition {
  NodeId target;
  double prob;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// A raw weighted edge, as read from an edge list.
struct WeightedEdge {
  NodeId source;
  NodeId target;
  double weight;

  bool operator==(const WeightedEdge&) const = default;
};

/// Row (in-edge) view of P: for node i, the (source j, P(i, j)) pairs.
struct InEdges {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> sources;
  std::vector<double> probs;

  std::span<const NodeId> sources_of(NodeId i) const {
    return {sources.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
  std::span<const double> probs_of(NodeId i) const {
    return {probs.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
};

/// Immutable column-substochastic transition structure.
///
/// Column j of P lists the out-edges of node j with probabilities
/// w(j, i) / sum_k w(j, k). Parallel edges are merged by summing weights, and
/// every column is sorted by target id so that two graphs built from the same
/// edge multiset compare equal. Dangling nodes have empty columns.
class Graph {
 public:
  Graph();

  /// Builds from raw edges; `min_nodes` forces n to at least that value.
  static Graph from_edges(std::span<const WeightedEdge> edges,
                          std::size_t min_nodes = 0);

  std::size_t size() const noexcept { return out_weight_sum_.size(); }
  std::size_t edge_count() const noexcept { return transitions_.size(); }

  /// Column `j` of P. Throws DomainError when j >= size().
  std::span<const Transition> transitions(NodeId j) const;

  /// Same as transitions() without the range check, for inner loops.
  std::span<const Transition> column(NodeId j) const noexcept {
    return {transitions_.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
  }
  /// Merged raw weights, parallel to column(j).
  std::span<const double> weights(NodeId j) const noexcept {
    return {weights_.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
  }

  double out_weight_sum(NodeId j) const noexcept { return out_weight_sum_[j]; }
  bool dangling(NodeId j) const noexcept { return offsets_[j] == offsets_[j + 1]; }
  std::size_t out_degree(NodeId j) const noexcept {
    return offsets_[j + 1] - offsets_[j];
  }

  /// Every merged edge, in column order.
  std::vector<WeightedEdge> edges() const;

  /// Transposed index, built on first use and shared by copies of this graph.
  const InEdges& in_edges() const;

 private:
  struct RowCache;

  std::vector<std::size_t> offsets_;
  std::vector<Transition> transitions_;
  std::vector<double> weights_;
  std::vector<double> out_weight_sum_;
  std::shared_ptr<RowCache> rows_;
};

/// True when both graphs have the same size and identical columns, with
/// probabilities compared within `tolerance`.
bool same_transitions(const Graph& a, const Graph& b, double tolerance = 0.0);

struct EdgeAddition {
  NodeId source;
  NodeId target;
  double weight;
};

struct EdgeRemoval {
  NodeId source;
  NodeId target;
};

/// Difference between two graphs over a shared node indexing.
struct GraphDelta {
  std::vector<EdgeAddition> additions;
  std::vector<EdgeRemoval> removals;

  bool empty() const noexcept { return additions.empty() && removals.empty(); }
};

struct DeltaResult {
  Graph graph;
  /// Sorted ids of every source column touched by the delta.
  std::vector<NodeId> changed_columns;
};

/// Reads "src dst [weight]" lines. Blank lines and '#' comments are skipped.
Graph load_edge_list(std::istream& in, std::size_t min_nodes = 0);

/// Reads "+ src dst [weight]" / "- src dst" lines.
GraphDelta load_delta(std::istream& in);

/// Applies `delta` to `g`, returning a new graph and the touched columns.
/// Throws DeltaError when a removal names an absent edge or when a
/// (source, target) pair appears twice in the delta.
DeltaResult apply_delta(const Graph& g, const GraphDelta& delta);

}  // namespace diffrank
