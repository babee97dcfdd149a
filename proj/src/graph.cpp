#include "diffrank/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "diffrank/errors.hpp"
#include "text_util.hpp"

namespace diffrank {

struct Graph::RowCache {
  std::once_flag once;
  InEdges rows;
};

Graph::Graph() : offsets_{0}, rows_(std::make_shared<RowCache>()) {}

Graph Graph::from_edges(std::span<const WeightedEdge> edges,
                        std::size_t min_nodes) {
  std::size_t n = min_nodes;
  for (const auto& e : edges) {
    n = std::max<std::size_t>(n, std::max(e.source, e.target) + std::size_t{1});
  }

  // Merge parallel edges; std::map keeps each column sorted by target.
  std::vector<std::map<NodeId, double>> merged(n);
  for (const auto& e : edges) {
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw ConfigError("edge " + std::to_string(e.source) + " -> " +
                        std::to_string(e.target) + " has non-positive weight");
    }
    merged[e.source][e.target] += e.weight;
  }

  Graph g;
  g.offsets_.assign(n + 1, 0);
  g.out_weight_sum_.assign(n, 0.0);
  std::size_t m = 0;
  for (const auto& col : merged) m += col.size();
  g.transitions_.reserve(m);
  g.weights_.reserve(m);

  for (std::size_t j = 0; j < n; ++j) {
    double total = 0.0;
    for (const auto& [target, w] : merged[j]) total += w;
    g.out_weight_sum_[j] = total;
    for (const auto& [target, w] : merged[j]) {
      g.transitions_.push_back({target, w / total});
      g.weights_.push_back(w);
    }
    g.offsets_[j + 1] = g.transitions_.size();
  }
  return g;
}

std::span<const Transition> Graph::transitions(NodeId j) const {
  if (j >= size()) {
    throw DomainError("node " + std::to_string(j) + " out of range [0, " +
                      std::to_string(size()) + ")");
  }
  return column(j);
}

std::vector<WeightedEdge> Graph::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(edge_count());
  for (NodeId j = 0; j < size(); ++j) {
    auto col = column(j);
    auto w = weights(j);
    for (std::size_t t = 0; t < col.size(); ++t) {
      out.push_back({j, col[t].target, w[t]});
    }
  }
  return out;
}

const InEdges& Graph::in_edges() const {
  std::call_once(rows_->once, [this] {
    InEdges& r = rows_->rows;
    const std::size_t n = size();
    r.offsets.assign(n + 1, 0);
    for (const auto& t : transitions_) ++r.offsets[t.target + 1];
    for (std::size_t i = 0; i < n; ++i) r.offsets[i + 1] += r.offsets[i];
    r.sources.resize(transitions_.size());
    r.probs.resize(transitions_.size());
    std::vector<std::size_t> cursor(r.offsets.begin(), r.offsets.end() - 1);
    for (NodeId j = 0; j < n; ++j) {
      for (const auto& t : column(j)) {
        const std::size_t slot = cursor[t.target]++;
        r.sources[slot] = j;
        r.probs[slot] = t.prob;
      }
    }
  });
  return rows_->rows;
}

bool same_transitions(const Graph& a, const Graph& b, double tolerance) {
  if (a.size() != b.size()) return false;
  for (NodeId j = 0; j < a.size(); ++j) {
    auto ca = a.column(j);
    auto cb = b.column(j);
    if (ca.size() != cb.size()) return false;
    for (std::size_t t = 0; t < ca.size(); ++t) {
      if (ca[t].target != cb[t].target) return false;
      if (std::abs(ca[t].prob - cb[t].prob) > tolerance) return false;
    }
  }
  return true;
}

namespace {

NodeId parse_node(std::string_view token, std::size_t line) {
  NodeId id = 0;
  if (!detail::parse_integer(token, id)) {
    throw ParseError(line, "invalid node id '" + std::string(token) + "'");
  }
  return id;
}

double parse_weight(std::string_view token, std::size_t line) {
  double w = 0.0;
  if (!detail::parse_real(token, w) || !std::isfinite(w)) {
    throw ParseError(line, "invalid weight '" + std::string(token) + "'");
  }
  if (w <= 0.0) {
    throw ParseError(line, "weight must be positive, got '" +
                               std::string(token) + "'");
  }
  return w;
}

}  // namespace

Graph load_edge_list(std::istream& in, std::size_t min_nodes) {
  std::vector<WeightedEdge> edges;
  detail::for_each_record(in, [&](std::size_t line,
                                  const std::vector<std::string_view>& tok) {
    if (tok.size() != 2 && tok.size() != 3) {
      throw ParseError(line, "expected 'src dst [weight]', got " +
                                 std::to_string(tok.size()) + " tokens");
    }
    WeightedEdge e{parse_node(tok[0], line), parse_node(tok[1], line), 1.0};
    if (tok.size() == 3) e.weight = parse_weight(tok[2], line);
    edges.push_back(e);
  });
  return Graph::from_edges(edges, min_nodes);
}

GraphDelta load_delta(std::istream& in) {
  GraphDelta delta;
  detail::for_each_record(in, [&](std::size_t line,
                                  const std::vector<std::string_view>& tok) {
    if (tok[0] == "+") {
      if (tok.size() != 3 && tok.size() != 4) {
        throw ParseError(line, "expected '+ src dst [weight]'");
      }
      EdgeAddition a{parse_node(tok[1], line), parse_node(tok[2], line), 1.0};
      if (tok.size() == 4) a.weight = parse_weight(tok[3], line);
      delta.additions.push_back(a);
    } else if (tok[0] == "-") {
      if (tok.size() != 3) throw ParseError(line, "expected '- src dst'");
      delta.removals.push_back({parse_node(tok[1], line), parse_node(tok[2], line)});
    } else {
      throw ParseError(line, "delta lines start with '+' or '-', got '" +
                                 std::string(tok[0]) + "'");
    }
  });
  return delta;
}

DeltaResult apply_delta(const Graph& g, const GraphDelta& delta) {
  using Key = std::pair<NodeId, NodeId>;
  auto edge_name = [](NodeId s, NodeId t) {
    return "(" + std::to_string(s) + ", " + std::to_string(t) + ")";
  };

  std::set<Key> seen;
  for (const auto& r : delta.removals) {
    if (!seen.insert({r.source, r.target}).second) {
      throw DeltaError("edge " + edge_name(r.source, r.target) +
                       " appears more than once in the delta");
    }
  }
  for (const auto& a : delta.additions) {
    if (!seen.insert({a.source, a.target}).second) {
      throw DeltaError("edge " + edge_name(a.source, a.target) +
                       " appears more than once in the delta");
    }
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw DeltaError("addition " + edge_name(a.source, a.target) +
                       " has non-positive weight");
    }
  }

  std::map<Key, double> edges;
  for (const auto& e : g.edges()) edges[{e.source, e.target}] = e.weight;

  std::set<NodeId> changed;
  for (const auto& r : delta.removals) {
    auto it = edges.find({r.source, r.target});
    if (it == edges.end()) {
      throw DeltaError("cannot remove absent edge " + edge_name(r.source, r.target));
    }
    edges.erase(it);
    changed.insert(r.source);
  }
  for (const auto& a : delta.additions) {
    edges[{a.source, a.target}] += a.weight;
    changed.insert(a.source);
  }

  std::vector<WeightedEdge> list;
  list.reserve(edges.size());
  for (const auto& [key, w] : edges) list.push_back({key.first, key.second, w});
  return {Graph::from_edges(list, g.size()),
          std::vector<NodeId>(changed.begin(), changed.end())};
}

}  // namespace diffrank
