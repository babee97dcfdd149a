#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "diffrank/graph.hpp"

namespace diffrank {

enum class SchedulerKind { cyclic, argmax, greedy };

/// Parses "cyc" / "argmax" / "greedy". Throws ConfigError otherwise.
SchedulerKind parse_scheduler_kind(std::string_view name);
std::string_view scheduler_name(SchedulerKind kind);

struct Selection {
  NodeId node;
  std::uint64_t scans;  // nodes inspected and skipped before `node`
};

/// What a scheduler needs to see of a fluid state.
///
/// magnitude(i) is |F(i)|, total() is sum_i |F(i)|. priority(i) must order
/// nodes exactly like magnitude(i) and may only change when node i is
/// reported through Scheduler::touched(); the greedy heap is keyed on it.
template <class V>
concept FluidView = requires(const V& v, NodeId i) {
  { v.size() } -> std::convertible_to<std::size_t>;
  { v.magnitude(i) } -> std::convertible_to<double>;
  { v.priority(i) } -> std::convertible_to<double>;
  { v.total() } -> std::convertible_to<double>;
};

/// Generates the diffusion sequence.
///
/// cyclic repeats a fixed permutation. argmax walks the same permutation and
/// stops at the first node holding at least the average fluid. greedy picks
/// the node with the largest fluid (ties to the smallest id) from a lazily
/// maintained heap: every node whose fluid changes must be reported through
/// touched(), and entries whose key no longer matches are dropped on pop.
class Scheduler {
 public:
  explicit Scheduler(SchedulerKind kind, std::vector<NodeId> order = {})
      : kind_(kind), order_(std::move(order)) {}

  SchedulerKind kind() const noexcept { return kind_; }
  std::size_t cursor() const noexcept { return cursor_; }
  void set_cursor(std::size_t position) noexcept { cursor_ = position; }

  /// Next node to diffuse, or nullopt when argmax/greedy see no fluid left.
  template <FluidView V>
  std::optional<Selection> next(const V& view);

  /// Reports that the fluid of node i changed (greedy only; no-op otherwise).
  template <FluidView V>
  void touched(NodeId i, const V& view) {
    if (kind_ != SchedulerKind::greedy || !heap_ready_) return;
    push({view.priority(i), i});
    if (heap_.size() > 4 * view.size() + 64) heap_ready_ = false;
  }

  /// Drops the greedy heap; it is rebuilt from the view on the next call.
  void invalidate() noexcept { heap_ready_ = false; }

 private:
  struct Entry {
    double key;
    NodeId node;
  };
  // Max-heap on key, smallest id first among equal keys.
  static bool heap_less(const Entry& a, const Entry& b) {
    return a.key < b.key || (a.key == b.key && a.node > b.node);
  }
  void push(Entry e) {
    heap_.push_back(e);
    std::push_heap(heap_.begin(), heap_.end(), heap_less);
  }
  void ensure_order(std::size_t n) {
    if (order_.size() == n) return;
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), NodeId{0});
    cursor_ = 0;
  }

  template <FluidView V>
  std::optional<Selection> next_argmax(const V& view);
  template <FluidView V>
  std::optional<Selection> next_greedy(const V& view);

  SchedulerKind kind_;
  std::vector<NodeId> order_;
  std::size_t cursor_ = 0;
  std::vector<Entry> heap_;
  bool heap_ready_ = false;
};

template <FluidView V>
std::optional<Selection> Scheduler::next(const V& view) {
  const std::size_t n = view.size();
  if (n == 0) return std::nullopt;
  ensure_order(n);
  switch (kind_) {
    case SchedulerKind::cyclic: {
      const NodeId node = order_[cursor_];
      cursor_ = (cursor_ + 1) % n;
      return Selection{node, 0};
    }
    case SchedulerKind::argmax:
      return next_argmax(view);
    case SchedulerKind::greedy:
      return next_greedy(view);
  }
  return std::nullopt;
}

template <FluidView V>
std::optional<Selection> Scheduler::next_argmax(const V& view) {
  const std::size_t n = view.size();
  const double total = view.total();
  if (!(total > 0.0)) return std::nullopt;
  const double threshold = total / static_cast<double>(n);

  NodeId best = order_[cursor_];
  double best_fluid = -1.0;
  for (std::uint64_t skipped = 0; skipped < n; ++skipped) {
    const NodeId node = order_[cursor_];
    cursor_ = (cursor_ + 1) % n;
    const double fluid = view.magnitude(node);
    if (fluid >= threshold) return Selection{node, skipped};
    if (fluid > best_fluid) {
      best_fluid = fluid;
      best = node;
    }
  }
  // Only reachable when the maintained total has drifted above the true sum.
  if (!(best_fluid > 0.0)) return std::nullopt;
  return Selection{best, n};
}

template <FluidView V>
std::optional<Selection> Scheduler::next_greedy(const V& view) {
  if (!(view.total() > 0.0)) return std::nullopt;
  const std::size_t n = view.size();
  if (!heap_ready_) {
    heap_.clear();
    heap_.reserve(2 * n);
    for (NodeId i = 0; i < n; ++i) heap_.push_back({view.priority(i), i});
    std::make_heap(heap_.begin(), heap_.end(), heap_less);
    heap_ready_ = true;
  }
  std::uint64_t stale = 0;
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), heap_less);
    const Entry top = heap_.back();
    heap_.pop_back();
    if (top.key == view.priority(top.node)) {
      if (!(view.magnitude(top.node) > 0.0)) return std::nullopt;
      return Selection{top.node, stale};
    }
    ++stale;
  }
  return std::nullopt;
}

}  // namespace diffrank
