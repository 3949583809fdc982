#pragma once

// Safe-interval path planning under CCBS move/wait constraints.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ccbs/geometry.hpp"
#include "ccbs/map_graph.hpp"

namespace ccbs {

/// Agent `agent` must not start the given action at any time in `interval`.
/// Wait constraints (from == to) forbid occupying the vertex inside the interval.
struct Constraint {
  int agent = 0;
  ActionKind kind = ActionKind::move;
  int from = 0;
  int to = 0;
  Interval interval;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Closed interval [lo, hi] during which a vertex may be occupied.
struct SafeInterval {
  double lo = 0.0;
  double hi = kInf;
  bool contains(double t) const { return t >= lo - kTimeEps && t <= hi + kTimeEps; }
  friend bool operator==(const SafeInterval&, const SafeInterval&) = default;
};

class SafeIntervalTable {
 public:
  const std::vector<SafeInterval>& intervals(int v) const {
    const auto it = table_.find(v);
    return it == table_.end() ? kDefault() : it->second;
  }
  std::vector<SafeInterval>& mutable_intervals(int v) {
    auto it = table_.find(v);
    if (it == table_.end()) it = table_.emplace(v, kDefault()).first;
    return it->second;
  }
  bool has_entry(int v) const { return table_.count(v) != 0; }

 private:
  static const std::vector<SafeInterval>& kDefault() {
    static const std::vector<SafeInterval> d{{0.0, kInf}};
    return d;
  }
  std::unordered_map<int, std::vector<SafeInterval>> table_;
};

/// Removes the interior of a wait constraint from the vertex's safe intervals.
/// The left piece keeps t_i (a move may still start then); the right piece
/// starts at t^u. Degenerate single-instant pieces are dropped.
inline void split_safe_intervals(SafeIntervalTable& table, const Constraint& c) {
  if (c.kind != ActionKind::wait) throw ContractError("split_safe_intervals needs a wait constraint");
  const double lo = c.interval.lo, hi = c.interval.hi;
  auto& intervals = table.mutable_intervals(c.from);
  std::vector<SafeInterval> out;
  out.reserve(intervals.size() + 1);
  for (const auto& s : intervals) {
    if (!(s.lo < hi && s.hi > lo)) {
      out.push_back(s);
      continue;
    }
    if (lo > s.lo) out.push_back({s.lo, lo});
    if (s.hi > hi) out.push_back({hi, s.hi});
  }
  intervals = std::move(out);
}

/// Sorted union of half-open windows (touching windows are fused).
inline std::vector<Interval> merge_windows(std::vector<Interval> windows) {
  std::sort(windows.begin(), windows.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& w : windows) {
    if (!merged.empty() && w.lo <= merged.back().hi) merged.back().hi = std::max(merged.back().hi, w.hi);
    else merged.push_back(w);
  }
  return merged;
}

/// Earliest departure time >= `ready` along an edge of `duration`, avoiding
/// the (merged, sorted) constrained start windows, leaving no later than
/// `leave_by` (end of the current safe interval) and arriving inside `target`.
inline std::optional<double> earliest_departure(std::span<const Interval> windows, double ready, double leave_by,
                                                double duration, const SafeInterval& target) {
  double t = std::max(ready, target.lo - duration);
  for (const auto& w : windows) {
    if (t < w.lo - kTimeEps) break;
    if (t < w.hi - kTimeEps) t = w.hi;
  }
  if (t > leave_by + kTimeEps) return std::nullopt;
  if (t + duration > target.hi + kTimeEps) return std::nullopt;
  return t;
}

struct Plan {
  int agent = 0;
  std::vector<TimedAction> actions;
  double cost = 0.0;  // goal arrival time
};

/// Per-agent constraint view used by the planner.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  explicit ConstraintSet(std::span<const Constraint> constraints) {
    std::map<std::pair<int, int>, std::vector<Interval>> raw;
    for (const auto& c : constraints) {
      if (!(c.interval.lo < c.interval.hi)) continue;
      if (c.kind == ActionKind::wait) split_safe_intervals(safe_, c);
      else raw[{c.from, c.to}].push_back(c.interval);
    }
    for (auto& [edge, windows] : raw) moves_.emplace(key(edge.first, edge.second), merge_windows(std::move(windows)));
  }

  const SafeIntervalTable& safe_intervals() const { return safe_; }
  std::span<const Interval> move_windows(int from, int to) const {
    const auto it = moves_.find(key(from, to));
    if (it == moves_.end()) return {};
    return it->second;
  }

 private:
  static std::uint64_t key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
  }
  SafeIntervalTable safe_;
  std::unordered_map<std::uint64_t, std::vector<Interval>> moves_;
};

/// Exact shortest-path distance (edge length) from every vertex to `goal`;
/// +infinity where unreachable.
inline std::vector<double> precompute_heuristic(const Graph& graph, int goal) {
  if (!graph.valid_vertex(goal)) throw InputError("unknown goal vertex " + std::to_string(goal));
  std::vector<double> dist(graph.size(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[static_cast<std::size_t>(goal)] = 0.0;
  open.push({0.0, goal});
  while (!open.empty()) {
    const auto [d, v] = open.top();
    open.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    for (const auto& e : graph.neighbors(v)) {
      const double nd = d + e.length;
      if (nd < dist[static_cast<std::size_t>(e.to)]) {
        dist[static_cast<std::size_t>(e.to)] = nd;
        open.push({nd, e.to});
      }
    }
  }
  return dist;
}

struct SippStats {
  std::size_t expanded = 0;
  std::size_t generated = 0;
};

/// A* over (vertex, safe interval) states; returns the minimum-cost plan that
/// satisfies `constraints`, or nothing. `distances` is precompute_heuristic for
/// the agent's goal (in length units; divided by speed here).
inline std::optional<Plan> plan_path(const Graph& graph, const Agent& agent, const ConstraintSet& constraints,
                                     std::span<const double> distances, SippStats* stats = nullptr) {
  const auto& safe = constraints.safe_intervals();
  const double inv_speed = 1.0 / agent.speed;
  const auto h = [&](int v) { return distances[static_cast<std::size_t>(v)] * inv_speed; };
  if (!std::isfinite(h(agent.start))) return std::nullopt;

  struct Node {
    int v;
    int k;
    double g;
    double depart;  // departure time from the parent vertex
    int parent;
  };
  std::vector<Node> nodes;
  // best arrival per (vertex, interval index)
  std::unordered_map<std::uint64_t, double> best;
  const auto state_key = [](int v, int k) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) << 20) ^ static_cast<std::uint64_t>(k);
  };

  struct Entry {
    double f;
    double g;
    int node;
  };
  const auto worse = [](const Entry& a, const Entry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;  // deeper first
    return a.node < b.node;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);

  const auto& start_intervals = safe.intervals(agent.start);
  int start_k = -1;
  for (std::size_t k = 0; k < start_intervals.size(); ++k) {
    if (start_intervals[k].lo <= 0.0 + kTimeEps && start_intervals[k].hi >= 0.0) {
      start_k = static_cast<int>(k);
      break;
    }
  }
  if (start_k < 0) return std::nullopt;
  nodes.push_back({agent.start, start_k, 0.0, 0.0, -1});
  best[state_key(agent.start, start_k)] = 0.0;
  open.push({h(agent.start), 0.0, 0});

  int goal_node = -1;
  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    const Node cur = nodes[static_cast<std::size_t>(top.node)];
    if (cur.g > best[state_key(cur.v, cur.k)] + 0.0) continue;
    if (stats) ++stats->expanded;
    const auto& cur_intervals = safe.intervals(cur.v);
    const SafeInterval here = cur_intervals[static_cast<std::size_t>(cur.k)];
    if (cur.v == agent.goal && std::isinf(here.hi)) {
      goal_node = top.node;
      break;
    }
    for (const auto& e : graph.neighbors(cur.v)) {
      const double dur = e.length * inv_speed;
      const auto windows = constraints.move_windows(cur.v, e.to);
      const auto& targets = safe.intervals(e.to);
      for (std::size_t k = 0; k < targets.size(); ++k) {
        if (targets[k].hi + kTimeEps < cur.g + dur) continue;
        const auto dep = earliest_departure(windows, cur.g, here.hi, dur, targets[k]);
        if (!dep) continue;
        const double arrive = std::max(*dep + dur, targets[k].lo);
        const auto key = state_key(e.to, static_cast<int>(k));
        const auto it = best.find(key);
        if (it != best.end() && it->second <= arrive) continue;
        best[key] = arrive;
        const int id = static_cast<int>(nodes.size());
        nodes.push_back({e.to, static_cast<int>(k), arrive, *dep, top.node});
        open.push({arrive + h(e.to), arrive, id});
        if (stats) ++stats->generated;
      }
    }
  }
  if (goal_node < 0) return std::nullopt;

  std::vector<int> chain;
  for (int n = goal_node; n >= 0; n = nodes[static_cast<std::size_t>(n)].parent) chain.push_back(n);
  std::reverse(chain.begin(), chain.end());
  Plan plan;
  plan.agent = agent.id;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const Node& prev = nodes[static_cast<std::size_t>(chain[i - 1])];
    const Node& next = nodes[static_cast<std::size_t>(chain[i])];
    if (next.depart > prev.g + kTimeEps)
      plan.actions.push_back({ActionKind::wait, prev.v, prev.v, prev.g, next.depart - prev.g});
    plan.actions.push_back({ActionKind::move, prev.v, next.v, next.depart, next.g - next.depart});
  }
  plan.cost = nodes[static_cast<std::size_t>(goal_node)].g;
  return plan;
}

/// Convenience overload computing the heuristic on the fly.
inline std::optional<Plan> plan_path(const Graph& graph, const Agent& agent, std::span<const Constraint> constraints) {
  const auto h = precompute_heuristic(graph, agent.goal);
  return plan_path(graph, agent, ConstraintSet(constraints), h);
}

/// True iff no move of `plan` starts inside a matching move-constraint window
/// and the agent never occupies a wait-constrained vertex strictly inside the
/// window. The terminal stay at the goal counts as occupancy.
inline bool plan_satisfies(const Plan& plan, int start, std::span<const Constraint> constraints) {
  const auto occupied = [](double a, double b, const Interval& w) {
    if (b > a) return b > w.lo + kTimeEps && a < w.hi - kTimeEps;
    return a > w.lo + kTimeEps && a < w.hi - kTimeEps;
  };
  for (const auto& c : constraints) {
    if (c.agent != plan.agent) continue;
    for (const auto& a : plan.actions) {
      if (c.kind == ActionKind::move) {
        if (a.kind == ActionKind::move && a.from == c.from && a.to == c.to && a.t_start >= c.interval.lo - kTimeEps &&
            a.t_start < c.interval.hi - kTimeEps)
          return false;
      } else if (a.from == c.from) {
        if (occupied(a.t_start, a.kind == ActionKind::wait ? a.t_end() : a.t_start, c.interval)) return false;
      }
    }
    if (c.kind == ActionKind::wait) {
      const int last = plan.actions.empty() ? start : plan.actions.back().to;
      if (last == c.from && occupied(plan.cost, kInf, c.interval)) return false;
    }
  }
  return true;
}

}  // namespace ccbs
