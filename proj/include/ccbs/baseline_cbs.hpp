#pragma once

// Classical discrete CBS on a 4-connected grid: unit-duration moves and waits,
// vertex and edge (swap) conflicts, space-time A* as the low level.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ccbs/map_graph.hpp"

namespace ccbs::cbs {

struct DiscreteAgent {
  int id = 0;
  Cell start;
  Cell goal;
};

struct DiscretePlan {
  int agent = 0;
  std::vector<Cell> cells;  // cells[t] for t = 0..cost
  int cost = 0;

  Cell at(int t) const { return cells[static_cast<std::size_t>(std::min<int>(t, static_cast<int>(cells.size()) - 1))]; }
};

struct VertexConstraint {
  int agent;
  Cell cell;
  int t;
};

// Forbids moving from `from` at t to `to` at t+1.
struct EdgeConstraint {
  int agent;
  Cell from;
  Cell to;
  int t;
};

struct CbsConfig {
  double timeout = 60.0;
};

struct CbsStats {
  bool success = false;
  bool timed_out = false;
  int soc = 0;
  long hl_expanded = 0;
  long ll_calls = 0;
  double runtime = 0.0;
};

namespace detail {

inline std::uint64_t vt_key(Cell c, int t, int width) {
  return (static_cast<std::uint64_t>(t) << 32) | static_cast<std::uint64_t>(c.y * width + c.x);
}

inline std::uint64_t et_key(Cell a, Cell b, int t, int width) {
  const auto ca = static_cast<std::uint64_t>(a.y * width + a.x);
  const auto cb = static_cast<std::uint64_t>(b.y * width + b.x);
  return (static_cast<std::uint64_t>(t) << 44) ^ (ca << 22) ^ cb;
}

}  // namespace detail

/// Space-time A* for one agent under the given constraints. Cost is the arrival
/// step after which the agent can stay at its goal forever.
inline std::optional<DiscretePlan> plan_discrete(const GridMap& grid, const DiscreteAgent& agent,
                                                 const std::vector<VertexConstraint>& vcons,
                                                 const std::vector<EdgeConstraint>& econs) {
  const int w = grid.width;
  std::unordered_set<std::uint64_t> vset, eset;
  int last_goal_block = -1;
  int max_t = 0;
  for (const auto& c : vcons) {
    if (c.agent != agent.id) continue;
    vset.insert(detail::vt_key(c.cell, c.t, w));
    if (c.cell == agent.goal) last_goal_block = std::max(last_goal_block, c.t);
    max_t = std::max(max_t, c.t);
  }
  for (const auto& c : econs) {
    if (c.agent != agent.id) continue;
    eset.insert(detail::et_key(c.from, c.to, c.t, w));
    max_t = std::max(max_t, c.t);
  }
  if (!grid.passable(agent.start) || !grid.passable(agent.goal)) return std::nullopt;
  const int horizon = max_t + 2 * grid.width * grid.height + 2;

  // Exact distances to the goal as the heuristic.
  std::vector<int> dist(static_cast<std::size_t>(grid.width * grid.height), -1);
  {
    std::queue<Cell> q;
    q.push(agent.goal);
    dist[static_cast<std::size_t>(agent.goal.y * w + agent.goal.x)] = 0;
    while (!q.empty()) {
      const Cell c = q.front();
      q.pop();
      for (const Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
        const Cell n{c.x + d.x, c.y + d.y};
        if (!grid.passable(n) || dist[static_cast<std::size_t>(n.y * w + n.x)] >= 0) continue;
        dist[static_cast<std::size_t>(n.y * w + n.x)] = dist[static_cast<std::size_t>(c.y * w + c.x)] + 1;
        q.push(n);
      }
    }
  }
  const auto h = [&](Cell c) { return dist[static_cast<std::size_t>(c.y * w + c.x)]; };
  if (h(agent.start) < 0) return std::nullopt;
  if (vset.count(detail::vt_key(agent.start, 0, w))) return std::nullopt;

  struct Node {
    Cell c;
    int t;
    int parent;
  };
  struct Entry {
    int f, g, node;
  };
  const auto worse = [](const Entry& a, const Entry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.node < b.node;
  };
  std::vector<Node> nodes{{agent.start, 0, -1}};
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
  std::unordered_set<std::uint64_t> closed;
  open.push({h(agent.start), 0, 0});
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    const Node cur = nodes[static_cast<std::size_t>(e.node)];
    if (!closed.insert(detail::vt_key(cur.c, cur.t, w)).second) continue;
    if (cur.c == agent.goal && cur.t > last_goal_block) {
      DiscretePlan plan;
      plan.agent = agent.id;
      for (int n = e.node; n >= 0; n = nodes[static_cast<std::size_t>(n)].parent)
        plan.cells.push_back(nodes[static_cast<std::size_t>(n)].c);
      std::reverse(plan.cells.begin(), plan.cells.end());
      plan.cost = cur.t;
      return plan;
    }
    if (cur.t >= horizon) continue;
    for (const Cell d : {Cell{0, 0}, Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
      const Cell n{cur.c.x + d.x, cur.c.y + d.y};
      if (!grid.passable(n)) continue;
      const int t = cur.t + 1;
      if (vset.count(detail::vt_key(n, t, w)) || eset.count(detail::et_key(cur.c, n, cur.t, w))) continue;
      if (closed.count(detail::vt_key(n, t, w))) continue;
      nodes.push_back({n, t, e.node});
      open.push({t + h(n), t, static_cast<int>(nodes.size()) - 1});
    }
  }
  return std::nullopt;
}

struct DiscreteConflict {
  int i, j;
  int t;
  bool edge;
  Cell a, b;  // vertex: a; edge: agent i moves a -> b
};

inline std::optional<DiscreteConflict> first_conflict(const std::vector<DiscretePlan>& plans) {
  int horizon = 0;
  for (const auto& p : plans) horizon = std::max(horizon, p.cost);
  for (int t = 0; t <= horizon; ++t) {
    for (std::size_t i = 0; i < plans.size(); ++i) {
      for (std::size_t j = i + 1; j < plans.size(); ++j) {
        if (plans[i].at(t) == plans[j].at(t))
          return DiscreteConflict{static_cast<int>(i), static_cast<int>(j), t, false, plans[i].at(t), {}};
        if (t < horizon && plans[i].at(t) == plans[j].at(t + 1) && plans[i].at(t + 1) == plans[j].at(t) &&
            !(plans[i].at(t) == plans[i].at(t + 1)))
          return DiscreteConflict{static_cast<int>(i), static_cast<int>(j), t, true, plans[i].at(t), plans[i].at(t + 1)};
      }
    }
  }
  return std::nullopt;
}

/// Optimal sum-of-costs discrete solution, or nothing on infeasibility/timeout.
inline std::pair<std::optional<std::vector<DiscretePlan>>, CbsStats> cbs_solve(const GridMap& grid,
                                                                              const std::vector<DiscreteAgent>& agents,
                                                                              const CbsConfig& config = {}) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  CbsStats stats;
  const auto finish = [&] { stats.runtime = std::chrono::duration<double>(Clock::now() - t0).count(); };

  struct Node {
    std::vector<VertexConstraint> vcons;
    std::vector<EdgeConstraint> econs;
    std::vector<DiscretePlan> plans;
    int cost = 0;
    long seq = 0;
  };
  const auto worse = [](const std::shared_ptr<Node>& a, const std::shared_ptr<Node>& b) {
    if (a->cost != b->cost) return a->cost > b->cost;
    return a->seq < b->seq;
  };
  std::priority_queue<std::shared_ptr<Node>, std::vector<std::shared_ptr<Node>>, decltype(worse)> open(worse);
  long seq = 0;

  auto root = std::make_shared<Node>();
  for (std::size_t a = 0; a < agents.size(); ++a) {
    if (agents[a].id != static_cast<int>(a)) throw InputError("agent ids must be 0..n-1 in order");
    ++stats.ll_calls;
    auto p = plan_discrete(grid, agents[a], {}, {});
    if (!p) {
      finish();
      return {std::nullopt, stats};
    }
    root->cost += p->cost;
    root->plans.push_back(std::move(*p));
  }
  open.push(root);
  while (!open.empty()) {
    if (std::chrono::duration<double>(Clock::now() - t0).count() > config.timeout) {
      stats.timed_out = true;
      break;
    }
    auto node = open.top();
    open.pop();
    const auto c = first_conflict(node->plans);
    if (!c) {
      stats.success = true;
      stats.soc = node->cost;
      finish();
      return {node->plans, stats};
    }
    ++stats.hl_expanded;
    for (int side = 0; side < 2; ++side) {
      const int agent = side == 0 ? c->i : c->j;
      auto child = std::make_shared<Node>(*node);
      if (c->edge) {
        const Cell from = side == 0 ? c->a : c->b;
        const Cell to = side == 0 ? c->b : c->a;
        child->econs.push_back({agent, from, to, c->t});
      } else {
        child->vcons.push_back({agent, c->a, c->t});
      }
      ++stats.ll_calls;
      auto p = plan_discrete(grid, agents[static_cast<std::size_t>(agent)], child->vcons, child->econs);
      if (!p) continue;
      child->cost += p->cost - child->plans[static_cast<std::size_t>(agent)].cost;
      child->plans[static_cast<std::size_t>(agent)] = std::move(*p);
      child->seq = seq++;
      open.push(std::move(child));
    }
  }
  finish();
  return {std::nullopt, stats};
}

}  // namespace ccbs::cbs
