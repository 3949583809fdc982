#pragma once

// Exhaustive two-agent reference solver on a discrete time lattice. Used only by
// tests: it shares no search or collision code with the library.

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "ccbs/map_graph.hpp"

namespace oracle {

struct Result {
  long ticks = 0;  // sum of costs in lattice ticks
  double soc = 0.0;
};

// Per-agent state: at a vertex, or `progress` ticks into directed edge `edge`.
struct AgentState {
  int vertex = -1;  // valid when edge < 0
  int edge = -1;
  int progress = 0;
  bool done = false;
};

namespace detail {

struct DirectedEdge {
  int from, to;
  int ticks;
};

// Smallest squared distance between p0 + t*u and q0 + t*w for t in [0, T].
inline double min_dist2(double px, double py, double ux, double uy, double qx, double qy, double wx, double wy,
                        double T) {
  const double dx = px - qx, dy = py - qy;
  const double vx = ux - wx, vy = uy - wy;
  const double vv = vx * vx + vy * vy;
  double t = 0.0;
  if (vv > 0.0) t = std::clamp(-(dx * vx + dy * vy) / vv, 0.0, T);
  const double ex = dx + vx * t, ey = dy + vy * t;
  return ex * ex + ey * ey;
}

}  // namespace detail

/// Optimal sum of costs for two agents whose actions start on multiples of
/// `tick` seconds. Edge durations are rounded to whole ticks.
inline std::optional<Result> solve_two(const ccbs::Instance& inst, double tick = 1e-2) {
  const auto& g = inst.graph;
  const auto& A = inst.agents;
  if (A.size() != 2) return std::nullopt;
  std::vector<detail::DirectedEdge> edges;
  std::vector<std::vector<int>> out(g.size());
  for (std::size_t v = 0; v < g.size(); ++v)
    for (const auto& e : g.neighbors(static_cast<int>(v))) {
      out[v].push_back(static_cast<int>(edges.size()));
      edges.push_back({static_cast<int>(v), e.to, static_cast<int>(std::lround(e.length / tick))});
    }
  const double clearance = A[0].radius + A[1].radius;
  const double clear2 = clearance * clearance - 1e-9;

  struct Kin {
    double x, y, vx, vy;  // position and velocity in units per tick
  };
  const auto kin = [&](const AgentState& s) -> Kin {
    if (s.edge < 0) {
      const auto p = g.point(s.vertex);
      return {p.x, p.y, 0.0, 0.0};
    }
    const auto& e = edges[static_cast<std::size_t>(s.edge)];
    const auto p = g.point(e.from), q = g.point(e.to);
    const double f = static_cast<double>(s.progress) / e.ticks;
    const double vx = (q.x - p.x) / e.ticks, vy = (q.y - p.y) / e.ticks;
    return {p.x + (q.x - p.x) * f, p.y + (q.y - p.y) * f, vx, vy};
  };

  // State encoding: agent part = vertex, or V + edge * maxT + progress; done bit.
  int max_ticks = 1;
  for (const auto& e : edges) max_ticks = std::max(max_ticks, e.ticks);
  const std::uint64_t V = g.size();
  const auto encode1 = [&](const AgentState& s) -> std::uint64_t {
    const std::uint64_t base = s.edge < 0 ? static_cast<std::uint64_t>(s.vertex)
                                          : V + static_cast<std::uint64_t>(s.edge) * max_ticks + s.progress;
    return base * 2 + (s.done ? 1 : 0);
  };
  const std::uint64_t span1 = (V + edges.size() * static_cast<std::uint64_t>(max_ticks) + 1) * 2;
  const auto encode = [&](const AgentState& a, const AgentState& b) { return encode1(a) * span1 + encode1(b); };

  struct Entry {
    long cost;
    std::uint64_t key;
    AgentState a, b;
  };
  const auto worse = [](const Entry& x, const Entry& y) { return x.cost > y.cost; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
  std::unordered_map<std::uint64_t, long> best;
  best.reserve(1 << 20);

  AgentState s0{A[0].start, -1, 0, false}, s1{A[1].start, -1, 0, false};
  open.push({0, encode(s0, s1), s0, s1});
  best[encode(s0, s1)] = 0;

  // Options for one agent at a vertex: 0 = wait a tick, 1+i = take out edge i.
  // Busy or finished agents carry on (-1).
  const auto options = [&](const AgentState& s, std::vector<int>& opts) {
    opts.clear();
    if (s.done || s.edge >= 0) {
      opts.push_back(-1);
      return;
    }
    opts.push_back(0);
    for (std::size_t i = 0; i < out[static_cast<std::size_t>(s.vertex)].size(); ++i)
      opts.push_back(1 + static_cast<int>(i));
  };
  const auto relax = [&](long cost, const AgentState& na, const AgentState& nb) {
    const auto key = encode(na, nb);
    auto it = best.find(key);
    if (it != best.end() && it->second <= cost) return;
    best[key] = cost;
    open.push({cost, key, na, nb});
  };

  std::vector<int> oa, ob;
  while (!open.empty()) {
    const Entry cur = open.top();
    open.pop();
    if (cur.cost > best[cur.key]) continue;
    if (cur.a.done && cur.b.done) return Result{cur.cost, static_cast<double>(cur.cost) * tick};
    // Committing to stay at the goal forever costs nothing further.
    if (!cur.a.done && cur.a.edge < 0 && cur.a.vertex == A[0].goal) {
      AgentState na = cur.a;
      na.done = true;
      relax(cur.cost, na, cur.b);
    }
    if (!cur.b.done && cur.b.edge < 0 && cur.b.vertex == A[1].goal) {
      AgentState nb = cur.b;
      nb.done = true;
      relax(cur.cost, cur.a, nb);
    }
    options(cur.a, oa);
    options(cur.b, ob);
    for (int xa : oa) {
      for (int xb : ob) {
        AgentState na = cur.a, nb = cur.b;
        bool waits = false;
        const auto apply = [&](AgentState& s, int opt) {
          if (opt == 0) waits = true;
          if (opt >= 1) {
            s.edge = out[static_cast<std::size_t>(s.vertex)][static_cast<std::size_t>(opt - 1)];
            s.progress = 0;
          }
        };
        apply(na, xa);
        apply(nb, xb);
        if (waits && na.edge < 0 && nb.edge < 0) continue;  // nobody moves
        long dt = waits ? 1 : std::numeric_limits<long>::max();
        const auto remaining = [&](const AgentState& s) {
          return static_cast<long>(edges[static_cast<std::size_t>(s.edge)].ticks - s.progress);
        };
        if (na.edge >= 0) dt = std::min(dt, remaining(na));
        if (nb.edge >= 0) dt = std::min(dt, remaining(nb));
        if (dt == std::numeric_limits<long>::max()) continue;  // both done
        const Kin ka = kin(na), kb = kin(nb);
        if (detail::min_dist2(ka.x, ka.y, ka.vx, ka.vy, kb.x, kb.y, kb.vx, kb.vy, static_cast<double>(dt)) < clear2)
          continue;
        const auto advance = [&](AgentState& s) {
          if (s.edge < 0) return;
          s.progress += static_cast<int>(dt);
          const auto& e = edges[static_cast<std::size_t>(s.edge)];
          if (s.progress >= e.ticks) {
            s.vertex = e.to;
            s.edge = -1;
            s.progress = 0;
          }
        };
        advance(na);
        advance(nb);
        const long active = (na.done ? 0 : 1) + (nb.done ? 0 : 1);
        relax(cur.cost + dt * active, na, nb);
      }
    }
  }
  return std::nullopt;
}

}  // namespace oracle
