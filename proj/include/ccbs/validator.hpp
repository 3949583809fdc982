#pragma once

// Independent solution checker. Positions are interpolated directly from the
// plans and compared at a fixed sampling step.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "ccbs/map_graph.hpp"
#include "ccbs/sipp.hpp"

namespace ccbs {

enum class ViolationKind { wrong_start, wrong_goal, discontinuity, not_an_edge, clearance };

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::wrong_start: return "wrong_start";
    case ViolationKind::wrong_goal: return "wrong_goal";
    case ViolationKind::discontinuity: return "discontinuity";
    case ViolationKind::not_an_edge: return "not_an_edge";
    case ViolationKind::clearance: return "clearance";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  int agent = -1;
  int other = -1;  // second agent for clearance violations
  double time = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind k) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [k](const Violation& v) { return v.kind == k; }));
  }
  /// One line per violation: `kind agent other time`.
  std::string to_text() const {
    std::ostringstream out;
    for (const auto& v : violations) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", v.time);
      out << to_string(v.kind) << ' ' << v.agent << ' ' << v.other << ' ' << buf << '\n';
    }
    return out.str();
  }
};

namespace detail {

// Center of the agent at time t; parked at the last vertex after the plan ends.
inline Point2 sample_position(const Graph& g, const Plan& plan, int start, double t) {
  if (plan.actions.empty()) return g.point(start);
  for (const auto& a : plan.actions) {
    if (t < a.t_start) return g.point(a.from);
    if (t <= a.t_start + a.duration) {
      const Point2 p = g.point(a.from);
      if (a.kind == ActionKind::wait || a.duration <= 0.0) return p;
      const Point2 q = g.point(a.to);
      const double s = (t - a.t_start) / a.duration;
      return {p.x + (q.x - p.x) * s, p.y + (q.y - p.y) * s};
    }
  }
  return g.point(plan.actions.back().to);
}

}  // namespace detail

/// Checks `plans` (indexed like instance.agents). Violations are data, never thrown.
inline ValidationReport validate(const Instance& instance, const std::vector<Plan>& plans, double dt = 1e-3,
                                 double slack = 1e-6) {
  ValidationReport report;
  const auto& g = instance.graph;
  const auto& agents = instance.agents;
  constexpr double tol = 1e-9;
  double horizon = 0.0;

  for (std::size_t a = 0; a < agents.size(); ++a) {
    const int id = agents[a].id;
    if (a >= plans.size()) {
      report.violations.push_back({ViolationKind::wrong_start, id, -1, 0.0});
      continue;
    }
    const auto& acts = plans[a].actions;
    if (acts.empty()) {
      if (agents[a].start != agents[a].goal) report.violations.push_back({ViolationKind::wrong_goal, id, -1, 0.0});
      continue;
    }
    if (acts.front().from != agents[a].start) report.violations.push_back({ViolationKind::wrong_start, id, -1, 0.0});
    double t = 0.0;
    int at = agents[a].start;
    for (const auto& act : acts) {
      if (std::fabs(act.t_start - t) > tol || act.from != at)
        report.violations.push_back({ViolationKind::discontinuity, id, -1, act.t_start});
      if (act.kind == ActionKind::move) {
        bool found = false;
        if (g.valid_vertex(act.from))
          for (const auto& e : g.neighbors(act.from))
            if (e.to == act.to && std::fabs(e.length / agents[a].speed - act.duration) <= 1e-6) found = true;
        if (!found) report.violations.push_back({ViolationKind::not_an_edge, id, -1, act.t_start});
      } else if (act.to != act.from || act.duration < 0.0) {
        report.violations.push_back({ViolationKind::not_an_edge, id, -1, act.t_start});
      }
      t = act.t_start + act.duration;
      at = act.to;
    }
    if (at != agents[a].goal) report.violations.push_back({ViolationKind::wrong_goal, id, -1, t});
    horizon = std::max(horizon, t);
  }
  if (!report.ok() || plans.size() < agents.size()) return report;

  const std::size_t steps = static_cast<std::size_t>(std::ceil(horizon / dt));
  std::vector<Point2> pos(agents.size());
  std::vector<std::vector<bool>> inside(agents.size(), std::vector<bool>(agents.size(), false));
  for (std::size_t s = 0; s <= steps; ++s) {
    const double t = std::min(horizon, static_cast<double>(s) * dt);
    for (std::size_t a = 0; a < agents.size(); ++a) pos[a] = detail::sample_position(g, plans[a], agents[a].start, t);
    for (std::size_t a = 0; a < agents.size(); ++a) {
      for (std::size_t b = a + 1; b < agents.size(); ++b) {
        const double dx = pos[a].x - pos[b].x;
        const double dy = pos[a].y - pos[b].y;
        const double need = agents[a].radius + agents[b].radius - slack;
        const bool bad = dx * dx + dy * dy < need * need;
        // report the first sample of each violating stretch
        if (bad && !inside[a][b]) report.violations.push_back({ViolationKind::clearance, agents[a].id, agents[b].id, t});
        inside[a][b] = bad;
      }
    }
  }
  return report;
}

}  // namespace ccbs
