#pragma once

// Continuous-time Conflict-Based Search: best-first search over a constraint
// tree whose nodes hold unsafe-interval constraints and SIPP plans.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccbs/geometry.hpp"
#include "ccbs/map_graph.hpp"
#include "ccbs/sipp.hpp"

namespace ccbs {

enum class Heuristic { vanilla, past_conflicts, cardinals, hybrid };
enum class Cardinality { unknown, cardinal, semi, non };

inline const char* to_string(Heuristic h) {
  switch (h) {
    case Heuristic::vanilla: return "vanilla";
    case Heuristic::past_conflicts: return "past";
    case Heuristic::cardinals: return "cardinals";
    case Heuristic::hybrid: return "hybrid";
  }
  return "?";
}

inline std::optional<Heuristic> parse_heuristic(std::string_view s) {
  if (s == "vanilla") return Heuristic::vanilla;
  if (s == "past" || s == "past_conflicts" || s == "pastconf") return Heuristic::past_conflicts;
  if (s == "cardinals") return Heuristic::cardinals;
  if (s == "hybrid") return Heuristic::hybrid;
  return std::nullopt;
}

inline const char* to_string(Cardinality c) {
  switch (c) {
    case Cardinality::cardinal: return "cardinal";
    case Cardinality::semi: return "semi";
    case Cardinality::non: return "non";
    case Cardinality::unknown: return "unknown";
  }
  return "?";
}

/// Executing a_i at t_i and a_j at t_j makes agents i and j collide. Wait
/// actions are recorded as the sub-wait that begins at the collision.
struct Conflict {
  int i = 0;
  TimedAction a_i;
  double t_i = 0.0;
  int j = 0;
  TimedAction a_j;
  double t_j = 0.0;
  double collision_time = 0.0;
  Cardinality cardinality = Cardinality::unknown;
};

struct SolverConfig {
  Heuristic heuristic = Heuristic::hybrid;
  double timeout = 60.0;  // seconds
  double delta = 0.1;     // unsafe-interval sweep resolution
  // Bisection tolerance for unsafe-interval ends. Tight enough that every
  // heuristic reaches the same cost up to cost_epsilon.
  double bisection_tolerance = 1e-9;
  double cost_epsilon = 1e-6;
  // Collisions shorter than this (seconds) are treated as grazing contact.
  double min_collision_duration = 1e-6;
  bool check_invariants = false;
  std::function<void(const std::string&)> log;
};

struct Stats {
  bool success = false;
  bool timed_out = false;
  bool infeasible = false;
  double soc = 0.0;
  double makespan = 0.0;
  long hl_expanded = 0;
  long hl_generated = 0;
  long ll_calls = 0;
  double runtime = 0.0;
  long noncontiguous_windows = 0;
  long invariant_violations = 0;
};

struct Solution {
  std::vector<Plan> plans;
  double soc = 0.0;
  double makespan = 0.0;
};

struct CTNode {
  std::shared_ptr<const CTNode> parent;
  std::optional<Constraint> new_constraint;
  std::vector<std::shared_ptr<const Plan>> plans;
  double cost = 0.0;
  std::vector<Conflict> conflicts;  // every conflict of `plans`
  std::optional<Conflict> chosen_conflict;
  bool past_conflict_mode = false;
  long id = 0;
  int depth = 0;
};

/// Observer hook for per-node search traces.
struct TraceEvent {
  long node = 0;
  long parent = -1;
  double cost = 0.0;
  std::optional<Constraint> constraint;
  std::optional<Conflict> conflict;  // set on expansion
  bool expanded = false;
};

// ---------------------------------------------------------------------------
// Conflict detection
// ---------------------------------------------------------------------------

/// A plan's actions followed by the never-ending wait at its goal.
inline std::vector<TimedAction> timeline(const Plan& plan, int start) {
  std::vector<TimedAction> out = plan.actions;
  const int last = plan.actions.empty() ? start : plan.actions.back().to;
  out.push_back({ActionKind::wait, last, last, plan.cost, kInf});
  return out;
}

enum class DetectMode { first_only, all };

class ConflictDetector {
 public:
  ConflictDetector(const Instance& instance, double min_collision_duration = 1e-6)
      : instance_(&instance), min_duration_(min_collision_duration) {}

  /// Conflicts between the timelines of agents i and j, ordered by collision time.
  std::vector<Conflict> detect_pair(int i, int j, std::span<const TimedAction> ti,
                                    std::span<const TimedAction> tj) const {
    std::vector<Conflict> out;
    const auto& g = instance_->graph;
    const GeometryContext ctx{g.locator(), radius(i) + radius(j)};
    std::size_t p = 0, q = 0;
    while (p < ti.size() && q < tj.size()) {
      const auto& x = ti[p];
      const auto& y = tj[q];
      const double lo = std::max(x.t_start, y.t_start);
      const double hi = std::min(x.t_end(), y.t_end());
      if (lo < hi && boxes_overlap(x, y, ctx.radius_sum)) {
        ++geometry_calls_;
        if (auto c = make_conflict(i, x, j, y, ctx)) out.push_back(*c);
      }
      if (x.t_end() < y.t_end()) ++p;
      else ++q;
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Conflict& a, const Conflict& b) { return a.collision_time < b.collision_time; });
    return out;
  }

  std::size_t geometry_calls() const { return geometry_calls_; }

 private:
  double radius(int agent) const { return instance_->agents[static_cast<std::size_t>(agent)].radius; }

  bool boxes_overlap(const TimedAction& x, const TimedAction& y, double inflate) const {
    const auto& g = instance_->graph;
    const Point2 x0 = g.point(x.from), x1 = g.point(x.to), y0 = g.point(y.from), y1 = g.point(y.to);
    return std::min(x0.x, x1.x) - inflate < std::max(y0.x, y1.x) &&
           std::min(y0.x, y1.x) - inflate < std::max(x0.x, x1.x) &&
           std::min(x0.y, x1.y) - inflate < std::max(y0.y, y1.y) &&
           std::min(y0.y, y1.y) - inflate < std::max(x0.y, x1.y);
  }

  std::optional<Conflict> make_conflict(int i, const TimedAction& x, int j, const TimedAction& y,
                                        const GeometryContext& ctx) const {
    const auto sx = to_segment(x, x.t_start, ctx.locate);
    const auto sy = to_segment(y, y.t_start, ctx.locate);
    const auto tau = first_collision_time(sx, sy, ctx.radius_sum);
    if (!tau) return std::nullopt;
    // Ignore grazing contacts: require the disks to stay overlapped for a while.
    const double probe_end = std::min({sx.t_end, sy.t_end, *tau + min_duration_});
    if (probe_end <= *tau) return std::nullopt;
    const auto d = sx.position(probe_end) - sy.position(probe_end);
    if (norm2(d) >= ctx.radius_sum * ctx.radius_sum) return std::nullopt;

    const double shared_end = std::min(x.t_end(), y.t_end());
    const auto sub = [&](const TimedAction& a) {
      if (a.kind == ActionKind::move) return a;
      TimedAction w = a;
      w.t_start = std::max(a.t_start, *tau);
      w.duration = shared_end - w.t_start;
      return w;
    };
    Conflict c;
    c.i = i;
    c.a_i = sub(x);
    c.t_i = c.a_i.t_start;
    c.j = j;
    c.a_j = sub(y);
    c.t_j = c.a_j.t_start;
    c.collision_time = *tau;
    return c;
  }

  const Instance* instance_;
  double min_duration_;
  mutable std::size_t geometry_calls_ = 0;
};

/// Conflicts among `plans`. `pair_order` lists agent pairs to inspect in order;
/// empty means lexicographic (i < j). In first_only mode the earliest conflict
/// of the first conflicting pair is returned.
inline std::vector<Conflict> detect_conflicts(const Instance& instance, std::span<const Plan> plans, DetectMode mode,
                                              std::span<const std::pair<int, int>> pair_order = {},
                                              std::size_t* geometry_calls = nullptr) {
  std::vector<std::vector<TimedAction>> lines;
  lines.reserve(plans.size());
  for (std::size_t a = 0; a < plans.size(); ++a) lines.push_back(timeline(plans[a], instance.agents[a].start));
  std::vector<std::pair<int, int>> order(pair_order.begin(), pair_order.end());
  if (order.empty())
    for (int i = 0; i < static_cast<int>(plans.size()); ++i)
      for (int j = i + 1; j < static_cast<int>(plans.size()); ++j) order.push_back({i, j});
  ConflictDetector detector(instance);
  std::vector<Conflict> out;
  for (const auto& [i, j] : order) {
    auto found = detector.detect_pair(i, j, lines[static_cast<std::size_t>(i)], lines[static_cast<std::size_t>(j)]);
    if (found.empty()) continue;
    if (mode == DetectMode::first_only) {
      out.push_back(found.front());
      break;
    }
    out.insert(out.end(), found.begin(), found.end());
  }
  if (geometry_calls) *geometry_calls = detector.geometry_calls();
  return out;
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

class CcbsSolver {
 public:
  CcbsSolver(const Instance& instance, SolverConfig config)
      : instance_(instance), config_(std::move(config)), detector_(instance_, config_.min_collision_duration) {
    const auto n = instance_.agents.size();
    for (std::size_t a = 0; a < n; ++a) {
      if (instance_.agents[a].id != static_cast<int>(a))
        throw InputError("agent ids must be 0..n-1 in order");
    }
    past_counts_.assign(n, std::vector<long>(n, 0));
  }

  std::function<void(const TraceEvent&)> on_trace;

  /// Runs the search. Returns the solution, if any; statistics via stats().
  std::optional<Solution> solve() {
    const auto t0 = Clock::now();
    deadline_ = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(config_.timeout));
    stats_ = Stats{};
    auto root = make_root();
    if (!root) {
      stats_.infeasible = true;
      stats_.runtime = seconds_since(t0);
      return std::nullopt;
    }

    std::priority_queue<Entry, std::vector<Entry>, EntryOrder> open;
    open.push({root->cost, root->conflicts.size(), seq_++, root});
    double last_cost = -kInf;
    while (!open.empty()) {
      if (Clock::now() > deadline_) {
        stats_.timed_out = true;
        break;
      }
      auto node = open.top().node;
      open.pop();
      if (node->cost + config_.cost_epsilon < last_cost) ++stats_.invariant_violations;
      last_cost = std::max(last_cost, node->cost);
      if (node->conflicts.empty()) {
        Solution sol;
        for (const auto& p : node->plans) {
          sol.plans.push_back(*p);
          sol.soc += p->cost;
          sol.makespan = std::max(sol.makespan, p->cost);
        }
        stats_.success = true;
        stats_.soc = sol.soc;
        stats_.makespan = sol.makespan;
        stats_.runtime = seconds_since(t0);
        return sol;
      }
      const Conflict chosen = select_conflict(*node);
      node->chosen_conflict = chosen;
      ++stats_.hl_expanded;
      trace(*node, true);
      for (auto& child : expand(node, chosen)) {
        ++stats_.hl_generated;
        trace(*child, false);
        const auto known = child->conflicts.size();
        open.push({child->cost, known, seq_++, std::move(child)});
      }
    }
    if (!stats_.timed_out) stats_.infeasible = true;
    stats_.runtime = seconds_since(t0);
    return std::nullopt;
  }

  const Stats& stats() const { return stats_; }

  // The pieces below are public so tests can drive single steps.

  /// Root CT node with unconstrained plans and all their conflicts; null when
  /// some agent cannot reach its goal.
  std::shared_ptr<CTNode> make_root() {
    check_instance(instance_);
    heuristics_.clear();
    for (const auto& a : instance_.agents) heuristics_.push_back(precompute_heuristic(instance_.graph, a.goal));
    auto root = std::make_shared<CTNode>();
    root->id = next_id_++;
    for (const auto& a : instance_.agents) {
      auto p = replan(a.id, {});
      if (!p) return nullptr;
      root->cost += p->cost;
      root->plans.push_back(std::make_shared<const Plan>(std::move(*p)));
    }
    root->conflicts = all_conflicts(*root);
    ++stats_.hl_generated;
    trace(*root, false);
    return root;
  }

  /// Constraint for `side` (0 = agent i, 1 = agent j) resolving `c`.
  Constraint constraint_for(const Conflict& c, int side) {
    const bool first = side == 0;
    const TimedAction& mine = first ? c.a_i : c.a_j;
    const TimedAction& other = first ? c.a_j : c.a_i;
    const double t_mine = first ? c.t_i : c.t_j;
    const double t_other = first ? c.t_j : c.t_i;
    const int agent = first ? c.i : c.j;
    const GeometryContext ctx{instance_.graph.locator(), radius(c.i) + radius(c.j)};
    const auto r = unsafe_interval_detail(mine, t_mine, other, t_other, config_.delta, ctx, config_.bisection_tolerance);
    if (r.second_window) {
      ++stats_.noncontiguous_windows;
      if (config_.log) config_.log("unsafe interval for agent " + std::to_string(agent) + " has a second window");
    }
    Constraint out;
    out.agent = agent;
    out.kind = mine.kind;
    out.from = mine.from;
    out.to = mine.to;
    out.interval = r.interval;
    return out;
  }

  /// Replans both sides of `c` (cached on the node) and tags its cardinality.
  Cardinality classify_conflict(CTNode& node, const Conflict& c) {
    auto& res = resolutions(node, c);
    const double eps = config_.cost_epsilon;
    const auto rises = [&](const Resolution& r, int agent) {
      return !r.plan || (*r.plan)->cost > node.plans[static_cast<std::size_t>(agent)]->cost + eps;
    };
    const bool ri = rises(res[0], c.i);
    const bool rj = rises(res[1], c.j);
    if (ri && rj) return Cardinality::cardinal;
    if (ri || rj) return Cardinality::semi;
    return Cardinality::non;
  }

  Conflict select_conflict(CTNode& node) {
    const auto& cs = node.conflicts;
    Conflict chosen;
    const auto pick_past = [&] {
      // pairs by descending history count, then id order
      std::size_t best = 0;
      for (std::size_t k = 1; k < cs.size(); ++k) {
        const long cb = count(cs[best]), ck = count(cs[k]);
        if (ck > cb) best = k;
      }
      return cs[best];
    };
    switch (config_.heuristic) {
      case Heuristic::vanilla:
        chosen = cs.front();
        break;
      case Heuristic::past_conflicts:
        chosen = pick_past();
        break;
      case Heuristic::cardinals:
        chosen = pick_cardinal(node);
        break;
      case Heuristic::hybrid:
        if (node.past_conflict_mode) {
          chosen = pick_past();
        } else {
          chosen = pick_cardinal(node);
          if (chosen.cardinality == Cardinality::non) {
            node.past_conflict_mode = true;
            const auto card = chosen;
            chosen = pick_past();
            if (chosen.i == card.i && chosen.j == card.j && chosen.collision_time == card.collision_time)
              chosen.cardinality = card.cardinality;
          }
        }
        break;
    }
    ++past_counts_[static_cast<std::size_t>(chosen.i)][static_cast<std::size_t>(chosen.j)];
    return chosen;
  }

  /// Two children, one per side of the conflict; infeasible sides are dropped.
  std::vector<std::shared_ptr<CTNode>> expand(const std::shared_ptr<CTNode>& node, const Conflict& c) {
    auto& res = resolutions(*node, c);
    std::vector<std::shared_ptr<CTNode>> children;
    for (int side = 0; side < 2; ++side) {
      const auto& r = res[static_cast<std::size_t>(side)];
      if (!r.plan) continue;
      const int agent = side == 0 ? c.i : c.j;
      auto child = std::make_shared<CTNode>();
      child->parent = node;
      child->new_constraint = r.constraint;
      child->plans = node->plans;
      child->plans[static_cast<std::size_t>(agent)] = *r.plan;
      child->cost = node->cost - node->plans[static_cast<std::size_t>(agent)]->cost + (*r.plan)->cost;
      child->past_conflict_mode = node->past_conflict_mode;
      child->id = next_id_++;
      child->depth = node->depth + 1;
      child->conflicts = updated_conflicts(*node, *child, agent);
      if (config_.check_invariants) {
        const auto cons = constraints_of(*child, agent);
        if (!plan_satisfies(**r.plan, instance_.agents[static_cast<std::size_t>(agent)].start, cons) ||
            child->cost + config_.cost_epsilon < node->cost)
          ++stats_.invariant_violations;
      }
      children.push_back(std::move(child));
    }
    return children;
  }

  /// Constraints for `agent` along the root path of `node`.
  static std::vector<Constraint> constraints_of(const CTNode& node, int agent) {
    std::vector<Constraint> out;
    for (const CTNode* n = &node; n; n = n->parent.get())
      if (n->new_constraint && n->new_constraint->agent == agent) out.push_back(*n->new_constraint);
    return out;
  }

 private:
  using Clock = std::chrono::steady_clock;

  struct Entry {
    double cost;
    std::size_t known_conflicts;
    long seq;
    std::shared_ptr<CTNode> node;
  };
  struct EntryOrder {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.cost != b.cost) return a.cost > b.cost;
      if (a.known_conflicts != b.known_conflicts) return a.known_conflicts > b.known_conflicts;
      return a.seq < b.seq;  // LIFO
    }
  };

  struct Resolution {
    Constraint constraint;
    std::optional<std::shared_ptr<const Plan>> plan;
  };
  struct CacheEntry {
    int i, j;
    double collision_time;
    std::array<Resolution, 2> sides;
  };

  double radius(int agent) const { return instance_.agents[static_cast<std::size_t>(agent)].radius; }

  long count(const Conflict& c) const {
    return past_counts_[static_cast<std::size_t>(c.i)][static_cast<std::size_t>(c.j)];
  }

  static double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  }

  std::optional<Plan> replan(int agent, std::span<const Constraint> constraints) {
    ++stats_.ll_calls;
    const auto& a = instance_.agents[static_cast<std::size_t>(agent)];
    return plan_path(instance_.graph, a, ConstraintSet(constraints), heuristics_[static_cast<std::size_t>(agent)]);
  }

  std::array<Resolution, 2>& resolutions(CTNode& node, const Conflict& c) {
    auto& cache = caches_[node.id];
    for (auto& e : cache)
      if (e.i == c.i && e.j == c.j && e.collision_time == c.collision_time) return e.sides;
    CacheEntry entry{c.i, c.j, c.collision_time, {}};
    for (int side = 0; side < 2; ++side) {
      const int agent = side == 0 ? c.i : c.j;
      auto& r = entry.sides[static_cast<std::size_t>(side)];
      r.constraint = constraint_for(c, side);
      auto cons = constraints_of(node, agent);
      cons.push_back(r.constraint);
      if (auto p = replan(agent, cons)) r.plan = std::make_shared<const Plan>(std::move(*p));
    }
    cache.push_back(std::move(entry));
    return cache.back().sides;
  }

  Conflict pick_cardinal(CTNode& node) {
    std::optional<Conflict> semi;
    for (const auto& c : node.conflicts) {
      Conflict tagged = c;
      tagged.cardinality = classify_conflict(node, c);
      if (tagged.cardinality == Cardinality::cardinal) return tagged;
      if (tagged.cardinality == Cardinality::semi && !semi) semi = tagged;
      if (Clock::now() > deadline_) break;
    }
    if (semi) return *semi;
    Conflict any = node.conflicts.front();
    any.cardinality = Cardinality::non;
    return any;
  }

  std::vector<Conflict> all_conflicts(const CTNode& node) const {
    std::vector<std::vector<TimedAction>> lines;
    for (std::size_t a = 0; a < node.plans.size(); ++a)
      lines.push_back(timeline(*node.plans[a], instance_.agents[a].start));
    std::vector<Conflict> out;
    for (std::size_t i = 0; i < lines.size(); ++i)
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        auto found = detector_.detect_pair(static_cast<int>(i), static_cast<int>(j), lines[i], lines[j]);
        out.insert(out.end(), found.begin(), found.end());
      }
    return out;
  }

  // Keeps conflicts not involving `agent`, re-detects the pairs that do, and
  // restores (pair, time) order.
  std::vector<Conflict> updated_conflicts(const CTNode& parent, const CTNode& child, int agent) const {
    std::vector<Conflict> out;
    for (const auto& c : parent.conflicts)
      if (c.i != agent && c.j != agent) out.push_back(c);
    const auto mine = timeline(*child.plans[static_cast<std::size_t>(agent)],
                               instance_.agents[static_cast<std::size_t>(agent)].start);
    for (std::size_t other = 0; other < child.plans.size(); ++other) {
      if (static_cast<int>(other) == agent) continue;
      const auto theirs = timeline(*child.plans[other], instance_.agents[other].start);
      const int i = std::min(agent, static_cast<int>(other));
      const int j = std::max(agent, static_cast<int>(other));
      auto found = i == agent ? detector_.detect_pair(i, j, mine, theirs) : detector_.detect_pair(i, j, theirs, mine);
      out.insert(out.end(), found.begin(), found.end());
    }
    std::stable_sort(out.begin(), out.end(), [](const Conflict& a, const Conflict& b) {
      if (a.i != b.i) return a.i < b.i;
      if (a.j != b.j) return a.j < b.j;
      return a.collision_time < b.collision_time;
    });
    return out;
  }

  void trace(const CTNode& node, bool expanded) {
    if (!on_trace) return;
    TraceEvent ev;
    ev.node = node.id;
    ev.parent = node.parent ? node.parent->id : -1;
    ev.cost = node.cost;
    ev.constraint = node.new_constraint;
    if (expanded) ev.conflict = node.chosen_conflict;
    ev.expanded = expanded;
    on_trace(ev);
  }

  const Instance& instance_;
  SolverConfig config_;
  ConflictDetector detector_;
  std::vector<std::vector<double>> heuristics_;
  std::vector<std::vector<long>> past_counts_;
  std::unordered_map<long, std::vector<CacheEntry>> caches_;
  Stats stats_;
  Clock::time_point deadline_ = Clock::time_point::max();
  long next_id_ = 0;
  long seq_ = 0;
};

/// Solves `instance` with CCBS. The solution is empty on timeout or infeasibility.
inline std::pair<std::optional<Solution>, Stats> solve(const Instance& instance, const SolverConfig& config) {
  CcbsSolver solver(instance, config);
  auto sol = solver.solve();
  return {std::move(sol), solver.stats()};
}

}  // namespace ccbs
