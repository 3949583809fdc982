#pragma once

// Constant-velocity disk collision detection and unsafe-interval computation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace ccbs {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kTimeEps = 1e-9;

/// Thrown when a function is called with arguments violating its precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Thrown for malformed or inconsistent user input (unknown ids, bad instances).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
  friend Point2 operator*(double s, Point2 a) { return {a.x * s, a.y * s}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Point2 a) { return dot(a, a); }
inline double distance(Point2 a, Point2 b) { return std::sqrt(norm2(a - b)); }

/// A disk center moving with constant velocity over [t_start, t_end].
/// Waits have zero velocity; t_end may be +infinity for a terminal wait.
struct MotionSegment {
  Point2 origin;
  Point2 velocity;
  double t_start = 0.0;
  double t_end = 0.0;

  Point2 position(double t) const { return origin + velocity * (t - t_start); }
};

/// Half-open time interval [lo, hi). hi may be +infinity.
struct Interval {
  double lo = 0.0;
  double hi = kInf;

  bool contains(double t) const { return t >= lo && t < hi; }
  double width() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class ActionKind { move, wait };

inline const char* to_string(ActionKind k) { return k == ActionKind::move ? "move" : "wait"; }

/// One step of an agent plan. For waits `to == from`; duration may be +infinity
/// for the terminal wait at the goal.
struct TimedAction {
  ActionKind kind = ActionKind::wait;
  int from = 0;
  int to = 0;
  double t_start = 0.0;
  double duration = 0.0;

  double t_end() const { return t_start + duration; }
  bool is_wait() const { return kind == ActionKind::wait; }
  friend bool operator==(const TimedAction&, const TimedAction&) = default;
};

/// Earliest time at which the two disks overlap (center distance strictly below
/// radius_sum) while both segments are active. Tangency is not a collision.
inline std::optional<double> first_collision_time(const MotionSegment& a, const MotionSegment& b,
                                                  double radius_sum) {
  const double lo = std::max(a.t_start, b.t_start);
  const double hi = std::min(a.t_end, b.t_end);
  if (lo >= hi) return std::nullopt;

  const Point2 dp = a.position(lo) - b.position(lo);
  const Point2 dv = a.velocity - b.velocity;
  const double r2 = radius_sum * radius_sum;
  const double c = norm2(dp) - r2;
  const double touch = 1e-12 * r2;
  if (c < -touch) return lo;

  const double qa = norm2(dv);
  if (qa <= 0.0) return std::nullopt;
  const double qb = dot(dp, dv);
  // Starting on the boundary (up to rounding): only an inward motion collides.
  if (c <= touch) {
    if (qb < 0.0) return lo;
    return std::nullopt;
  }
  // Relative scale keeps grazing contacts (exact tangency up to rounding) out.
  const double disc = qb * qb - qa * c;
  if (disc <= 1e-12 * qa * r2) return std::nullopt;
  const double tau = (-qb - std::sqrt(disc)) / qa;
  if (tau < 0.0) return std::nullopt;  // moving apart
  if (lo + tau >= hi) return std::nullopt;
  return lo + tau;
}

/// Latest time at which the disks still overlap within the shared window, given
/// that they overlap at `from`. Returns the window end if they never separate.
inline double overlap_end_time(const MotionSegment& a, const MotionSegment& b, double radius_sum, double from) {
  const double hi = std::min(a.t_end, b.t_end);
  const Point2 dp = a.position(from) - b.position(from);
  const Point2 dv = a.velocity - b.velocity;
  const double qa = norm2(dv);
  if (qa <= 0.0) return hi;
  const double qb = dot(dp, dv);
  const double c = norm2(dp) - radius_sum * radius_sum;
  const double disc = std::max(0.0, qb * qb - qa * c);
  return std::min(hi, from + (-qb + std::sqrt(disc)) / qa);
}

/// Resolves vertex ids to coordinates. Throws InputError for unknown ids.
using VertexLocator = std::function<Point2(int)>;

/// Collision context shared by the action-level helpers.
struct GeometryContext {
  VertexLocator locate;
  double radius_sum = 0.0;
};

/// Segment traced by `action` when started at `t` instead of its own t_start.
inline MotionSegment to_segment(const TimedAction& action, double t, const VertexLocator& locate) {
  const Point2 from = locate(action.from);
  MotionSegment seg{from, {0.0, 0.0}, t, t + action.duration};
  if (action.kind == ActionKind::move && action.duration > 0.0 && std::isfinite(action.duration)) {
    const Point2 to = locate(action.to);
    seg.velocity = (to - from) * (1.0 / action.duration);
  }
  return seg;
}

inline std::optional<double> action_collision_time(const TimedAction& a_i, double t_i,
                                                   const TimedAction& a_j, double t_j,
                                                   const GeometryContext& ctx) {
  return first_collision_time(to_segment(a_i, t_i, ctx.locate), to_segment(a_j, t_j, ctx.locate),
                              ctx.radius_sum);
}

/// True iff executing a_i at t_i and a_j at t_j makes the disks overlap.
inline bool actions_conflict(const TimedAction& a_i, double t_i, const TimedAction& a_j, double t_j,
                             const GeometryContext& ctx) {
  return action_collision_time(a_i, t_i, a_j, t_j, ctx).has_value();
}

struct UnsafeIntervalResult {
  Interval interval;
  // Set when a later collision window was found within one action duration past
  // the end of the returned interval.
  bool second_window = false;
};

inline constexpr double kBisectionTolerance = 1e-4;

/// Maximal interval of start times [t_i, t^u) for a_i, beginning at t_i, in which
/// a_i collides with a_j executed at t_j. Found by stepping the delay by `delta`
/// until the first collision-free start, then bisecting to `tolerance`.
/// The returned upper end always lies on the collision-free side.
inline UnsafeIntervalResult unsafe_interval_detail(const TimedAction& a_i, double t_i,
                                                   const TimedAction& a_j, double t_j, double delta,
                                                   const GeometryContext& ctx,
                                                   double tolerance = kBisectionTolerance) {
  if (!(delta > 0.0)) throw ContractError("unsafe_interval: delta must be positive");
  if (!(tolerance > 0.0)) throw ContractError("unsafe_interval: tolerance must be positive");
  const auto collides = [&](double d) { return actions_conflict(a_i, t_i + d, a_j, t_j, ctx); };
  if (!collides(0.0)) throw ContractError("unsafe_interval: actions do not conflict at zero delay");

  const bool other_unbounded = !std::isfinite(a_j.duration);
  const bool self_unbounded = !std::isfinite(a_i.duration);
  if (self_unbounded && other_unbounded) return {{t_i, kInf}, false};

  if (a_i.kind == ActionKind::wait) {
    // A stationary a_i keeps colliding until a_j leaves its disk, so the end is exact.
    const auto sj = to_segment(a_j, t_j, ctx.locate);
    MotionSegment si{ctx.locate(a_i.from), {0.0, 0.0}, t_i, kInf};
    const double from = *first_collision_time(si, sj, ctx.radius_sum);
    return {{t_i, overlap_end_time(si, sj, ctx.radius_sum, from)}, false};
  }

  double safe_lo = 0.0;  // largest delay known to collide
  double free_hi = 0.0;
  for (long k = 1;; ++k) {
    const double d = static_cast<double>(k) * delta;
    if (!collides(d)) {
      free_hi = d;
      break;
    }
    safe_lo = d;
    // Once a_i starts after a stationary, never-ending a_j, nothing changes.
    if (other_unbounded && t_i + d >= t_j + 0.0) return {{t_i, kInf}, false};
  }
  while (free_hi - safe_lo > tolerance) {
    const double mid = 0.5 * (safe_lo + free_hi);
    if (collides(mid)) safe_lo = mid;
    else free_hi = mid;
  }

  UnsafeIntervalResult out{{t_i, t_i + free_hi}, false};
  if (std::isfinite(a_i.duration)) {
    const double guard_end = free_hi + a_i.duration;
    for (double d = free_hi + delta; d <= guard_end; d += delta) {
      if (collides(d)) {
        out.second_window = true;
        break;
      }
    }
  }
  return out;
}

inline Interval unsafe_interval(const TimedAction& a_i, double t_i, const TimedAction& a_j, double t_j,
                                double delta, const GeometryContext& ctx, double tolerance = kBisectionTolerance) {
  return unsafe_interval_detail(a_i, t_i, a_j, t_j, delta, ctx, tolerance).interval;
}

}  // namespace ccbs
