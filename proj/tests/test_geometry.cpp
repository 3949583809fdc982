#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ccbs/geometry.hpp"
#include "ccbs/map_graph.hpp"
#include "test_support.hpp"

using namespace ccbs;
namespace ts = testing_support;

namespace {

MotionSegment seg(Point2 origin, Point2 velocity, double t0, double t1) { return {origin, velocity, t0, t1}; }

// Vertex ids 0..n-1 mapped onto explicit points.
GeometryContext ctx_for(std::vector<Point2> pts, double radius_sum) {
  return {[pts](int v) {
            if (v < 0 || static_cast<std::size_t>(v) >= pts.size()) throw InputError("unknown vertex");
            return pts[static_cast<std::size_t>(v)];
          },
          radius_sum};
}

TimedAction move(int from, int to, double t, double duration) { return {ActionKind::move, from, to, t, duration}; }
TimedAction wait(int v, double t, double duration) { return {ActionKind::wait, v, v, t, duration}; }

}  // namespace

TEST(FirstCollision, FarApartStationaryAgents) {
  EXPECT_FALSE(first_collision_time(seg({0, 0}, {0, 0}, 0, 5), seg({10, 0}, {0, 0}, 0, 5), 1.0));
}

TEST(FirstCollision, HeadOnMatchesAnalyticRoot) {
  const auto a = seg({0, 0}, {1, 0}, 0, 4);
  const auto b = seg({4, 0}, {-1, 0}, 0, 4);
  const auto t = first_collision_time(a, b, 1.0);
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, 1.5, 1e-12);
  // sampled at 1e-5: no overlap before 1.5 - 1e-5, overlap right after
  EXPECT_FALSE(ts::sampled_overlap({0, 0}, {1, 0}, 0, 1.5 - 1e-5, {4, 0}, {-1, 0}, 0, 1.5 - 1e-5, 1.0, 1e-5));
  EXPECT_TRUE(ts::sampled_overlap({0, 0}, {1, 0}, 0, 1.5 + 2e-5, {4, 0}, {-1, 0}, 0, 1.5 + 2e-5, 1.0, 1e-5));
}

TEST(FirstCollision, WaiterHitByMover) {
  const auto t = first_collision_time(seg({0, 0}, {0, 0}, 0, 10), seg({3, 0}, {-1, 0}, 0, 6), 1.0);
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, 2.0, 1e-12);
}

TEST(FirstCollision, TangencyIsNotACollision) {
  // parallel tracks exactly radius_sum apart
  EXPECT_FALSE(first_collision_time(seg({0, 0}, {1, 0}, 0, 4), seg({0, 1}, {1, 0}, 0, 4), 1.0));
  // passing by with closest approach exactly radius_sum
  EXPECT_FALSE(first_collision_time(seg({-2, 1}, {1, 0}, 0, 4), seg({0, 0}, {0, 0}, 0, 4), 1.0));
  // perpendicular follow through adjacent unit cells at radius sqrt(2)/4
  const double r2 = 2 * kDefaultRadius;
  EXPECT_FALSE(first_collision_time(seg({0, 0}, {1, 0}, 0, 1), seg({1, 0}, {0, 1}, 0, 1), r2));
}

TEST(FirstCollision, DisjointTimeWindows) {
  EXPECT_FALSE(first_collision_time(seg({0, 0}, {0, 0}, 0, 1), seg({0, 0}, {0, 0}, 2, 3), 1.0));
}

TEST(FirstCollision, AlreadyOverlappingReturnsWindowStart) {
  const auto t = first_collision_time(seg({0, 0}, {0, 0}, 0, 10), seg({0.5, 0}, {1, 0}, 3, 5), 1.0);
  ASSERT_TRUE(t);
  EXPECT_DOUBLE_EQ(*t, 3.0);
}

TEST(ActionsConflict, TwoWaitsAtOneVertex) {
  const auto ctx = ctx_for({{0, 0}}, 0.1);
  EXPECT_TRUE(actions_conflict(wait(0, 0, 2), 0, wait(0, 1, 2), 1, ctx));
}

TEST(ActionsConflict, ParallelEdgesFarApart) {
  const auto ctx = ctx_for({{0, 0}, {1, 0}, {0, 10}, {1, 10}}, std::sqrt(2.0) / 2);
  EXPECT_FALSE(actions_conflict(move(0, 1, 0, 1), 0, move(2, 3, 0, 1), 0, ctx));
}

TEST(ActionsConflict, UnknownVertexIsAnInputError) {
  const auto ctx = ctx_for({{0, 0}}, 1.0);
  EXPECT_THROW(actions_conflict(move(0, 7, 0, 1), 0, wait(0, 0, 1), 0, ctx), InputError);
}

TEST(ActionsConflict, CrossingExampleOnFixture) {
  const auto inst = ts::crossing_instance();
  const GeometryContext ctx{inst.graph.locator(), 1.0};
  const auto v = [&](int l) { return *inst.graph.vertex_with_label(l); };
  const double fi = *inst.graph.edge_length(v(ts::F), v(ts::I));
  const double hc = *inst.graph.edge_length(v(ts::H), v(ts::C));
  EXPECT_TRUE(actions_conflict(move(v(ts::F), v(ts::I), 2, fi), 2, move(v(ts::H), v(ts::C), 2, hc), 2, ctx));
}

TEST(UnsafeInterval, CrossingExampleValues) {
  const auto inst = ts::crossing_instance();
  const GeometryContext ctx{inst.graph.locator(), 1.0};
  const auto v = [&](int l) { return *inst.graph.vertex_with_label(l); };
  const auto fi = move(v(ts::F), v(ts::I), 2, *inst.graph.edge_length(v(ts::F), v(ts::I)));
  const auto hc = move(v(ts::H), v(ts::C), 2, *inst.graph.edge_length(v(ts::H), v(ts::C)));
  const auto a2 = unsafe_interval(fi, 2, hc, 2, 0.01, ctx);
  const auto a3 = unsafe_interval(hc, 2, fi, 2, 0.01, ctx);
  EXPECT_DOUBLE_EQ(a2.lo, 2.0);
  EXPECT_NEAR(a2.hi, 3.74, 0.05);
  EXPECT_DOUBLE_EQ(a3.lo, 2.0);
  EXPECT_NEAR(a3.hi, 3.31, 0.05);
}

TEST(UnsafeInterval, IdenticalMovesSeparateAfterOneClearance) {
  // at unit speed a delay d puts the two centers d apart
  const auto ctx = ctx_for({{0, 0}, {3, 0}}, 2 * kDefaultRadius);
  const auto a = move(0, 1, 0, 3);
  const auto u = unsafe_interval(a, 0, a, 0, 0.1, ctx);
  EXPECT_DOUBLE_EQ(u.lo, 0.0);
  EXPECT_GE(u.hi, 2 * kDefaultRadius);
  EXPECT_NEAR(u.hi, 2 * kDefaultRadius, 1e-4);
}

TEST(UnsafeInterval, CrossingEdgesMatchDenseSweep) {
  const double rs = std::sqrt(2.0) / 2;
  const auto ctx = ctx_for({{0, 0}, {2, 0}, {1, -1}, {1, 1}}, rs);
  const auto a = move(0, 1, 0, 2);
  const auto b = move(2, 3, 0, 2);
  const auto u = unsafe_interval(a, 0, b, 0, 0.1, ctx);
  double first_free = -1;
  for (double d = 0; d < 5; d += 1e-4) {
    if (!actions_conflict(a, d, b, 0, ctx)) {
      first_free = d;
      break;
    }
  }
  ASSERT_GT(first_free, 0);
  EXPECT_NEAR(u.hi, first_free, 2e-4);
  EXPECT_GE(u.hi, first_free - 1e-4);
}

TEST(UnsafeInterval, RequiresConflictAndPositiveDelta) {
  const auto ctx = ctx_for({{0, 0}, {1, 0}, {0, 10}, {1, 10}}, 1.0);
  EXPECT_THROW(unsafe_interval(move(0, 1, 0, 1), 0, move(2, 3, 0, 1), 0, 0.1, ctx), ContractError);
  EXPECT_THROW(unsafe_interval(move(0, 1, 0, 1), 0, move(0, 1, 0, 1), 0, 0.0, ctx), ContractError);
}

TEST(UnsafeInterval, StationaryEndIsExact) {
  // a mover crosses a waiting agent's disk and leaves it at t = 4
  const auto ctx = ctx_for({{0, 0}, {0, -3}, {0, 3}}, 1.0);
  const auto w = wait(0, 0, 10);
  const auto m = move(1, 2, 0, 6);
  const auto u = unsafe_interval(w, 2, m, 0, 0.1, ctx);
  EXPECT_DOUBLE_EQ(u.lo, 2.0);
  EXPECT_NEAR(u.hi, 4.0, 1e-12);
}

TEST(UnsafeInterval, NeverEndingOverlap) {
  const auto ctx = ctx_for({{0, 0}}, 1.0);
  const auto u = unsafe_interval(wait(0, 0, kInf), 0, wait(0, 0, kInf), 0, 0.1, ctx);
  EXPECT_TRUE(std::isinf(u.hi));
}

// ---------------------------------------------------------------------------
// Properties over random segment pairs
// ---------------------------------------------------------------------------

class RandomSegments : public ::testing::Test {
 protected:
  std::mt19937_64 rng{12345};
  std::uniform_real_distribution<double> coord{-3.0, 3.0};
  std::uniform_real_distribution<double> vel{-1.5, 1.5};
  std::uniform_real_distribution<double> time{0.0, 2.0};

  MotionSegment random_segment() {
    const double t0 = time(rng);
    const bool stationary = rng() % 4 == 0;
    return {{coord(rng), coord(rng)}, stationary ? Point2{0, 0} : Point2{vel(rng), vel(rng)}, t0, t0 + 0.2 + time(rng)};
  }
};

TEST_F(RandomSegments, ClosedFormAgreesWithSamplingOutsideTangencyBand) {
  int checked = 0, hits = 0;
  for (int n = 0; n < 1000; ++n) {
    const auto a = random_segment();
    const auto b = random_segment();
    const double r = 0.3 + time(rng);
    const double dmin = ts::sampled_min_distance(a.origin, a.velocity, a.t_start, a.t_end, b.origin, b.velocity,
                                                 b.t_start, b.t_end, 1e-5);
    if (std::fabs(dmin - r) < 1e-4) continue;
    ++checked;
    const bool sampled = dmin < r;
    hits += sampled;
    EXPECT_EQ(first_collision_time(a, b, r).has_value(), sampled) << "pair " << n;
  }
  EXPECT_GT(checked, 990);
  EXPECT_GT(hits, 50);
}

TEST_F(RandomSegments, SymmetricInArguments) {
  for (int n = 0; n < 1000; ++n) {
    const auto a = random_segment();
    const auto b = random_segment();
    const double r = 0.3 + time(rng);
    const auto ab = first_collision_time(a, b, r);
    const auto ba = first_collision_time(b, a, r);
    ASSERT_EQ(ab.has_value(), ba.has_value());
    if (ab) {
      EXPECT_NEAR(*ab, *ba, 1e-9);
    }
  }
}

TEST_F(RandomSegments, TimeShiftInvariant) {
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  for (int n = 0; n < 1000; ++n) {
    std::vector<Point2> pts{{coord(rng), coord(rng)}, {coord(rng), coord(rng)}, {coord(rng), coord(rng)},
                            {coord(rng), coord(rng)}};
    const auto ctx = ctx_for(pts, 0.3 + time(rng));
    const auto a = rng() % 3 ? move(0, 1, 0, distance(pts[0], pts[1])) : wait(0, 0, 1 + time(rng));
    const auto b = move(2, 3, 0, distance(pts[2], pts[3]));
    const double ti = time(rng), tj = time(rng), c = shift(rng);
    const auto base = action_collision_time(a, ti, b, tj, ctx);
    const auto moved = action_collision_time(a, ti + c, b, tj + c, ctx);
    ASSERT_EQ(base.has_value(), moved.has_value()) << "pair " << n;
    if (base) {
      EXPECT_NEAR(*base + c, *moved, 1e-9);
    }
  }
}

TEST_F(RandomSegments, UnsafeIntervalContainsEveryCollidingDelay) {
  int tested = 0;
  for (int n = 0; n < 400 && tested < 150; ++n) {
    std::vector<Point2> pts{{coord(rng), coord(rng)}, {coord(rng), coord(rng)}, {coord(rng), coord(rng)},
                            {coord(rng), coord(rng)}};
    const auto ctx = ctx_for(pts, 0.6 + time(rng));
    const auto a = rng() % 4 ? move(0, 1, 0, distance(pts[0], pts[1])) : wait(0, 0, 0.5 + time(rng));
    const auto b = move(2, 3, 0, distance(pts[2], pts[3]));
    const double ti = time(rng), tj = time(rng);
    if (!actions_conflict(a, ti, b, tj, ctx)) continue;
    ++tested;
    const auto u = unsafe_interval(a, ti, b, tj, 0.1, ctx);
    EXPECT_DOUBLE_EQ(u.lo, ti);
    // every colliding delay of the first window lies inside [lo, hi)
    for (double d = 0; ti + d < u.hi + 1.0; d += 1e-3) {
      if (!actions_conflict(a, ti + d, b, tj, ctx)) break;
      EXPECT_LT(ti + d, u.hi) << "pair " << n << " delay " << d;
    }
    EXPECT_FALSE(actions_conflict(a, u.hi, b, tj, ctx)) << "pair " << n;
    // colliding delays of two constant-velocity actions form one window
    EXPECT_FALSE(unsafe_interval_detail(a, ti, b, tj, 0.1, ctx).second_window) << "pair " << n;
  }
  EXPECT_GE(tested, 100);
}
