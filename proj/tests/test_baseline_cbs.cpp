#include <gtest/gtest.h>

#include <map>
#include <queue>
#include <random>
#include <tuple>

#include "ccbs/baseline_cbs.hpp"
#include "ccbs/ccbs.hpp"
#include "ccbs/validator.hpp"
#include "test_support.hpp"

using namespace ccbs;
using namespace ccbs::cbs;
namespace ts = testing_support;

namespace {

Instance continuous_twin(const GridMap& grid, const std::vector<DiscreteAgent>& agents) {
  Instance inst;
  inst.graph = build_graph(grid, 2);
  for (const auto& a : agents)
    inst.agents.push_back({a.id, *inst.graph.vertex_at(a.start), *inst.graph.vertex_at(a.goal), kDefaultRadius, 1.0});
  return inst;
}

// Joint breadth-first search for two agents under vertex and swap rules; an
// agent "finishes" when it parks at its goal for good.
std::optional<int> joint_discrete_soc(const GridMap& grid, DiscreteAgent a, DiscreteAgent b) {
  using State = std::tuple<int, int, int, int, bool, bool>;  // ax ay bx by done_a done_b
  std::map<State, int> best;
  using Item = std::pair<int, State>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  const State s0{a.start.x, a.start.y, b.start.x, b.start.y, false, false};
  best[s0] = 0;
  open.push({0, s0});
  const std::vector<Cell> steps{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  while (!open.empty()) {
    const auto [cost, s] = open.top();
    open.pop();
    if (cost > best[s]) continue;
    const auto [ax, ay, bx, by, da, db] = s;
    if (da && db) return cost;
    const auto relax = [&](const State& n, int c) {
      const auto it = best.find(n);
      if (it != best.end() && it->second <= c) return;
      best[n] = c;
      open.push({c, n});
    };
    if (!da && Cell{ax, ay} == a.goal) relax({ax, ay, bx, by, true, db}, cost);
    if (!db && Cell{bx, by} == b.goal) relax({ax, ay, bx, by, da, true}, cost);
    if (cost > 60) continue;
    for (Cell sa : da ? std::vector<Cell>{{0, 0}} : steps) {
      for (Cell sb : db ? std::vector<Cell>{{0, 0}} : steps) {
        const Cell na{ax + sa.x, ay + sa.y}, nb{bx + sb.x, by + sb.y};
        if (!grid.passable(na) || !grid.passable(nb) || na == nb) continue;
        if (na == Cell{bx, by} && nb == Cell{ax, ay}) continue;
        relax({na.x, na.y, nb.x, nb.y, da, db}, cost + (da ? 0 : 1) + (db ? 0 : 1));
      }
    }
  }
  return std::nullopt;
}

}  // namespace

TEST(PlanDiscrete, StraightLine) {
  const GridMap grid(4, 1);
  const auto p = plan_discrete(grid, {0, {0, 0}, {3, 0}}, {}, {});
  ASSERT_TRUE(p);
  EXPECT_EQ(p->cost, 3);
  EXPECT_EQ(p->cells.front(), (Cell{0, 0}));
  EXPECT_EQ(p->cells.back(), (Cell{3, 0}));
}

TEST(PlanDiscrete, HonoursVertexAndEdgeConstraints) {
  const GridMap grid(4, 1);
  const auto v = plan_discrete(grid, {0, {0, 0}, {3, 0}}, {{0, {1, 0}, 1}}, {});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->cost, 4);
  EXPECT_NE(v->at(1), (Cell{1, 0}));
  const auto e = plan_discrete(grid, {0, {0, 0}, {3, 0}}, {}, {{0, {1, 0}, {2, 0}, 1}});
  ASSERT_TRUE(e);
  EXPECT_EQ(e->cost, 4);
  // a later vertex constraint on the goal keeps the agent from parking early
  const auto g = plan_discrete(grid, {0, {0, 0}, {3, 0}}, {{0, {3, 0}, 5}}, {});
  ASSERT_TRUE(g);
  EXPECT_EQ(g->cost, 6);
}

TEST(FirstConflict, VertexAndSwap) {
  DiscretePlan a{0, {{0, 0}, {1, 0}, {2, 0}}, 2};
  DiscretePlan b{1, {{2, 0}, {1, 0}, {0, 0}}, 2};
  auto c = first_conflict({a, b});
  ASSERT_TRUE(c);
  EXPECT_FALSE(c->edge);
  EXPECT_EQ(c->t, 1);
  DiscretePlan d{1, {{1, 0}, {0, 0}}, 1};
  DiscretePlan e{0, {{0, 0}, {1, 0}}, 1};
  c = first_conflict({e, d});
  ASSERT_TRUE(c);
  EXPECT_TRUE(c->edge);
  EXPECT_EQ(c->t, 0);
  DiscretePlan f{0, {{0, 0}, {1, 0}}, 1};
  DiscretePlan g{1, {{1, 0}, {2, 0}}, 1};
  EXPECT_FALSE(first_conflict({f, g}));  // following is allowed
}

TEST(CbsSolve, CorridorSwapWithSidePocket) {
  const auto grid = parse_map("type octile\nheight 2\nwidth 5\nmap\n.....\n@@.@@\n");
  const std::vector<DiscreteAgent> agents{{0, {0, 0}, {4, 0}}, {1, {4, 0}, {0, 0}}};
  const auto [plans, st] = cbs_solve(grid, agents, {});
  ASSERT_TRUE(plans);
  EXPECT_EQ(st.soc, *joint_discrete_soc(grid, agents[0], agents[1]));
  const auto inst = continuous_twin(grid, agents);
  const auto [sol, cst] = solve(inst, {});
  ASSERT_TRUE(sol);
  EXPECT_LE(sol->soc, st.soc + 1e-6);
  EXPECT_TRUE(validate(inst, sol->plans).ok());
}

TEST(CbsSolve, SubUnitWaitBeatsDiscreteSteps) {
  // one agent turns the corner ahead of the other, which needs only one
  // clearance of waiting instead of a full step
  const auto grid = parse_map(ts::read_file(ts::data_path("corner.map")));
  const std::vector<DiscreteAgent> agents{{0, {1, 2}, {2, 1}}, {1, {0, 1}, {1, 0}}};
  const auto [plans, st] = cbs_solve(grid, agents, {});
  ASSERT_TRUE(plans);
  EXPECT_EQ(st.soc, 5);
  const auto [sol, cst] = solve(continuous_twin(grid, agents), {});
  ASSERT_TRUE(sol);
  EXPECT_LT(sol->soc, st.soc - 0.1);
  EXPECT_NEAR(sol->soc, 4.0 + 2 * kDefaultRadius, 1e-6);
}

TEST(CbsSolve, OptimalAgainstJointSearchAndNeverBelowCcbs) {
  std::mt19937_64 rng(5);
  int compared = 0;
  for (int n = 0; n < 40; ++n) {
    GridMap grid(5, 4);
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 5; ++x)
        if (rng() % 6 == 0) grid.set_blocked({x, y}, true);
    const auto g = build_graph(grid, 2);
    if (g.size() < 4) continue;
    Instance inst;
    try {
      inst = generate_scenario(g, 2, 100 + static_cast<std::uint64_t>(n));
    } catch (const GenerationError&) {
      continue;
    }
    std::vector<DiscreteAgent> agents;
    for (const auto& a : inst.agents) agents.push_back({a.id, g.cells[a.start], g.cells[a.goal]});
    const auto [plans, st] = cbs_solve(grid, agents, {2.0});
    const auto want = joint_discrete_soc(grid, agents[0], agents[1]);
    ASSERT_EQ(plans.has_value(), want.has_value()) << "case " << n;
    if (!plans) continue;
    EXPECT_EQ(st.soc, *want) << "case " << n;
    const auto [sol, cst] = solve(inst, SolverConfig{.timeout = 10, .log = {}});
    ASSERT_TRUE(sol) << "case " << n;
    EXPECT_LE(sol->soc, st.soc + 1e-6) << "case " << n;
    ++compared;
  }
  EXPECT_GE(compared, 20);
}

TEST(CbsSolve, UnreachableGoal) {
  const auto grid = parse_map("type octile\nheight 1\nwidth 3\nmap\n.@.\n");
  const auto [plans, st] = cbs_solve(grid, {{0, {0, 0}, {2, 0}}}, {});
  EXPECT_FALSE(plans);
  EXPECT_FALSE(st.success);
}
