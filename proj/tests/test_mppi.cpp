#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ramp/planner/mppi.hpp"

using namespace ramp;

namespace {

OccupancyGrid uniform_grid(CellState s, double size = 80.0) {
  OccupancyGrid g(GridFrame::centered(Eigen::Vector2d::Zero(), size, size, 0.2));
  g.cells().setConstant(static_cast<std::uint8_t>(s));
  return g;
}

PlannerSettings ramp_settings() {
  PlannerSettings s;
  s.mppi.samples = 256;
  return s;
}

// Mean |v| of the planned rollout up to its time-to-reach.
double mean_planned_speed(const Rollout& r) {
  const int n = std::max(1, std::min(r.ttr, static_cast<int>(r.speeds.size())));
  double sum = 0.0;
  for (int t = 0; t < n; ++t) sum += r.speed_at(t);
  return sum / n;
}

}  // namespace

TEST(Softmin, ShiftInvariance) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 50.0), c(-3.0, 3.0);
  const Eigen::VectorXd costs = Eigen::VectorXd::NullaryExpr(64, [&] { return u(rng); });
  const Eigen::MatrixXd samples = Eigen::MatrixXd::NullaryExpr(40, 64, [&] { return c(rng); });
  const Eigen::VectorXd base = weighted_update(samples, softmin_weights(costs, 2.0));
  for (double shift : {-1e3, -7.5, 0.1, 1e4}) {
    const Eigen::VectorXd moved = weighted_update(samples, softmin_weights(costs.array() + shift, 2.0));
    EXPECT_LE((moved - base).cwiseAbs().maxCoeff(), 1e-9) << shift;
  }
}

TEST(Softmin, WeightsNormalizeAndFavourLowCost) {
  Eigen::VectorXd costs(4);
  costs << 3.0, 1.0, 2.0, std::numeric_limits<double>::quiet_NaN();
  const Eigen::VectorXd w = softmin_weights(costs, 1.0);
  EXPECT_NEAR(w.sum(), 1.0, 1e-15);
  EXPECT_GT(w[1], w[2]);
  EXPECT_GT(w[2], w[0]);
  EXPECT_EQ(w[3], 0.0);
  EXPECT_NEAR(w[1] / w[0], std::exp(2.0), 1e-12);
}

TEST(Mppi, StraightGoalOnOpenGround) {
  const OccupancyGrid grid = uniform_grid(CellState::Free);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    MppiPlanner planner(PlannerSettings{}, seed);
    RobotState x{{-10.0, 0.0}, 0.0};
    const PlanningContext ctx{&grid, {}, {10.0, 0.0}};
    Control applied;
    PlanResult plan;
    for (int cycle = 0; cycle < 10; ++cycle) {
      plan = planner.plan(x, applied, ctx);
      applied = plan.command;
      x = step(x, applied, 0.05, planner.settings().platform);
    }
    EXPECT_GE(mean_planned_speed(plan.planned), 0.9 * 5.0) << "seed " << seed;
    for (int t = 0; t <= 40; ++t) {
      const RobotState& s = plan.planned.states[static_cast<std::size_t>(t)];
      const double bearing = std::atan2(-s.position.y(), 10.0 - s.position.x());
      EXPECT_LE(std::abs(s.yaw), 5.0 * kPi / 180.0) << "seed " << seed << " step " << t;
      EXPECT_LE(std::abs(bearing), 5.0 * kPi / 180.0) << "seed " << seed << " step " << t;
    }
  }
}

TEST(Mppi, EnclosedRobotStops) {
  const OccupancyGrid grid = uniform_grid(CellState::Occupied);
  MppiPlanner planner(ramp_settings(), 1);
  const PlanResult plan = planner.plan({{0.0, 0.0}, 0.0}, {}, {&grid, {}, {20.0, 0.0}});
  EXPECT_TRUE(plan.diagnostics.emergency_stop);
  EXPECT_EQ(plan.command, Control{});
  for (const auto& u : plan.sequence) EXPECT_EQ(u, Control{});
}

TEST(Mppi, SurroundedGoalIsNotEntered) {
  OccupancyGrid grid = uniform_grid(CellState::Free);
  const GridFrame& f = grid.frame();
  for (int j = 0; j < f.height; ++j)
    for (int i = 0; i < f.width; ++i)
      if ((f.cell_center(i, j) - Eigen::Vector2d(15.0, 0.0)).norm() < 4.0) grid.set(i, j, CellState::Occupied);
  MppiPlanner planner(ramp_settings(), 3);
  const PlanResult plan = planner.plan({{0.0, 0.0}, 0.0}, {}, {&grid, {}, {15.0, 0.0}});
  EXPECT_FALSE(plan.diagnostics.emergency_stop);
  EXPECT_EQ(plan.diagnostics.occupancy_hits, 0);
}

TEST(Mppi, DeterministicAcrossThreadCounts) {
  const OccupancyGrid grid = uniform_grid(CellState::Free);
  PlannerSettings one = ramp_settings(), three = ramp_settings();
  three.mppi.threads = 3;
  MppiPlanner a(one, 9), b(three, 9);
  const PlanningContext ctx{&grid, {}, {25.0, 5.0}};
  for (int k = 0; k < 3; ++k) {
    const PlanResult pa = a.plan({{0, 0}, 0.2}, {}, ctx);
    const PlanResult pb = b.plan({{0, 0}, 0.2}, {}, ctx);
    ASSERT_EQ(pa.sequence, pb.sequence);
  }
}

TEST(Mppi, WarmStartShiftsByOneStep) {
  const OccupancyGrid grid = uniform_grid(CellState::Free);
  MppiPlanner planner(ramp_settings(), 4);
  const PlanResult plan = planner.plan({{0, 0}, 0.0}, {}, {&grid, {}, {30.0, 0.0}});
  const auto& nominal = planner.nominal();
  ASSERT_EQ(nominal.size(), plan.sequence.size());
  for (std::size_t t = 0; t + 1 < nominal.size(); ++t) EXPECT_EQ(nominal[t], plan.sequence[t + 1]);
  EXPECT_EQ(nominal.back(), plan.sequence.back());
}

TEST(Mppi, PlannedControlsRespectLimits) {
  const OccupancyGrid grid = uniform_grid(CellState::Free);
  MppiPlanner planner(ramp_settings(), 5);
  const Control current{1.0, 1.5};
  const PlanResult plan = planner.plan({{0, 0}, 0.0}, current, {&grid, {}, {30.0, 10.0}});
  const PlatformSpec& p = planner.settings().platform;
  Control prev = current;
  for (const auto& u : plan.sequence) {
    EXPECT_LE(std::abs(u.left), p.max_wheel_speed + 1e-12);
    EXPECT_LE(std::abs(u.left - prev.left), p.max_wheel_accel * 0.05 + 1e-9);
    EXPECT_LE(std::abs(u.right - prev.right), p.max_wheel_accel * 0.05 + 1e-9);
    prev = u;
  }
}

TEST(Mppi, ImpenetrableUnknownIsAvoided) {
  OccupancyGrid grid = uniform_grid(CellState::Free);
  const GridFrame& f = grid.frame();
  for (int j = 0; j < f.height; ++j)
    for (int i = 0; i < f.width; ++i)
      if (f.cell_center(i, j).x() > 6.0) grid.set(i, j, CellState::Unknown);
  PlannerSettings s = ramp_settings();
  s.objective = Objective::FixedHorizon;
  s.unknown = UnknownPolicy::Impenetrable;
  s.risk_constraints = false;
  MppiPlanner planner(s, 6);
  PlanResult plan;
  for (int k = 0; k < 5; ++k) plan = planner.plan({{0, 0}, 0.0}, {}, {&grid, {}, {30.0, 0.0}});
  EXPECT_EQ(plan.diagnostics.occupancy_hits, 0);
  for (const auto& c : plan.best.classes) EXPECT_NE(c, CellState::Unknown);
}

TEST(Mppi, InvalidParamsRejected) {
  PlannerSettings s;
  s.mppi.samples = 0;
  EXPECT_THROW(MppiPlanner(s, 1), std::invalid_argument);
  s = {};
  s.mppi.temperature = 0.0;
  EXPECT_THROW(MppiPlanner(s, 1), std::invalid_argument);
  MppiPlanner planner(PlannerSettings{}, 1);
  EXPECT_THROW(planner.plan({}, {}, {}), std::invalid_argument);
}
