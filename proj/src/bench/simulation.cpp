#include <cmath>
#include <ostream>

#include "ramp/bench.hpp"

namespace ramp {

bool TipMonitor::update(const RobotState& state, const Control& applied, const SlopeField& slopes, double dt) {
  if (!centripetal_ok(std::abs(linear_velocity(applied)), turn_radius(applied, platform_), params_, platform_)) {
    return true;
  }
  bool violating = false;
  if (const auto c = slopes.cell_of(state.position)) {
    const double xi = slopes.slope(c->x(), c->y());
    const double gy = slopes.gradient_yaw(c->x(), c->y());
    violating = !std::isnan(gy) && !heading_ok(xi, heading_deviation(state.yaw, gy), params_);
  }
  held_ = violating ? held_ + dt : 0.0;
  return held_ > dwell_ + 1e-9;
}

bool tip_over_check(std::span<const RobotState> states, std::span<const Control> controls, const SlopeField& slopes,
                    const ConstraintParams& params, const PlatformSpec& platform, double dt, double dwell) {
  TipMonitor monitor(params, platform, dwell);
  for (std::size_t t = 0; t + 1 < states.size() && t < controls.size(); ++t) {
    if (monitor.update(states[t + 1], controls[t], slopes, dt)) return true;
  }
  return false;
}

namespace {

void clear_disc(OccupancyGrid& grid, const Eigen::Vector2d& center, double radius) {
  const GridFrame& f = grid.frame();
  for (int j = 0; j < f.height; ++j) {
    for (int i = 0; i < f.width; ++i) {
      if (grid.at(i, j) == CellState::Unknown && (f.cell_center(i, j) - center).norm() <= radius) {
        grid.set(i, j, CellState::Free);
      }
    }
  }
}

}  // namespace

TrialResult run_trial(const BenchConfig& bench, const PipelineConfig& pipeline, std::uint64_t seed,
                      const TrialOutputs& outputs) {
  TerrainSpec spec = bench.terrain;
  spec.seed = seed;
  const Terrain terrain = generate_terrain(spec);
  const HeightBlocks blocks(terrain.map);
  const SlopeField slopes = compute_slope_field(terrain.map);

  PlannerSettings settings;
  settings.objective = pipeline.planner;
  settings.unknown = pipeline.unknown;
  settings.risk_constraints = pipeline.risk_constraints;
  settings.cost = pipeline.cost;
  settings.constraints = pipeline.constraints;
  settings.platform = bench.platform;
  settings.mppi = bench.mppi;
  MppiPlanner planner(settings, seed);

  const double dt = pipeline.cost.dt();
  const int scan_every = std::max(1, static_cast<int>(std::lround(pipeline.cost.frequency / bench.scan_rate)));
  const int max_steps = static_cast<int>(std::ceil(bench.timeout / dt - 1e-9));
  const int estop_steps = static_cast<int>(std::ceil(bench.estop_timeout / dt - 1e-9));
  const int stall_steps = static_cast<int>(std::ceil(bench.stall_timeout / dt - 1e-9));
  const Eigen::Vector2d goal = terrain.layout.goal;
  const double margin = bench.platform.body_radius + 1.0;
  const Eigen::Vector2d lo = terrain.map.origin().array() + margin;
  const Eigen::Vector2d hi = terrain.map.extent_max().array() - margin;

  MapMemory memory(bench.memory_window);
  OccupancyGrid map;
  TipMonitor tip(pipeline.constraints, bench.platform, bench.tip_dwell);
  RobotState state{terrain.layout.start, 0.0};
  Control applied;
  int estop_held = 0;
  Eigen::Vector2d stall_anchor = state.position;
  int stall_since = 0;

  TrialResult result;
  result.seed = seed;
  result.outcome = Outcome::Timeout;
  if (outputs.trajectory) *outputs.trajectory << "time,x,y,yaw,speed,cell\n";
  if (outputs.diagnostics) write_diagnostics_header(*outputs.diagnostics);

  for (int k = 0; k < max_steps; ++k) {
    const double now = k * dt;
    if (k % scan_every == 0) {
      const Pose3 pose = pose_on_terrain(terrain.map, state.position, state.yaw);
      const LabeledCloud cloud = classify(scan(blocks, pose, bench.lidar), bench.classifier);
      const GridFrame frame = GridFrame::centered(state.position, bench.map_size, bench.map_size,
                                                  bench.terrain.resolution);
      OccupancyGrid raw = pipeline.mapper == MapperKind::GroundInflation
                              ? inflate(cloud, frame, bench.inflation, now)
                              : raytrace(cloud, sensor_origin(pose, bench.lidar).head<2>(), frame, now);
      if (k == 0) clear_disc(raw, state.position, bench.start_clear_radius);
      map = fuse(memory, raw);
    }

    const PlanningContext context{&map, {&slopes, true}, goal};
    const PlanResult plan = planner.plan(state, applied, context);
    if (outputs.diagnostics) write_diagnostics_row(*outputs.diagnostics, now, plan.diagnostics);
    estop_held = plan.diagnostics.emergency_stop ? estop_held + 1 : 0;

    applied = rate_limit(plan.command, applied, dt, bench.platform);
    const CellState cell = map.at_world(state.position);
    const double speed = std::abs(linear_velocity(applied));
    if (outputs.trajectory) {
      *outputs.trajectory << now << ',' << state.position.x() << ',' << state.position.y() << ',' << state.yaw << ','
                          << speed << ',' << to_char(cell) << '\n';
    }
    state = step(state, applied, dt, bench.platform);
    result.elapsed = now + dt;
    result.distance += speed * dt;
    if (cell == CellState::Unknown) {
      result.unknown_time += dt;
      result.unknown_distance += speed * dt;
    }

    if (hits_obstacle(terrain, state.position, bench.platform.body_radius)) {
      result.outcome = Outcome::CollidedWithRock;
      break;
    }
    if (tip.update(state, applied, slopes, dt)) {
      result.outcome = Outcome::TippedOver;
      break;
    }
    if ((state.position - goal).norm() <= pipeline.cost.goal_radius) {
      result.outcome = Outcome::ReachedGoal;
      break;
    }
    if ((state.position.array() < lo.array()).any() || (state.position.array() > hi.array()).any()) break;
    if (estop_held > estop_steps) break;
    if ((state.position - stall_anchor).norm() > bench.stall_distance) {
      stall_anchor = state.position;
      stall_since = k + 1;
    } else if (k + 1 - stall_since >= stall_steps) {
      break;
    }
  }
  if (outputs.final_grid) write_grid(*outputs.final_grid, map);
  return result;
}

}  // namespace ramp
