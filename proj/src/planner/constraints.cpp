#include "ramp/planner/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ramp/config.hpp"

namespace ramp {

void ConstraintParams::validate() const {
  if (!(slope_turn_min > 0.0 && slope_turn_min < max_slope)) {
    throw std::invalid_argument("ConstraintParams: need 0 < slope_turn_min < max_slope");
  }
  if (!(max_heading_dev > 0.0 && max_heading_dev < 0.5 * kPi)) {
    throw std::invalid_argument("ConstraintParams: max_heading_dev must lie in (0, pi/2)");
  }
  if (!(centripetal_factor >= 1.0)) throw std::invalid_argument("ConstraintParams: centripetal_factor must be >= 1");
  if (!(penalty > 0.0)) throw std::invalid_argument("ConstraintParams: penalty must be > 0");
}

ConstraintParams constraint_params_from_config(const Config& c, ConstraintParams p) {
  p.max_slope = deg2rad(c.get_double("constraints.max_slope_deg", rad2deg(p.max_slope)));
  p.slope_turn_min = deg2rad(c.get_double("constraints.slope_turn_min_deg", rad2deg(p.slope_turn_min)));
  p.max_heading_dev = deg2rad(c.get_double("constraints.max_heading_dev_deg", rad2deg(p.max_heading_dev)));
  p.centripetal_factor = c.get_double("constraints.centripetal_factor", p.centripetal_factor);
  p.penalty = c.get_double("constraints.penalty", p.penalty);
  p.validate();
  return p;
}

double heading_deviation(double robot_yaw, double gradient_yaw) {
  return std::min(angle_distance(robot_yaw, gradient_yaw), angle_distance(robot_yaw - kPi, gradient_yaw));
}

bool slope_ok(double slope, const ConstraintParams& p) { return slope <= p.max_slope; }

bool heading_ok(double slope, double deviation, const ConstraintParams& p) {
  return (slope >= p.slope_turn_min ? deviation : 0.0) <= p.max_heading_dev;
}

double centripetal_limit(const ConstraintParams& p, const PlatformSpec& platform) {
  return p.centripetal_factor * platform.wheelbase * platform.gravity / (2.0 * platform.ground_clearance);
}

bool centripetal_ok(double speed, double radius, const ConstraintParams& p, const PlatformSpec& platform) {
  if (std::isinf(radius)) return true;
  if (radius <= 0.0) return speed == 0.0;
  return speed * speed / radius <= centripetal_limit(p, platform);
}

ConstraintReport evaluate_constraints(const Rollout& rollout, std::span<const Control> controls,
                                      const ConstraintTerrain& terrain, const ConstraintParams& params,
                                      const PlatformSpec& platform) {
  ConstraintReport report;
  const int n = rollout.last_index();
  report.flags.assign(rollout.states.size(), 0);
  for (int t = 1; t <= n; ++t) {
    const RobotState& x = rollout.states[static_cast<std::size_t>(t)];
    std::uint8_t flags = 0;
    if (t - 1 < static_cast<int>(controls.size())) {
      const Control& u = controls[static_cast<std::size_t>(t - 1)];
      if (!centripetal_ok(std::abs(linear_velocity(u)), turn_radius(u, platform), params, platform)) {
        flags |= kCentripetalViolation;
      }
    }
    const bool skip = terrain.skip_unknown && static_cast<std::size_t>(t) < rollout.classes.size() &&
                      rollout.classes[static_cast<std::size_t>(t)] == CellState::Unknown;
    if (terrain.slopes && !skip) {
      if (const auto c = terrain.slopes->cell_of(x.position)) {
        const double xi = terrain.slopes->slope(c->x(), c->y());
        const double gy = terrain.slopes->gradient_yaw(c->x(), c->y());
        if (!slope_ok(xi, params)) flags |= kSlopeViolation;
        if (!std::isnan(gy) && !heading_ok(xi, heading_deviation(x.yaw, gy), params)) flags |= kHeadingViolation;
      }
    }
    report.flags[static_cast<std::size_t>(t)] = flags;
    if (flags && t <= rollout.ttr) ++report.violations;
  }
  report.penalty = params.penalty * report.violations;
  return report;
}

}  // namespace ramp
