#include "ramp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ramp/angles.hpp"
#include "ramp/config.hpp"

namespace ramp {

void PlatformSpec::validate() const {
  if (!(track_width > 0 && wheelbase > 0 && ground_clearance > 0 && max_wheel_speed > 0 && max_wheel_accel > 0 &&
        gravity > 0 && body_radius > 0)) {
    throw std::invalid_argument("PlatformSpec: all fields must be positive");
  }
}

PlatformSpec platform_spec_from_config(const Config& c, PlatformSpec p) {
  p.track_width = c.get_double("platform.track_width", p.track_width);
  p.wheelbase = c.get_double("platform.wheelbase", p.wheelbase);
  p.ground_clearance = c.get_double("platform.ground_clearance", p.ground_clearance);
  p.max_wheel_speed = c.get_double("platform.max_wheel_speed", p.max_wheel_speed);
  p.max_wheel_accel = c.get_double("platform.max_wheel_accel", p.max_wheel_accel);
  p.gravity = c.get_double("platform.gravity", p.gravity);
  p.body_radius = c.get_double("platform.body_radius", p.body_radius);
  p.validate();
  return p;
}

RobotState step(const RobotState& x, const Control& u, double dt, const PlatformSpec& platform) {
  const double v = linear_velocity(u);
  const double omega = yaw_rate(u, platform);
  RobotState next;
  next.position = x.position + dt * v * Eigen::Vector2d(std::cos(x.yaw), std::sin(x.yaw));
  next.yaw = wrap_angle(x.yaw + dt * omega);
  return next;
}

double turn_radius(const Control& u, const PlatformSpec& platform) {
  const double omega = std::abs(yaw_rate(u, platform));
  if (omega <= kStraightYawRate) return kStraightLine;
  return std::abs(linear_velocity(u)) / omega;
}

Control saturate(const Control& u, const PlatformSpec& platform) {
  const double m = platform.max_wheel_speed;
  return {std::clamp(u.left, -m, m), std::clamp(u.right, -m, m)};
}

Control rate_limit(const Control& desired, const Control& previous, double dt, const PlatformSpec& platform) {
  const Control target = saturate(desired, platform);
  const double dv = platform.max_wheel_accel * dt;
  return {std::clamp(target.left, previous.left - dv, previous.left + dv),
          std::clamp(target.right, previous.right - dv, previous.right + dv)};
}

}  // namespace ramp
