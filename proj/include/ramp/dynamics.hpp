#pragma once

#include <Eigen/Core>

#include <limits>

namespace ramp {

class Config;

/// Planar robot state: position and yaw in (-pi, pi].
struct RobotState {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double yaw = 0.0;
};

/// Skid-steer wheel velocities, m/s.
struct Control {
  double left = 0.0;
  double right = 0.0;

  bool operator==(const Control&) const = default;
};

struct PlatformSpec {
  double track_width = 1.0;       ///< lateral wheel separation, m
  double wheelbase = 1.0;         ///< W in the centripetal tipping limit, m
  double ground_clearance = 0.5;  ///< h in the centripetal tipping limit, m
  double max_wheel_speed = 5.0;   ///< m/s
  double max_wheel_accel = 4.0;   ///< m/s^2 per wheel
  double gravity = 9.81;
  double body_radius = 0.5;  ///< collision footprint radius, m

  void validate() const;
};

PlatformSpec platform_spec_from_config(const Config& config, PlatformSpec base = {});

inline double linear_velocity(const Control& u) { return 0.5 * (u.left + u.right); }
inline double yaw_rate(const Control& u, const PlatformSpec& platform) {
  return (u.right - u.left) / platform.track_width;
}

/// One forward-Euler step of the kinematic skid-steer model.
RobotState step(const RobotState& x, const Control& u, double dt, const PlatformSpec& platform);

/// Yaw rates below this give the straight-line radius.
inline constexpr double kStraightYawRate = 1e-9;
inline constexpr double kStraightLine = std::numeric_limits<double>::infinity();

/// |v| / |omega|, or kStraightLine when not turning.
double turn_radius(const Control& u, const PlatformSpec& platform);

/// Clamps both wheels to +-max_wheel_speed.
Control saturate(const Control& u, const PlatformSpec& platform);

/// Saturates `desired` and limits each wheel's change from `previous` to
/// max_wheel_accel * dt.
Control rate_limit(const Control& desired, const Control& previous, double dt, const PlatformSpec& platform);

}  // namespace ramp
