#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ramp/angles.hpp"
#include "ramp/dynamics.hpp"
#include "ramp/mapping.hpp"
#include "ramp/planner/cost.hpp"
#include "ramp/terrain.hpp"

namespace ramp {

class Config;

struct ConstraintParams {
  double max_slope = deg2rad(45.0);           ///< lambda_1
  double slope_turn_min = deg2rad(15.0);      ///< xi_min
  double max_heading_dev = deg2rad(30.0);     ///< lambda_2
  double centripetal_factor = 1.0;            ///< lambda_3
  double penalty = 1e6;                       ///< per violating step

  void validate() const;
};

ConstraintParams constraint_params_from_config(const Config& config, ConstraintParams base = {});

/// Smaller of the deviations from the ascent and descent directions, in
/// [0, pi/2].
double heading_deviation(double robot_yaw, double gradient_yaw);

bool slope_ok(double slope, const ConstraintParams& p);
bool heading_ok(double slope, double deviation, const ConstraintParams& p);
/// W g / (2 h) scaled by lambda_3.
double centripetal_limit(const ConstraintParams& p, const PlatformSpec& platform);
bool centripetal_ok(double speed, double radius, const ConstraintParams& p, const PlatformSpec& platform);

enum ViolationFlag : std::uint8_t {
  kSlopeViolation = 1,
  kHeadingViolation = 2,
  kCentripetalViolation = 4,
};

/// Slope layer as seen by the planner. With `skip_unknown`, slope and heading
/// checks are skipped on states the rollout classified as Unknown.
struct ConstraintTerrain {
  const SlopeField* slopes = nullptr;
  bool skip_unknown = true;
};

struct ConstraintReport {
  std::vector<std::uint8_t> flags;  ///< per state, index 0 always clear
  int violations = 0;               ///< violating steps up to the rollout's TTR
  double penalty = 0.0;
};

/// Checks states 1..N of `rollout`; state t is reached under controls[t-1],
/// which sets its turn radius. Steps past the rollout's TTR are flagged but
/// not penalized.
ConstraintReport evaluate_constraints(const Rollout& rollout, std::span<const Control> controls,
                                      const ConstraintTerrain& terrain, const ConstraintParams& params,
                                      const PlatformSpec& platform);

}  // namespace ramp
