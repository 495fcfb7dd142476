// Hand-computed cases for the three terrain risk inequalities.
#pragma once

#include <limits>

namespace tables {

struct SlopeCase {
  double slope_deg;
  bool ok;  // slope <= 45 deg
};

inline constexpr SlopeCase kSlope[] = {
    {0.0, true},   {10.0, true}, {20.0, true}, {30.0, true}, {44.9, true},
    {45.0, true},  {45.1, false}, {50.0, false}, {60.0, false}, {89.0, false},
};

struct HeadingCase {
  double robot_yaw_deg;
  double gradient_yaw_deg;
  double slope_deg;
  double deviation_deg;  // expected two-branch deviation
  bool ok;               // deviation * [slope >= 15] <= 30
};

inline constexpr HeadingCase kHeading[] = {
    {0.0, 0.0, 30.0, 0.0, true},        // straight uphill
    {170.0, 0.0, 20.0, 10.0, true},     // nearly straight downhill
    {90.0, 0.0, 20.0, 90.0, false},     // traverse
    {-170.0, 170.0, 25.0, 20.0, true},  // wraps across +-180
    {45.0, -135.0, 40.0, 0.0, true},    // exactly downhill
    {30.0, 0.0, 30.0, 30.0, true},      // on the limit
    {31.0, 0.0, 15.0, 31.0, false},     // activation threshold is inclusive
    {-60.0, 0.0, 14.9, 60.0, true},     // below the activation slope
    {120.0, 0.0, 16.0, 60.0, false},    // downhill branch, still too far
    {179.0, -179.0, 35.0, 2.0, true},   // wraps, uphill branch
};

struct CentripetalCase {
  double speed;
  double radius;
  double wheelbase;
  double clearance;
  double factor;
  bool ok;  // speed^2 / radius <= factor * wheelbase * 9.81 / (2 * clearance)
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline constexpr CentripetalCase kCentripetal[] = {
    {3.0, 1.0, 1.0, 0.5, 1.0, true},     // 9 <= 9.81
    {3.2, 1.0, 1.0, 0.5, 1.0, false},    // 10.24 > 9.81
    {0.0, 0.0, 1.0, 0.5, 1.0, true},     // spin in place
    {5.0, kInf, 1.0, 0.5, 1.0, true},    // straight
    {5.0, 2.5, 1.0, 0.5, 1.0, false},    // 10
    {5.0, 2.6, 1.0, 0.5, 1.0, true},     // 9.615
    {1.0, 0.1, 1.0, 0.5, 1.0, false},    // 10
    {2.0, 0.5, 1.0, 0.5, 1.0, true},     // 8
    {4.0, 1.0, 1.0, 0.5, 2.0, true},     // 16 <= 19.62
    {2.5, 1.0, 0.5, 0.5, 1.0, false},    // 6.25 > 4.905
};

}  // namespace tables
