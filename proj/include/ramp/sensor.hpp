#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <iosfwd>
#include <optional>
#include <vector>

#include "ramp/terrain.hpp"

namespace ramp {

class Config;

struct LidarSpec {
  double sensor_height = 0.8;              ///< above the robot base, along the body z axis
  std::vector<double> vertical_angles;     ///< rad, ascending
  double horizontal_resolution = 0.0087266462599716477;  ///< 0.5 deg
  double max_range = 50.0;
  double min_range = 1.0;  ///< self-hit mask radius

  /// 16 beams evenly spread over [-15, +15] deg.
  static LidarSpec default_spec();
  void validate() const;
  int horizontal_count() const;
};

/// Rigid body pose; `rotation` maps body coordinates into the world frame.
struct Pose3 {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
};

/// Robot base resting on the terrain at (p, yaw), tilted to the local normal.
Pose3 pose_on_terrain(const HeightMap& map, const Eigen::Vector2d& p, double yaw,
                      double normal_half_span = 0.5);

Eigen::Vector3d sensor_origin(const Pose3& base, const LidarSpec& spec);

/// Ray-marching step as a fraction of the map resolution.
inline constexpr double kRayStepFraction = 0.5;

/// First crossing of the ray with the elevation field within [0, max_range],
/// marched at fixed steps with one bisection refinement. Returns the hit
/// distance along the (unit) direction.
std::optional<double> march_ray(const HeightMap& map, const Eigen::Vector3d& origin,
                                const Eigen::Vector3d& direction, double max_range);

/// Acceleration structure: per-block maxima of the elevation field. Lets the
/// ray marcher skip blocks the ray passes over; results match `march_ray`.
class HeightBlocks {
 public:
  explicit HeightBlocks(const HeightMap& map, int block_cells = 8);

  const HeightMap& map() const { return *map_; }
  std::optional<double> march(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction,
                              double max_range) const;

 private:
  const HeightMap* map_;
  int block_cells_;
  Eigen::MatrixXd block_max_;
  double global_max_;
};

/// Simulated scan in the world frame. Beams whose first hit is nearer than
/// min_range are masked; beams leaving the map or exceeding max_range give
/// no point.
std::vector<Eigen::Vector3d> scan(const HeightBlocks& terrain, const Pose3& base, const LidarSpec& spec);
std::vector<Eigen::Vector3d> scan(const HeightMap& map, const Pose3& base, const LidarSpec& spec);

enum class PointLabel : unsigned char { Ground = 0, Obstacle = 1 };

struct LabeledPoint {
  Eigen::Vector3d position;
  PointLabel label = PointLabel::Ground;
};

using LabeledCloud = std::vector<LabeledPoint>;

struct ClassifierParams {
  double step_height = 0.3;  ///< minimum rise flagged as an obstacle, m
  double max_spread = 0.4;   ///< horizontal distance the rise must occur within, m
};

/// Geometric classifier: a point is an Obstacle when some other point lies
/// less than `max_spread` away horizontally and more than `step_height`
/// below it. Candidates are gathered from a 2D bin grid with bins of size
/// `max_spread` (own bin plus 8 neighbours).
LabeledCloud classify(const std::vector<Eigen::Vector3d>& points, const ClassifierParams& params = {});

LidarSpec lidar_spec_from_config(const Config& config, LidarSpec base = LidarSpec::default_spec());
ClassifierParams classifier_params_from_config(const Config& config, ClassifierParams base = {});

/// CSV with header `x,y,z,label`, label in {ground, obstacle}. An optional
/// `# sensor x y z` and `# stamp t` comment line carry the scan metadata.
struct CloudFrame {
  LabeledCloud cloud;
  std::optional<Eigen::Vector3d> sensor;
  double stamp = 0.0;
};

void write_cloud_csv(std::ostream& out, const CloudFrame& frame);
CloudFrame read_cloud_csv(std::istream& in);

}  // namespace ramp
