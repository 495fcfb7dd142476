#include "ramp/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "ramp/angles.hpp"
#include "ramp/config.hpp"

namespace ramp {

LidarSpec LidarSpec::default_spec() {
  LidarSpec spec;
  constexpr int kBeams = 16;
  for (int k = 0; k < kBeams; ++k) {
    spec.vertical_angles.push_back(deg2rad(-15.0 + 30.0 * k / (kBeams - 1)));
  }
  return spec;
}

void LidarSpec::validate() const {
  if (vertical_angles.size() < 2) throw std::invalid_argument("LidarSpec: need at least two vertical beams");
  if (!std::is_sorted(vertical_angles.begin(), vertical_angles.end())) {
    throw std::invalid_argument("LidarSpec: vertical angles must be ascending");
  }
  if (!(min_range >= 0.0 && min_range < max_range)) {
    throw std::invalid_argument("LidarSpec: require 0 <= min_range < max_range");
  }
  if (!(horizontal_resolution > 0.0)) throw std::invalid_argument("LidarSpec: horizontal resolution must be > 0");
  if (!(sensor_height >= 0.0)) throw std::invalid_argument("LidarSpec: sensor height must be >= 0");
}

int LidarSpec::horizontal_count() const {
  return std::max(1, static_cast<int>(std::lround(2.0 * kPi / horizontal_resolution)));
}

Pose3 pose_on_terrain(const HeightMap& map, const Eigen::Vector2d& p, double yaw, double normal_half_span) {
  const Eigen::Vector3d n = terrain_normal(map, p, normal_half_span);
  const Eigen::Vector3d heading(std::cos(yaw), std::sin(yaw), 0.0);
  const Eigen::Vector3d x_axis = (heading - heading.dot(n) * n).normalized();
  const Eigen::Vector3d y_axis = n.cross(x_axis);
  Pose3 pose;
  pose.rotation.col(0) = x_axis;
  pose.rotation.col(1) = y_axis;
  pose.rotation.col(2) = n;
  pose.position = Eigen::Vector3d(p.x(), p.y(), height_at(map, p));
  return pose;
}

Eigen::Vector3d sensor_origin(const Pose3& base, const LidarSpec& spec) {
  return base.position + base.rotation.col(2) * spec.sensor_height;
}

namespace {

double clearance(const HeightMap& map, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir, double t) {
  const Eigen::Vector3d p = origin + t * dir;
  return p.z() - height_at(map, p.head<2>());
}

// Refines a bracketed crossing: one bisection, then a secant step.
double refine_crossing(const HeightMap& map, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                       double t_above, double f_above, double t_below, double f_below) {
  const double t_mid = 0.5 * (t_above + t_below);
  const double f_mid = clearance(map, origin, dir, t_mid);
  if (f_mid <= 0.0) {
    t_below = t_mid;
    f_below = f_mid;
  } else {
    t_above = t_mid;
    f_above = f_mid;
  }
  const double denom = f_above - f_below;
  if (denom <= 0.0) return t_below;
  return t_above + (t_below - t_above) * f_above / denom;
}

}  // namespace

std::optional<double> march_ray(const HeightMap& map, const Eigen::Vector3d& origin,
                                const Eigen::Vector3d& direction, double max_range) {
  const double step = kRayStepFraction * map.resolution();
  if (!map.contains(origin.head<2>())) return std::nullopt;
  double f_prev = clearance(map, origin, direction, 0.0);
  if (f_prev <= 0.0) return 0.0;
  const auto n = static_cast<long>(std::floor(max_range / step));
  for (long k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) * step;
    const Eigen::Vector3d p = origin + t * direction;
    if (!map.contains(p.head<2>())) return std::nullopt;
    const double f = p.z() - height_at(map, p.head<2>());
    if (f <= 0.0) {
      const double hit = refine_crossing(map, origin, direction, static_cast<double>(k - 1) * step, f_prev, t, f);
      if (hit > max_range) return std::nullopt;
      return hit;
    }
    f_prev = f;
  }
  return std::nullopt;
}

HeightBlocks::HeightBlocks(const HeightMap& map, int block_cells)
    : map_(&map), block_cells_(block_cells), global_max_(map.max_elevation()) {
  if (block_cells < 1) throw std::invalid_argument("HeightBlocks: block size must be >= 1");
  const Eigen::Index bw = (map.width() + block_cells - 1) / block_cells;
  const Eigen::Index bh = (map.height() + block_cells - 1) / block_cells;
  block_max_.resize(bw, bh);
  // Bilinear samples inside a block read one ring of neighbouring cells.
  for (Eigen::Index bj = 0; bj < bh; ++bj) {
    for (Eigen::Index bi = 0; bi < bw; ++bi) {
      const Eigen::Index i0 = std::max<Eigen::Index>(bi * block_cells - 1, 0);
      const Eigen::Index j0 = std::max<Eigen::Index>(bj * block_cells - 1, 0);
      const Eigen::Index i1 = std::min<Eigen::Index>((bi + 1) * block_cells + 1, map.width());
      const Eigen::Index j1 = std::min<Eigen::Index>((bj + 1) * block_cells + 1, map.height());
      block_max_(bi, bj) = map.elevation().block(i0, j0, i1 - i0, j1 - j0).maxCoeff();
    }
  }
}

std::optional<double> HeightBlocks::march(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction,
                                          double max_range) const {
  const HeightMap& map = *map_;
  const double step = kRayStepFraction * map.resolution();
  if (!map.contains(origin.head<2>())) return std::nullopt;
  if (clearance(map, origin, direction, 0.0) <= 0.0) return 0.0;
  const auto n = static_cast<long>(std::floor(max_range / step));
  const double block_size = block_cells_ * map.resolution();
  const Eigen::Vector2d o2 = origin.head<2>();
  const Eigen::Vector2d d2 = direction.head<2>();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Invariant: the sample at k - 1 is above the terrain.
  long k = 1;
  while (k <= n) {
    const double t = static_cast<double>(k) * step;
    const Eigen::Vector3d p = origin + t * direction;
    if (!map.contains(p.head<2>())) return std::nullopt;
    if (direction.z() >= 0.0 && p.z() > global_max_) return std::nullopt;

    const Eigen::Vector2d rel = (p.head<2>() - map.origin()) / block_size;
    const auto bi = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(rel.x())), 0, block_max_.rows() - 1);
    const auto bj = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(rel.y())), 0, block_max_.cols() - 1);
    double t_exit = kInf;
    for (int axis = 0; axis < 2; ++axis) {
      if (d2[axis] == 0.0) continue;
      const double lo = map.origin()[axis] + block_size * static_cast<double>(axis == 0 ? bi : bj);
      const double bound = d2[axis] > 0.0 ? lo + block_size : lo;
      t_exit = std::min(t_exit, (bound - o2[axis]) / d2[axis]);
    }
    t_exit = std::min(t_exit, max_range);
    const double z_exit = origin.z() + t_exit * direction.z();
    if (std::min(p.z(), z_exit) > block_max_(bi, bj)) {
      k = std::max(k + 1, static_cast<long>(std::floor(t_exit / step)));
      continue;
    }
    const double f = p.z() - height_at(map, p.head<2>());
    if (f <= 0.0) {
      const double t_prev = static_cast<double>(k - 1) * step;
      const double hit = refine_crossing(map, origin, direction, t_prev, clearance(map, origin, direction, t_prev), t, f);
      if (hit > max_range) return std::nullopt;
      return hit;
    }
    ++k;
  }
  return std::nullopt;
}

std::vector<Eigen::Vector3d> scan(const HeightBlocks& terrain, const Pose3& base, const LidarSpec& spec) {
  spec.validate();
  const Eigen::Vector3d origin = sensor_origin(base, spec);
  const int n_h = spec.horizontal_count();
  std::vector<Eigen::Vector3d> points;
  points.reserve(spec.vertical_angles.size() * static_cast<std::size_t>(n_h) / 2);
  for (const double elevation : spec.vertical_angles) {
    const double ce = std::cos(elevation), se = std::sin(elevation);
    for (int h = 0; h < n_h; ++h) {
      const double az = h * spec.horizontal_resolution;
      const Eigen::Vector3d body(ce * std::cos(az), ce * std::sin(az), se);
      const Eigen::Vector3d dir = base.rotation * body;
      const auto hit = terrain.march(origin, dir, spec.max_range);
      if (!hit || *hit < spec.min_range) continue;
      points.push_back(origin + *hit * dir);
    }
  }
  return points;
}

std::vector<Eigen::Vector3d> scan(const HeightMap& map, const Pose3& base, const LidarSpec& spec) {
  return scan(HeightBlocks(map), base, spec);
}

LabeledCloud classify(const std::vector<Eigen::Vector3d>& points, const ClassifierParams& params) {
  const double bin = params.max_spread;
  auto key = [](std::int64_t bx, std::int64_t by) { return (bx << 32) ^ (by & 0xffffffff); };
  std::unordered_map<std::int64_t, std::vector<std::size_t>> bins;
  std::vector<std::pair<std::int64_t, std::int64_t>> cell(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto bx = static_cast<std::int64_t>(std::floor(points[i].x() / bin));
    const auto by = static_cast<std::int64_t>(std::floor(points[i].y() / bin));
    cell[i] = {bx, by};
    bins[key(bx, by)].push_back(i);
  }
  const double spread2 = params.max_spread * params.max_spread;
  LabeledCloud out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector3d& p = points[i];
    bool obstacle = false;
    for (std::int64_t dx = -1; dx <= 1 && !obstacle; ++dx) {
      for (std::int64_t dy = -1; dy <= 1 && !obstacle; ++dy) {
        const auto it = bins.find(key(cell[i].first + dx, cell[i].second + dy));
        if (it == bins.end()) continue;
        for (const std::size_t j : it->second) {
          const Eigen::Vector3d& q = points[j];
          if ((p.head<2>() - q.head<2>()).squaredNorm() < spread2 && p.z() - q.z() > params.step_height) {
            obstacle = true;
            break;
          }
        }
      }
    }
    out[i] = {p, obstacle ? PointLabel::Obstacle : PointLabel::Ground};
  }
  return out;
}

LidarSpec lidar_spec_from_config(const Config& c, LidarSpec s) {
  s.sensor_height = c.get_double("lidar.sensor_height", s.sensor_height);
  if (c.contains("lidar.vertical_angles_deg")) {
    s.vertical_angles.clear();
    for (double deg : c.get_doubles("lidar.vertical_angles_deg", {})) s.vertical_angles.push_back(deg2rad(deg));
  } else if (c.contains("lidar.beams")) {
    const int beams = c.get_int("lidar.beams", 16);
    const double lo = c.get_double("lidar.min_angle_deg", -15.0);
    const double hi = c.get_double("lidar.max_angle_deg", 15.0);
    s.vertical_angles.clear();
    for (int k = 0; k < beams; ++k) {
      s.vertical_angles.push_back(deg2rad(lo + (hi - lo) * k / std::max(1, beams - 1)));
    }
  }
  s.horizontal_resolution =
      deg2rad(c.get_double("lidar.horizontal_resolution_deg", rad2deg(s.horizontal_resolution)));
  s.max_range = c.get_double("lidar.max_range", s.max_range);
  s.min_range = c.get_double("lidar.min_range", s.min_range);
  s.validate();
  return s;
}

ClassifierParams classifier_params_from_config(const Config& c, ClassifierParams p) {
  p.step_height = c.get_double("classifier.step_height", p.step_height);
  p.max_spread = c.get_double("classifier.max_spread", p.max_spread);
  return p;
}

void write_cloud_csv(std::ostream& out, const CloudFrame& frame) {
  out << std::setprecision(9);
  if (frame.sensor) {
    out << "# sensor " << frame.sensor->x() << ' ' << frame.sensor->y() << ' ' << frame.sensor->z() << '\n';
  }
  out << "# stamp " << frame.stamp << '\n';
  out << "x,y,z,label\n";
  for (const auto& pt : frame.cloud) {
    out << pt.position.x() << ',' << pt.position.y() << ',' << pt.position.z() << ','
        << (pt.label == PointLabel::Obstacle ? "obstacle" : "ground") << '\n';
  }
}

CloudFrame read_cloud_csv(std::istream& in) {
  CloudFrame frame;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string tag;
      ss >> tag;
      if (tag == "sensor") {
        Eigen::Vector3d s;
        if (ss >> s.x() >> s.y() >> s.z()) frame.sensor = s;
      } else if (tag == "stamp") {
        ss >> frame.stamp;
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("x,", 0) == 0) continue;
    }
    std::istringstream ss(line);
    std::string field;
    LabeledPoint pt;
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(ss, field, ',')) throw std::runtime_error("read_cloud_csv: short row '" + line + "'");
      pt.position[k] = std::stod(field);
    }
    if (!std::getline(ss, field)) throw std::runtime_error("read_cloud_csv: missing label in '" + line + "'");
    if (field == "ground") {
      pt.label = PointLabel::Ground;
    } else if (field == "obstacle") {
      pt.label = PointLabel::Obstacle;
    } else {
      throw std::runtime_error("read_cloud_csv: unknown label '" + field + "'");
    }
    frame.cloud.push_back(pt);
  }
  return frame;
}

}  // namespace ramp
