#include "ramp/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "ramp/angles.hpp"

namespace ramp {

HeightMap::HeightMap(const Eigen::Vector2d& origin, double resolution, Eigen::Index width,
                     Eigen::Index height, double fill)
    : origin_(origin), resolution_(resolution), elevation_(Eigen::MatrixXd::Constant(width, height, fill)) {
  if (!(resolution > 0.0)) throw std::invalid_argument("HeightMap: resolution must be positive");
  if (width < 1 || height < 1) throw std::invalid_argument("HeightMap: empty grid");
}

bool HeightMap::contains(const Eigen::Vector2d& p) const {
  const Eigen::Vector2d hi = extent_max();
  return p.x() >= origin_.x() && p.y() >= origin_.y() && p.x() <= hi.x() && p.y() <= hi.y();
}

std::optional<Eigen::Vector2i> HeightMap::cell_of(const Eigen::Vector2d& p) const {
  const Eigen::Vector2d rel = (p - origin_) / resolution_;
  const int i = static_cast<int>(std::floor(rel.x()));
  const int j = static_cast<int>(std::floor(rel.y()));
  if (i < 0 || j < 0 || i >= width() || j >= height()) return std::nullopt;
  return Eigen::Vector2i(i, j);
}

namespace {

// Splits a continuous cell-center coordinate into a base index and fraction,
// clamped so that the 2x2 stencil stays inside [0, n).
void split_coordinate(double u, Eigen::Index n, Eigen::Index& i0, double& frac) {
  if (n == 1) {
    i0 = 0;
    frac = 0.0;
    return;
  }
  u = std::clamp(u, 0.0, static_cast<double>(n - 1));
  i0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(u)), n - 2);
  frac = u - static_cast<double>(i0);
}

}  // namespace

double height_at(const HeightMap& map, const Eigen::Vector2d& p) {
  if (!map.contains(p)) {
    throw OutOfBounds("height_at: (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                      ") is outside the map");
  }
  const Eigen::Vector2d rel = (p - map.origin()) / map.resolution() - Eigen::Vector2d::Constant(0.5);
  Eigen::Index i0 = 0, j0 = 0;
  double fx = 0.0, fy = 0.0;
  split_coordinate(rel.x(), map.width(), i0, fx);
  split_coordinate(rel.y(), map.height(), j0, fy);
  const auto& z = map.elevation();
  const Eigen::Index i1 = std::min(i0 + 1, map.width() - 1);
  const Eigen::Index j1 = std::min(j0 + 1, map.height() - 1);
  const double lower = (1.0 - fx) * z(i0, j0) + fx * z(i1, j0);
  const double upper = (1.0 - fx) * z(i0, j1) + fx * z(i1, j1);
  return (1.0 - fy) * lower + fy * upper;
}

GradientSample gradient_at(const HeightMap& map, const Eigen::Vector2d& p) {
  const double h = map.resolution();
  const double center = height_at(map, p);
  GradientSample out;
  for (int axis = 0; axis < 2; ++axis) {
    Eigen::Vector2d step = Eigen::Vector2d::Zero();
    step[axis] = h;
    const bool fwd = map.contains(p + step);
    const bool bwd = map.contains(p - step);
    if (fwd && bwd) {
      out.gradient[axis] = (height_at(map, p + step) - height_at(map, p - step)) / (2.0 * h);
    } else if (fwd) {
      out.gradient[axis] = (height_at(map, p + step) - center) / h;
      out.one_sided = true;
    } else if (bwd) {
      out.gradient[axis] = (center - height_at(map, p - step)) / h;
      out.one_sided = true;
    } else {
      out.gradient[axis] = 0.0;
      out.one_sided = true;
    }
  }
  return out;
}

SlopeSample slope_at(const HeightMap& map, const Eigen::Vector2d& p) {
  const GradientSample g = gradient_at(map, p);
  return {std::atan(g.gradient.norm()), g.one_sided};
}

std::optional<double> gradient_yaw_at(const HeightMap& map, const Eigen::Vector2d& p) {
  const Eigen::Vector2d g = gradient_at(map, p).gradient;
  if (g.norm() < kFlatGradientThreshold) return std::nullopt;
  return wrap_angle(std::atan2(g.y(), g.x()));
}

Eigen::Vector3d terrain_normal(const HeightMap& map, const Eigen::Vector2d& p, double half_span) {
  auto sample = [&](const Eigen::Vector2d& q) {
    const Eigen::Vector2d lo = map.origin();
    const Eigen::Vector2d hi = map.extent_max();
    return height_at(map, q.cwiseMax(lo).cwiseMin(hi));
  };
  const Eigen::Vector2d dx(half_span, 0.0);
  const Eigen::Vector2d dy(0.0, half_span);
  const double gx = (sample(p + dx) - sample(p - dx)) / (2.0 * half_span);
  const double gy = (sample(p + dy) - sample(p - dy)) / (2.0 * half_span);
  return Eigen::Vector3d(-gx, -gy, 1.0).normalized();
}

std::optional<Eigen::Vector2i> SlopeField::cell_of(const Eigen::Vector2d& p) const {
  const Eigen::Vector2d rel = (p - origin) / resolution;
  const int i = static_cast<int>(std::floor(rel.x()));
  const int j = static_cast<int>(std::floor(rel.y()));
  if (i < 0 || j < 0 || i >= slope.rows() || j >= slope.cols()) return std::nullopt;
  return Eigen::Vector2i(i, j);
}

SlopeField compute_slope_field(const HeightMap& map) {
  const Eigen::Index w = map.width();
  const Eigen::Index h = map.height();
  const auto& z = map.elevation();
  const double res = map.resolution();
  SlopeField field;
  field.origin = map.origin();
  field.resolution = res;
  field.slope.resize(w, h);
  field.gradient_yaw.resize(w, h);
  for (Eigen::Index j = 0; j < h; ++j) {
    for (Eigen::Index i = 0; i < w; ++i) {
      const Eigen::Index il = std::max<Eigen::Index>(i - 1, 0), ir = std::min(i + 1, w - 1);
      const Eigen::Index jl = std::max<Eigen::Index>(j - 1, 0), jr = std::min(j + 1, h - 1);
      const double gx = ir > il ? (z(ir, j) - z(il, j)) / (res * static_cast<double>(ir - il)) : 0.0;
      const double gy = jr > jl ? (z(i, jr) - z(i, jl)) / (res * static_cast<double>(jr - jl)) : 0.0;
      const double norm = std::hypot(gx, gy);
      field.slope(i, j) = std::atan(norm);
      field.gradient_yaw(i, j) = norm < kFlatGradientThreshold
                                     ? std::numeric_limits<double>::quiet_NaN()
                                     : wrap_angle(std::atan2(gy, gx));
    }
  }
  return field;
}

// ---------------------------------------------------------------------------

void TerrainSpec::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("TerrainSpec: " + what); };
  if (crest_height < 0.0) fail("crest_height must be >= 0");
  if (crest_height > 0.0 && !(slope_deg > 0.0 && slope_deg < 60.0)) fail("slope_deg must lie in (0, 60)");
  if (!(resolution > 0.0)) fail("resolution must be positive");
  if (rock_count < 0) fail("rock_count must be >= 0");
  if (rock_count > 0 && !(rock_radius_min > 0.0 && rock_radius_min <= rock_radius_max)) {
    fail("rock radius range must satisfy 0 < min <= max");
  }
  if (rock_height < 0.0) fail("rock_height must be >= 0");
  if (plateau_depth <= 0.0) fail("plateau_depth must be positive");
  if (taper_length < 0.0) fail("taper_length must be >= 0");
  if (size_x <= 0.0 || size_y <= 0.0) fail("map size must be positive");
}

TerrainLayout terrain_layout(const TerrainSpec& spec) {
  TerrainLayout layout;
  const double cy = 0.5 * spec.size_y;
  layout.start = Eigen::Vector2d(spec.start_x, cy);
  layout.hill_base_x = spec.start_x + spec.approach_length;
  if (spec.crest_height > 0.0) {
    layout.ramp_run = spec.crest_height / std::tan(deg2rad(spec.slope_deg));
    const double taper = std::min(spec.taper_length, layout.ramp_run);
    layout.crest_x = layout.hill_base_x + layout.ramp_run + taper;
  } else {
    layout.crest_x = layout.hill_base_x;
  }
  layout.plateau_rear_x = layout.crest_x + spec.plateau_depth;
  layout.goal = Eigen::Vector2d(layout.plateau_rear_x - spec.goal_offset, cy);
  return layout;
}

double hill_profile(const TerrainSpec& spec, const TerrainLayout& layout, double x) {
  if (spec.crest_height <= 0.0) return 0.0;
  const double tan_slope = std::tan(deg2rad(spec.slope_deg));
  const double run = layout.ramp_run;
  const double b = std::min(spec.taper_length, run);
  const double length = run + b;
  const double u = x - layout.hill_base_x;
  if (u <= 0.0) return 0.0;
  if (u >= length) return spec.crest_height;
  // Integral of a cosine-tapered slope window of unit height.
  auto taper_integral = [b](double s) {
    return b > 0.0 ? 0.5 * s - b / (2.0 * kPi) * std::sin(kPi * s / b) : 0.0;
  };
  if (u < b) return tan_slope * taper_integral(u);
  if (u <= length - b) return tan_slope * (0.5 * b + (u - b));
  return spec.crest_height - tan_slope * taper_integral(length - u);
}

namespace {

void stamp_disc(HeightMap& map, const Eigen::Vector2d& c, double r, double dz) {
  const double res = map.resolution();
  const auto lo = ((c.array() - r - map.origin().array()) / res).floor().cast<int>();
  const auto hi = ((c.array() + r - map.origin().array()) / res).floor().cast<int>();
  for (int j = std::max(0, lo.y()); j <= std::min<int>(hi.y(), map.height() - 1); ++j) {
    for (int i = std::max(0, lo.x()); i <= std::min<int>(hi.x(), map.width() - 1); ++i) {
      if ((map.cell_center(i, j) - c).squaredNorm() <= r * r) map.elevation()(i, j) += dz;
    }
  }
}

void stamp_box(HeightMap& map, const Structure& s) {
  for (Eigen::Index j = 0; j < map.height(); ++j) {
    for (Eigen::Index i = 0; i < map.width(); ++i) {
      const Eigen::Vector2d c = map.cell_center(i, j);
      if ((c.array() >= s.min_corner.array()).all() && (c.array() <= s.max_corner.array()).all()) {
        map.elevation()(i, j) += s.height;
      }
    }
  }
}

}  // namespace

Terrain generate_terrain(const TerrainSpec& spec) {
  spec.validate();
  Terrain terrain;
  terrain.layout = terrain_layout(spec);
  const auto& layout = terrain.layout;

  const auto w = static_cast<Eigen::Index>(std::llround(spec.size_x / spec.resolution));
  const auto h = static_cast<Eigen::Index>(std::llround(spec.size_y / spec.resolution));
  terrain.map = HeightMap(Eigen::Vector2d::Zero(), spec.resolution, w, h);
  for (Eigen::Index i = 0; i < w; ++i) {
    const double z = hill_profile(spec, layout, terrain.map.cell_center(i, 0).x());
    terrain.map.elevation().row(i).setConstant(z);
  }

  const double cy = 0.5 * spec.size_y;
  if (spec.structures) {
    const double pitch = spec.structure_width + spec.structure_gap;
    for (double y = cy - spec.structure_half_span; y + spec.structure_width <= cy + spec.structure_half_span + 1e-9;
         y += pitch) {
      Structure s{Eigen::Vector2d(layout.plateau_rear_x, y),
                  Eigen::Vector2d(layout.plateau_rear_x + spec.structure_depth, y + spec.structure_width),
                  spec.structure_height};
      stamp_box(terrain.map, s);
      terrain.structures.push_back(s);
    }
  }

  std::mt19937_64 rng(spec.seed);
  for (int k = 0; k < spec.rock_count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < spec.rock_max_retries && !placed; ++attempt) {
      const double r = std::uniform_real_distribution<double>(spec.rock_radius_min, spec.rock_radius_max)(rng);
      const double x_lo = layout.crest_x + spec.rock_margin_crest + r;
      const double x_hi = layout.plateau_rear_x - spec.rock_min_gap - r;
      const double y_lo = cy - spec.rock_band_half_width + r;
      const double y_hi = cy + spec.rock_band_half_width - r;
      if (x_lo >= x_hi || y_lo >= y_hi) break;
      const Eigen::Vector2d c(std::uniform_real_distribution<double>(x_lo, x_hi)(rng),
                              std::uniform_real_distribution<double>(y_lo, y_hi)(rng));
      if ((c - layout.goal).norm() < r + spec.rock_goal_clearance) continue;
      const bool overlaps = std::any_of(terrain.rocks.begin(), terrain.rocks.end(), [&](const Rock& o) {
        return (c - o.center).norm() < r + o.radius + spec.rock_min_gap;
      });
      if (overlaps) continue;
      terrain.rocks.push_back({c, r});
      placed = true;
    }
    if (!placed) {
      throw std::runtime_error("generate_terrain: could not place rock " + std::to_string(k + 1) + " of " +
                               std::to_string(spec.rock_count));
    }
  }
  for (const auto& rock : terrain.rocks) stamp_disc(terrain.map, rock.center, rock.radius, spec.rock_height);
  return terrain;
}

bool hits_obstacle(const Terrain& terrain, const Eigen::Vector2d& p, double radius) {
  for (const auto& rock : terrain.rocks) {
    if ((p - rock.center).norm() < rock.radius + radius) return true;
  }
  for (const auto& s : terrain.structures) {
    const Eigen::Vector2d closest = p.cwiseMax(s.min_corner).cwiseMin(s.max_corner);
    if ((p - closest).norm() < radius) return true;
  }
  return false;
}

}  // namespace ramp
