#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ramp {

class Config;

class OutOfBounds : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// 2.5D elevation field.
///
/// Cell (i, j) covers [origin + (i, j) * res, origin + (i + 1, j + 1) * res);
/// its value is the elevation at the cell center. `i` runs along +x and `j`
/// along +y, so `elevation()(i, j)` is the height of column i, row j.
class HeightMap {
 public:
  HeightMap() = default;
  HeightMap(const Eigen::Vector2d& origin, double resolution, Eigen::Index width,
            Eigen::Index height, double fill = 0.0);

  const Eigen::Vector2d& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  Eigen::Index width() const { return elevation_.rows(); }
  Eigen::Index height() const { return elevation_.cols(); }

  Eigen::MatrixXd& elevation() { return elevation_; }
  const Eigen::MatrixXd& elevation() const { return elevation_; }

  Eigen::Vector2d cell_center(Eigen::Index i, Eigen::Index j) const {
    return origin_ + resolution_ * Eigen::Vector2d(i + 0.5, j + 0.5);
  }
  /// Upper corner of the covered area.
  Eigen::Vector2d extent_max() const {
    return origin_ + resolution_ * Eigen::Vector2d(width(), height());
  }
  bool contains(const Eigen::Vector2d& p) const;
  /// Index of the cell containing p; nullopt outside the map.
  std::optional<Eigen::Vector2i> cell_of(const Eigen::Vector2d& p) const;

  double min_elevation() const { return elevation_.minCoeff(); }
  double max_elevation() const { return elevation_.maxCoeff(); }

 private:
  Eigen::Vector2d origin_ = Eigen::Vector2d::Zero();
  double resolution_ = 1.0;
  Eigen::MatrixXd elevation_;
};

/// Gradient magnitudes below this are treated as flat ground.
inline constexpr double kFlatGradientThreshold = 1e-3;

/// Bilinear elevation. Throws OutOfBounds outside the map extent; within the
/// outer half cell the nearest edge row/column is used.
double height_at(const HeightMap& map, const Eigen::Vector2d& p);

struct GradientSample {
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  bool one_sided = false;  ///< stencil hit the map edge on at least one axis
};

/// Central-difference gradient of the bilinear field with a one-cell stencil.
GradientSample gradient_at(const HeightMap& map, const Eigen::Vector2d& p);

struct SlopeSample {
  double angle = 0.0;  ///< atan(|grad|), in [0, pi/2)
  bool one_sided = false;
};

SlopeSample slope_at(const HeightMap& map, const Eigen::Vector2d& p);

/// Yaw of the uphill direction in (-pi, pi]; nullopt on flat ground.
std::optional<double> gradient_yaw_at(const HeightMap& map, const Eigen::Vector2d& p);

/// Unit surface normal estimated with a stencil of +-half_span metres.
Eigen::Vector3d terrain_normal(const HeightMap& map, const Eigen::Vector2d& p, double half_span);

/// Per-cell slope and uphill yaw, precomputed for constraint checks.
struct SlopeField {
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  double resolution = 1.0;
  Eigen::MatrixXd slope;         ///< rad
  Eigen::MatrixXd gradient_yaw;  ///< rad, NaN where flat

  std::optional<Eigen::Vector2i> cell_of(const Eigen::Vector2d& p) const;
};

SlopeField compute_slope_field(const HeightMap& map);

// ---------------------------------------------------------------------------
// Procedural hill scenario

struct TerrainSpec {
  double slope_deg = 30.0;
  double crest_height = 5.0;  ///< 0 disables the hill
  double plateau_depth = 25.0;
  int rock_count = 10;
  double rock_radius_min = 0.4;
  double rock_radius_max = 0.8;
  double rock_height = 1.5;
  std::uint64_t seed = 1;

  double size_x = 100.0;
  double size_y = 60.0;
  double resolution = 0.2;
  double start_x = 15.0;
  double approach_length = 25.0;  ///< start to hill base
  double taper_length = 2.0;      ///< cosine blend at base and crest

  double rock_band_half_width = 6.0;  ///< rocks lie within this lateral band
  double rock_margin_crest = 1.0;
  double rock_min_gap = 1.0;
  double rock_goal_clearance = 2.5;
  int rock_max_retries = 2000;

  double goal_offset = 5.0;  ///< goal distance in front of the plateau rear edge

  bool structures = true;
  double structure_height = 8.0;
  double structure_depth = 1.0;
  double structure_width = 4.0;
  double structure_gap = 1.0;
  double structure_half_span = 20.0;

  void validate() const;
};

struct Rock {
  Eigen::Vector2d center;
  double radius = 0.0;
};

struct Structure {
  Eigen::Vector2d min_corner;
  Eigen::Vector2d max_corner;
  double height = 0.0;
};

/// Scenario landmarks along the +x (uphill) axis.
struct TerrainLayout {
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  double hill_base_x = 0.0;
  double crest_x = 0.0;  ///< end of the ramp, start of the plateau
  double plateau_rear_x = 0.0;
  double ramp_run = 0.0;  ///< crest height / tan(slope)
};

struct Terrain {
  HeightMap map;
  std::vector<Rock> rocks;
  std::vector<Structure> structures;
  TerrainLayout layout;
};

/// Ground elevation of the hill profile (no rocks or structures).
double hill_profile(const TerrainSpec& spec, const TerrainLayout& layout, double x);

TerrainLayout terrain_layout(const TerrainSpec& spec);

/// Deterministic in the spec. Throws std::runtime_error when rocks cannot be
/// placed without overlap within the retry budget.
Terrain generate_terrain(const TerrainSpec& spec);

/// True when a disc of the given radius touches any rock or structure.
bool hits_obstacle(const Terrain& terrain, const Eigen::Vector2d& p, double radius);

TerrainSpec terrain_spec_from_config(const Config& config, TerrainSpec base = {});

/// Plain-text grid: header lines then `height` rows of `width` floats (row j
/// lists columns i = 0..width-1).
void write_heightmap(std::ostream& out, const HeightMap& map);
HeightMap read_heightmap(std::istream& in);

}  // namespace ramp
