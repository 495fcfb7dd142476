#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ramp/sensor.hpp"

namespace ramp {

class Config;

enum class CellState : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

char to_char(CellState s);
CellState cell_state_from_char(char c);

/// Placement of a 2D grid: cell (i, j) covers
/// [origin + (i, j) * res, origin + (i + 1, j + 1) * res).
struct GridFrame {
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  double resolution = 0.2;
  int width = 0;
  int height = 0;

  /// Frame of the given size centred near `center`, with the origin snapped
  /// to a multiple of the resolution so that recentred frames stay aligned.
  static GridFrame centered(const Eigen::Vector2d& center, double size_x, double size_y, double resolution);

  Eigen::Vector2d cell_center(int i, int j) const {
    return origin + resolution * Eigen::Vector2d(i + 0.5, j + 0.5);
  }
  /// Unclamped integer cell coordinates of a world point.
  Eigen::Vector2i cell_coords(const Eigen::Vector2d& p) const;
  bool in_bounds(const Eigen::Vector2i& c) const {
    return c.x() >= 0 && c.y() >= 0 && c.x() < width && c.y() < height;
  }
  bool operator==(const GridFrame&) const = default;
};

class FrameMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integer offset such that cell c of `to` is cell c + offset of `from`.
/// Throws FrameMismatch when resolutions differ or the origins are not a
/// whole number of cells apart.
Eigen::Vector2i aligned_offset(const GridFrame& from, const GridFrame& to);

/// Three-state occupancy grid; cells(i, j) with i along +x.
class OccupancyGrid {
 public:
  using Cells = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

  OccupancyGrid() = default;
  explicit OccupancyGrid(const GridFrame& frame, double stamp = 0.0);

  const GridFrame& frame() const { return frame_; }
  double stamp() const { return stamp_; }
  void set_stamp(double stamp) { stamp_ = stamp; }

  CellState at(int i, int j) const { return static_cast<CellState>(cells_(i, j)); }
  void set(int i, int j, CellState s) { cells_(i, j) = static_cast<std::uint8_t>(s); }
  /// State under a world point; Unknown outside the grid.
  CellState at_world(const Eigen::Vector2d& p) const;

  Cells& cells() { return cells_; }
  const Cells& cells() const { return cells_; }

  long count(CellState s) const { return (cells_ == static_cast<std::uint8_t>(s)).count(); }

 private:
  GridFrame frame_;
  double stamp_ = 0.0;
  Cells cells_;
};

/// Copies the overlapping area of `grid` into a grid on `frame`; cells with
/// no source are Unknown.
OccupancyGrid recenter(const OccupancyGrid& grid, const GridFrame& frame);

struct InflationParams {
  double ground_radius = 0.5;
  double obstacle_radius = 0.6;
};

/// Ground point inflation: cells whose centres lie within `ground_radius` of
/// a Ground point are Free, within `obstacle_radius` of an Obstacle point are
/// Occupied (Occupied wins), everything else Unknown.
OccupancyGrid inflate(const LabeledCloud& cloud, const GridFrame& frame, const InflationParams& params = {},
                      double stamp = 0.0);

/// Raytracing baseline: 2D Bresenham lines from the sensor cell to each hit
/// cell; traversed cells Free, the terminal cell Occupied for Obstacle hits
/// and Free otherwise. Occupied wins over Free within one pass. Cells off
/// the grid are skipped.
OccupancyGrid raytrace(const LabeledCloud& cloud, const Eigen::Vector2d& sensor_xy, const GridFrame& frame,
                       double stamp = 0.0);

/// Cells visited by a Bresenham line from a to b, inclusive of both ends.
std::vector<Eigen::Vector2i> bresenham(const Eigen::Vector2i& a, const Eigen::Vector2i& b);

/// Persistent map memory.
///
/// Holds raw grids newer than `window` seconds and the previous fused grid.
/// Not thread-safe: one writer calls `fuse`; readers take the returned grid
/// by value.
class MapMemory {
 public:
  explicit MapMemory(double window_seconds = 3.0) : window_(window_seconds) {}

  double window() const { return window_; }
  const std::deque<OccupancyGrid>& buffer() const { return buffer_; }
  const std::optional<OccupancyGrid>& previous() const { return previous_; }
  void clear();

  friend OccupancyGrid fuse(MapMemory& memory, const OccupancyGrid& raw);

 private:
  double window_;
  std::deque<OccupancyGrid> buffer_;  // oldest first
  std::optional<OccupancyGrid> previous_;
};

/// 1. push `raw`, evict grids older than the window;
/// 2. per cell, the newest non-Unknown buffered state;
/// 3. remaining Unknown cells take the previous fused state;
/// 4. the result becomes the previous fused grid.
/// The output lives on `raw`'s frame. Throws FrameMismatch for unaligned frames.
OccupancyGrid fuse(MapMemory& memory, const OccupancyGrid& raw);

InflationParams inflation_params_from_config(const Config& config, InflationParams base = {});

/// Text dump: header lines, then `height` rows of `width` chars in
/// {U, F, O}; row j lists columns i = 0..width-1.
void write_grid(std::ostream& out, const OccupancyGrid& grid);
OccupancyGrid read_grid(std::istream& in);

}  // namespace ramp
