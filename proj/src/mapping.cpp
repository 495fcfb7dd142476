#include "ramp/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ramp/config.hpp"

namespace ramp {

char to_char(CellState s) {
  switch (s) {
    case CellState::Free:
      return 'F';
    case CellState::Occupied:
      return 'O';
    case CellState::Unknown:
      break;
  }
  return 'U';
}

CellState cell_state_from_char(char c) {
  switch (c) {
    case 'U':
      return CellState::Unknown;
    case 'F':
      return CellState::Free;
    case 'O':
      return CellState::Occupied;
    default:
      throw std::invalid_argument(std::string("unknown cell character '") + c + "'");
  }
}

GridFrame GridFrame::centered(const Eigen::Vector2d& center, double size_x, double size_y, double resolution) {
  GridFrame frame;
  frame.resolution = resolution;
  frame.width = static_cast<int>(std::lround(size_x / resolution));
  frame.height = static_cast<int>(std::lround(size_y / resolution));
  const Eigen::Vector2d corner = center - 0.5 * resolution * Eigen::Vector2d(frame.width, frame.height);
  frame.origin = (corner / resolution).array().round() * resolution;
  return frame;
}

Eigen::Vector2i GridFrame::cell_coords(const Eigen::Vector2d& p) const {
  return ((p - origin) / resolution).array().floor().cast<int>();
}

Eigen::Vector2i aligned_offset(const GridFrame& from, const GridFrame& to) {
  if (std::abs(from.resolution - to.resolution) > 1e-12 * std::max(1.0, from.resolution)) {
    throw FrameMismatch("grid resolutions differ");
  }
  const Eigen::Vector2d cells = (to.origin - from.origin) / from.resolution;
  const Eigen::Vector2d rounded = cells.array().round();
  if ((cells - rounded).cwiseAbs().maxCoeff() > 1e-6) {
    throw FrameMismatch("grid origins are not aligned to whole cells");
  }
  return rounded.cast<int>();
}

OccupancyGrid::OccupancyGrid(const GridFrame& frame, double stamp)
    : frame_(frame), stamp_(stamp), cells_(Cells::Zero(frame.width, frame.height)) {
  if (!(frame.resolution > 0.0) || frame.width < 0 || frame.height < 0) {
    throw std::invalid_argument("OccupancyGrid: invalid frame");
  }
}

CellState OccupancyGrid::at_world(const Eigen::Vector2d& p) const {
  const Eigen::Vector2i c = frame_.cell_coords(p);
  return frame_.in_bounds(c) ? at(c.x(), c.y()) : CellState::Unknown;
}

namespace {

struct Overlap {
  Eigen::Vector2i dst_start;
  Eigen::Vector2i src_start;
  Eigen::Vector2i size;
  bool empty() const { return size.x() <= 0 || size.y() <= 0; }
};

// Region of `dst` covered by `src`.
Overlap overlap(const GridFrame& dst, const GridFrame& src) {
  const Eigen::Vector2i off = aligned_offset(src, dst);  // dst cell c is src cell c + off
  const Eigen::Vector2i lo = (-off).cwiseMax(0);
  const Eigen::Vector2i hi = Eigen::Vector2i(dst.width, dst.height).cwiseMin(Eigen::Vector2i(src.width, src.height) - off);
  return {lo, lo + off, hi - lo};
}

// Fills Unknown cells of `dst` from `src` over their overlap.
void fill_unknown(OccupancyGrid& dst, const OccupancyGrid& src) {
  const Overlap ov = overlap(dst.frame(), src.frame());
  if (ov.empty()) return;
  auto d = dst.cells().block(ov.dst_start.x(), ov.dst_start.y(), ov.size.x(), ov.size.y());
  const auto s = src.cells().block(ov.src_start.x(), ov.src_start.y(), ov.size.x(), ov.size.y());
  d = (d == static_cast<std::uint8_t>(CellState::Unknown)).select(s, d);
}

template <typename Visit>
void for_each_bresenham(Eigen::Vector2i a, const Eigen::Vector2i& b, Visit&& visit) {
  const int dx = std::abs(b.x() - a.x());
  const int dy = -std::abs(b.y() - a.y());
  const int sx = a.x() < b.x() ? 1 : -1;
  const int sy = a.y() < b.y() ? 1 : -1;
  int err = dx + dy;
  while (true) {
    const bool last = a == b;
    visit(a, last);
    if (last) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      a.x() += sx;
    }
    if (e2 <= dx) {
      err += dx;
      a.y() += sy;
    }
  }
}

void stamp_disc(OccupancyGrid& grid, const Eigen::Vector2d& c, double radius, CellState state) {
  const GridFrame& f = grid.frame();
  const Eigen::Vector2i lo = f.cell_coords(c - Eigen::Vector2d::Constant(radius)).cwiseMax(0);
  const Eigen::Vector2i hi = f.cell_coords(c + Eigen::Vector2d::Constant(radius)).cwiseMin(Eigen::Vector2i(f.width - 1, f.height - 1));
  const double r2 = radius * radius;
  for (int j = lo.y(); j <= hi.y(); ++j) {
    for (int i = lo.x(); i <= hi.x(); ++i) {
      if ((f.cell_center(i, j) - c).squaredNorm() <= r2) grid.set(i, j, state);
    }
  }
}

}  // namespace

OccupancyGrid recenter(const OccupancyGrid& grid, const GridFrame& frame) {
  OccupancyGrid out(frame, grid.stamp());
  fill_unknown(out, grid);
  return out;
}

OccupancyGrid inflate(const LabeledCloud& cloud, const GridFrame& frame, const InflationParams& params, double stamp) {
  OccupancyGrid grid(frame, stamp);
  for (const auto& pt : cloud) {
    if (pt.label == PointLabel::Ground) stamp_disc(grid, pt.position.head<2>(), params.ground_radius, CellState::Free);
  }
  for (const auto& pt : cloud) {
    if (pt.label == PointLabel::Obstacle) {
      stamp_disc(grid, pt.position.head<2>(), params.obstacle_radius, CellState::Occupied);
    }
  }
  return grid;
}

std::vector<Eigen::Vector2i> bresenham(const Eigen::Vector2i& a, const Eigen::Vector2i& b) {
  std::vector<Eigen::Vector2i> cells;
  for_each_bresenham(a, b, [&](const Eigen::Vector2i& c, bool) { cells.push_back(c); });
  return cells;
}

OccupancyGrid raytrace(const LabeledCloud& cloud, const Eigen::Vector2d& sensor_xy, const GridFrame& frame,
                       double stamp) {
  OccupancyGrid grid(frame, stamp);
  const Eigen::Vector2i start = frame.cell_coords(sensor_xy);
  std::vector<Eigen::Vector2i> occupied;
  for (const auto& pt : cloud) {
    const bool obstacle = pt.label == PointLabel::Obstacle;
    for_each_bresenham(start, frame.cell_coords(pt.position.head<2>()), [&](const Eigen::Vector2i& c, bool last) {
      if (!frame.in_bounds(c)) return;
      if (last && obstacle) {
        occupied.push_back(c);
      } else {
        grid.set(c.x(), c.y(), CellState::Free);
      }
    });
  }
  for (const auto& c : occupied) grid.set(c.x(), c.y(), CellState::Occupied);
  return grid;
}

void MapMemory::clear() {
  buffer_.clear();
  previous_.reset();
}

OccupancyGrid fuse(MapMemory& memory, const OccupancyGrid& raw) {
  // Validate every frame before touching the memory.
  for (const auto& g : memory.buffer_) aligned_offset(g.frame(), raw.frame());
  if (memory.previous_) aligned_offset(memory.previous_->frame(), raw.frame());

  memory.buffer_.push_back(raw);
  const double now = raw.stamp();
  while (!memory.buffer_.empty() && now - memory.buffer_.front().stamp() >= memory.window_ - 1e-9) {
    memory.buffer_.pop_front();
  }

  OccupancyGrid fused(raw.frame(), now);
  if (memory.buffer_.empty()) {
    fused = raw;  // zero-length window
  }
  for (auto it = memory.buffer_.rbegin(); it != memory.buffer_.rend(); ++it) fill_unknown(fused, *it);
  if (memory.previous_) fill_unknown(fused, *memory.previous_);
  memory.previous_ = fused;
  return fused;
}

InflationParams inflation_params_from_config(const Config& c, InflationParams p) {
  p.ground_radius = c.get_double("mapping.ground_radius", p.ground_radius);
  p.obstacle_radius = c.get_double("mapping.obstacle_radius", p.obstacle_radius);
  return p;
}

}  // namespace ramp
