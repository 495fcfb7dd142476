#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ramp/config.hpp"
#include "ramp/terrain.hpp"

namespace ramp {

TerrainSpec terrain_spec_from_config(const Config& c, TerrainSpec s) {
  s.slope_deg = c.get_double("terrain.slope_deg", s.slope_deg);
  s.crest_height = c.get_double("terrain.crest_height", s.crest_height);
  s.plateau_depth = c.get_double("terrain.plateau_depth", s.plateau_depth);
  s.rock_count = c.get_int("terrain.rock_count", s.rock_count);
  s.rock_radius_min = c.get_double("terrain.rock_radius_min", s.rock_radius_min);
  s.rock_radius_max = c.get_double("terrain.rock_radius_max", s.rock_radius_max);
  s.rock_height = c.get_double("terrain.rock_height", s.rock_height);
  s.seed = static_cast<std::uint64_t>(c.get_int("terrain.seed", static_cast<int>(s.seed)));
  s.size_x = c.get_double("terrain.size_x", s.size_x);
  s.size_y = c.get_double("terrain.size_y", s.size_y);
  s.resolution = c.get_double("terrain.resolution", s.resolution);
  s.start_x = c.get_double("terrain.start_x", s.start_x);
  s.approach_length = c.get_double("terrain.approach_length", s.approach_length);
  s.taper_length = c.get_double("terrain.taper_length", s.taper_length);
  s.rock_band_half_width = c.get_double("terrain.rock_band_half_width", s.rock_band_half_width);
  s.rock_margin_crest = c.get_double("terrain.rock_margin_crest", s.rock_margin_crest);
  s.rock_min_gap = c.get_double("terrain.rock_min_gap", s.rock_min_gap);
  s.rock_goal_clearance = c.get_double("terrain.rock_goal_clearance", s.rock_goal_clearance);
  s.rock_max_retries = c.get_int("terrain.rock_max_retries", s.rock_max_retries);
  s.goal_offset = c.get_double("terrain.goal_offset", s.goal_offset);
  s.structures = c.get_bool("terrain.structures", s.structures);
  s.structure_height = c.get_double("terrain.structure_height", s.structure_height);
  s.structure_depth = c.get_double("terrain.structure_depth", s.structure_depth);
  s.structure_width = c.get_double("terrain.structure_width", s.structure_width);
  s.structure_gap = c.get_double("terrain.structure_gap", s.structure_gap);
  s.structure_half_span = c.get_double("terrain.structure_half_span", s.structure_half_span);
  s.validate();
  return s;
}

void write_heightmap(std::ostream& out, const HeightMap& map) {
  out << "# heightmap\n";
  out << std::setprecision(17);
  out << "origin " << map.origin().x() << ' ' << map.origin().y() << '\n';
  out << "resolution " << map.resolution() << '\n';
  out << "size " << map.width() << ' ' << map.height() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index j = 0; j < map.height(); ++j) {
    for (Eigen::Index i = 0; i < map.width(); ++i) {
      if (i) out << ' ';
      out << map.elevation()(i, j);
    }
    out << '\n';
  }
}

namespace {

std::string next_content_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') return line;
  }
  throw std::runtime_error("read_heightmap: unexpected end of input");
}

template <typename... T>
void expect_field(std::istream& in, const char* name, T&... values) {
  std::istringstream ss(next_content_line(in));
  std::string key;
  ss >> key;
  if (key != name) throw std::runtime_error(std::string("read_heightmap: expected '") + name + "'");
  ((ss >> values), ...);
  if (!ss) throw std::runtime_error(std::string("read_heightmap: malformed '") + name + "' line");
}

}  // namespace

HeightMap read_heightmap(std::istream& in) {
  double ox = 0, oy = 0, res = 0;
  Eigen::Index w = 0, h = 0;
  expect_field(in, "origin", ox, oy);
  expect_field(in, "resolution", res);
  expect_field(in, "size", w, h);
  HeightMap map(Eigen::Vector2d(ox, oy), res, w, h);
  for (Eigen::Index j = 0; j < h; ++j) {
    std::istringstream row(next_content_line(in));
    for (Eigen::Index i = 0; i < w; ++i) {
      if (!(row >> map.elevation()(i, j))) throw std::runtime_error("read_heightmap: short row");
    }
  }
  return map;
}

}  // namespace ramp
