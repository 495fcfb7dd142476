#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ramp/mapping.hpp"

namespace ramp {

void write_grid(std::ostream& out, const OccupancyGrid& grid) {
  const GridFrame& f = grid.frame();
  out << "# occupancy grid\n" << std::setprecision(17);
  out << "origin " << f.origin.x() << ' ' << f.origin.y() << '\n';
  out << "resolution " << f.resolution << '\n';
  out << "size " << f.width << ' ' << f.height << '\n';
  out << "stamp " << grid.stamp() << '\n';
  std::string row(static_cast<std::size_t>(f.width), 'U');
  for (int j = 0; j < f.height; ++j) {
    for (int i = 0; i < f.width; ++i) row[static_cast<std::size_t>(i)] = to_char(grid.at(i, j));
    out << row << '\n';
  }
}

OccupancyGrid read_grid(std::istream& in) {
  GridFrame frame;
  double stamp = 0.0;
  std::string line;
  int fields = 0;
  while (fields < 4 && std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "origin") {
      ss >> frame.origin.x() >> frame.origin.y();
    } else if (key == "resolution") {
      ss >> frame.resolution;
    } else if (key == "size") {
      ss >> frame.width >> frame.height;
    } else if (key == "stamp") {
      ss >> stamp;
    } else {
      throw std::runtime_error("read_grid: unexpected header line '" + line + "'");
    }
    if (!ss) throw std::runtime_error("read_grid: malformed header line '" + line + "'");
    ++fields;
  }
  if (fields < 4) throw std::runtime_error("read_grid: incomplete header");
  OccupancyGrid grid(frame, stamp);
  for (int j = 0; j < frame.height; ++j) {
    if (!std::getline(in, line)) throw std::runtime_error("read_grid: missing rows");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<int>(line.size()) != frame.width) throw std::runtime_error("read_grid: row width mismatch");
    for (int i = 0; i < frame.width; ++i) grid.set(i, j, cell_state_from_char(line[static_cast<std::size_t>(i)]));
  }
  return grid;
}

}  // namespace ramp
