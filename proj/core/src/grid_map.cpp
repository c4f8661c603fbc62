#include "che/grid_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace che {

GridMap::GridMap(int width, int height, double resolution, WorldPoint origin,
                 bool blocked)
    : width_(width),
      height_(height),
      resolution_(resolution),
      origin_(origin),
      cells_(static_cast<size_t>(width) * height, blocked ? 1 : 0) {
  if (width < 1 || height < 1) throw std::invalid_argument("GridMap: empty raster");
  if (!(resolution > 0.0)) throw std::invalid_argument("GridMap: resolution must be > 0");
}

void GridMap::set_blocked(CellIndex c, bool value) {
  if (!in_bounds(c)) throw std::out_of_range("GridMap::set_blocked: cell out of bounds");
  cells_[static_cast<size_t>(c.iy) * width_ + c.ix] = value ? 1 : 0;
}

void GridMap::block_rect(double x0, double y0, double x1, double y1) {
  if (x1 < x0) std::swap(x0, x1);
  if (y1 < y0) std::swap(y0, y1);
  for (int iy = 0; iy < height_; ++iy) {
    for (int ix = 0; ix < width_; ++ix) {
      const WorldPoint c = cell_center({ix, iy});
      if (c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1) {
        cells_[static_cast<size_t>(iy) * width_ + ix] = 1;
      }
    }
  }
}

std::optional<CellIndex> GridMap::world_to_cell(WorldPoint p) const {
  const double fx = (p.x - origin_.x) / resolution_;
  const double fy = (p.y - origin_.y) / resolution_;
  const int ix = static_cast<int>(std::floor(fx));
  const int iy = static_cast<int>(std::floor(fy));
  const CellIndex c{ix, iy};
  if (!in_bounds(c)) return std::nullopt;
  return c;
}

WorldPoint GridMap::cell_center(CellIndex c) const {
  return {origin_.x + (c.ix + 0.5) * resolution_,
          origin_.y + (c.iy + 0.5) * resolution_};
}

bool GridMap::point_free(WorldPoint p) const {
  const auto c = world_to_cell(p);
  return c.has_value() && cell_free(*c);
}

namespace {

// Closed segment vs closed axis-aligned box, Liang-Barsky slab clip.
bool segment_hits_box(WorldPoint a, WorldPoint b, double x0, double y0,
                      double x1, double y1) {
  double t0 = 0.0, t1 = 1.0;
  const double d[2] = {b.x - a.x, b.y - a.y};
  const double lo[2] = {x0, y0}, hi[2] = {x1, y1};
  const double p0[2] = {a.x, a.y};
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (p0[k] < lo[k] || p0[k] > hi[k]) return false;
    } else {
      double ta = (lo[k] - p0[k]) / d[k];
      double tb = (hi[k] - p0[k]) / d[k];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return false;
    }
  }
  return true;
}

}  // namespace

bool GridMap::supercover(WorldPoint a, WorldPoint b,
                         std::vector<CellIndex>& out) const {
  out.clear();
  // Canonical endpoint order makes the enumeration symmetric in a<->b.
  if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(a, b);

  const double fx0 = (std::min(a.x, b.x) - origin_.x) / resolution_;
  const double fx1 = (std::max(a.x, b.x) - origin_.x) / resolution_;
  const double fy0 = (std::min(a.y, b.y) - origin_.y) / resolution_;
  const double fy1 = (std::max(a.y, b.y) - origin_.y) / resolution_;
  // One extra ring of candidates: an endpoint exactly on a cell boundary
  // touches the neighbor cell too, and the slab test sorts out the rest.
  const int ix0 = static_cast<int>(std::floor(fx0)) - 1;
  const int ix1 = static_cast<int>(std::floor(fx1)) + 1;
  const int iy0 = static_cast<int>(std::floor(fy0)) - 1;
  const int iy1 = static_cast<int>(std::floor(fy1)) + 1;

  bool all_in_bounds = true;
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      const double cx0 = origin_.x + ix * resolution_;
      const double cy0 = origin_.y + iy * resolution_;
      if (!segment_hits_box(a, b, cx0, cy0, cx0 + resolution_,
                            cy0 + resolution_)) {
        continue;
      }
      const CellIndex c{ix, iy};
      if (!in_bounds(c)) {
        all_in_bounds = false;
        continue;
      }
      out.push_back(c);
    }
  }
  return all_in_bounds;
}

bool GridMap::segment_free(WorldPoint a, WorldPoint b) const {
  std::vector<CellIndex> cells;
  if (!supercover(a, b, cells)) return false;
  return std::all_of(cells.begin(), cells.end(),
                     [this](CellIndex c) { return cell_free(c); });
}

size_t GridMap::free_cell_count() const {
  return static_cast<size_t>(
      std::count(cells_.begin(), cells_.end(), uint8_t{0}));
}

void GridMap::save_pgm(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("GridMap::save_pgm: cannot open " + path);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "# resolution=%.17g origin=%.17g %.17g",
                resolution_, origin_.x, origin_.y);
  f << "P2\n" << buf << "\n" << width_ << " " << height_ << "\n255\n";
  for (int iy = 0; iy < height_; ++iy) {
    for (int ix = 0; ix < width_; ++ix) {
      if (ix) f << ' ';
      f << (blocked({ix, iy}) ? 0 : 255);
    }
    f << '\n';
  }
  if (!f) throw std::runtime_error("GridMap::save_pgm: write failed: " + path);
}

GridMap GridMap::load_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("GridMap::load_pgm: cannot open " + path);
  std::string magic;
  f >> magic;
  if (magic != "P2") throw std::runtime_error("GridMap::load_pgm: not an ASCII PGM: " + path);

  double resolution = 1.0;
  WorldPoint origin{0.0, 0.0};
  // Comment lines may appear between tokens; the first one normally carries
  // the grid geometry.
  auto skip_comments = [&]() {
    f >> std::ws;
    while (f.peek() == '#') {
      std::string line;
      std::getline(f, line);
      double r, ox, oy;
      if (std::sscanf(line.c_str(), "# resolution=%lf origin=%lf %lf", &r, &ox,
                      &oy) == 3) {
        resolution = r;
        origin = {ox, oy};
      }
      f >> std::ws;
    }
  };

  skip_comments();
  int width = 0, height = 0, maxval = 0;
  f >> width;
  skip_comments();
  f >> height;
  skip_comments();
  f >> maxval;
  if (!f || width < 1 || height < 1) {
    throw std::runtime_error("GridMap::load_pgm: bad header: " + path);
  }
  if (maxval != 255) {
    throw std::runtime_error("GridMap::load_pgm: maxval must be 255: " + path);
  }

  GridMap map(width, height, resolution, origin);
  for (int iy = 0; iy < height; ++iy) {
    for (int ix = 0; ix < width; ++ix) {
      skip_comments();
      int v = -1;
      f >> v;
      if (!f) throw std::runtime_error("GridMap::load_pgm: truncated raster: " + path);
      if (v == 0) {
        map.set_blocked({ix, iy}, true);
      } else if (v != 255) {
        throw std::runtime_error("GridMap::load_pgm: cell value must be 0 or 255: " + path);
      }
    }
  }
  return map;
}

}  // namespace che
