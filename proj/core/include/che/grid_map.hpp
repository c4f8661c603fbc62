#ifndef CHE_GRID_MAP_HPP
#define CHE_GRID_MAP_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "che/geometry.hpp"

namespace che {

/// Binary occupancy raster of the factory floor. Cells are row-major
/// (iy * width + ix); true = blocked. Out-of-bounds is treated as blocked:
/// the AGV may not leave the floor. Immutable in spirit -- the mutators exist
/// for construction only, all queries are const and thread-safe.
class GridMap {
 public:
  GridMap(int width, int height, double resolution, WorldPoint origin,
          bool blocked = false);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  WorldPoint origin() const { return origin_; }

  bool in_bounds(CellIndex c) const {
    return c.ix >= 0 && c.ix < width_ && c.iy >= 0 && c.iy < height_;
  }

  /// Out-of-bounds cells read as blocked.
  bool blocked(CellIndex c) const {
    return !in_bounds(c) || cells_[static_cast<size_t>(c.iy) * width_ + c.ix];
  }
  bool cell_free(CellIndex c) const { return !blocked(c); }

  void set_blocked(CellIndex c, bool value);
  /// Marks every cell whose center lies inside the closed world rectangle.
  void block_rect(double x0, double y0, double x1, double y1);

  /// Floor quantization of (p - origin) / resolution; nullopt when outside.
  std::optional<CellIndex> world_to_cell(WorldPoint p) const;
  WorldPoint cell_center(CellIndex c) const;

  bool point_free(WorldPoint p) const;

  /// True iff every cell touched by the closed segment a->b (supercover:
  /// all cells whose closed square the segment intersects) is free and in
  /// bounds. Conservative by design so PRM edges cannot tunnel through
  /// obstacle corners.
  bool segment_free(WorldPoint a, WorldPoint b) const;

  /// Supercover cell enumeration behind segment_free. Returns false if the
  /// segment touches any out-of-bounds cell; `out` then holds the in-bounds
  /// prefix found so far.
  bool supercover(WorldPoint a, WorldPoint b, std::vector<CellIndex>& out) const;

  size_t free_cell_count() const;

  friend bool operator==(const GridMap& a, const GridMap& b) = default;

  /// ASCII PGM ("P2") round-trip. 0 = blocked, 255 = free; the header comment
  /// carries `# resolution=<m> origin=<x> <y>`. Exported files re-import to an
  /// identical map and re-export byte-identically.
  void save_pgm(const std::string& path) const;
  static GridMap load_pgm(const std::string& path);

 private:
  int width_;
  int height_;
  double resolution_;
  WorldPoint origin_;
  std::vector<uint8_t> cells_;
};

}  // namespace che

#endif  // CHE_GRID_MAP_HPP
