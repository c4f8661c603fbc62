#ifndef CHE_GEOMETRY_HPP
#define CHE_GEOMETRY_HPP

#include <cmath>

namespace che {

/// A point in the (x,y) industrial coordinate frame, meters.
struct WorldPoint {
  double x{0.0};
  double y{0.0};

  friend bool operator==(const WorldPoint& a, const WorldPoint& b) = default;
};

/// Integer raster index: ix = column, iy = row.
struct CellIndex {
  int ix{0};
  int iy{0};

  friend bool operator==(const CellIndex& a, const CellIndex& b) {
    return a.ix == b.ix && a.iy == b.iy;
  }
};

inline double distance(const WorldPoint& a, const WorldPoint& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace che

#endif  // CHE_GEOMETRY_HPP
