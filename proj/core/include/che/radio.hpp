#ifndef CHE_RADIO_HPP
#define CHE_RADIO_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "che/grid_map.hpp"

namespace che {

struct Transmitter {
  WorldPoint position;
  double height{3.0};       // m above floor
  double tx_power_dbm{20.0};
  double frequency_ghz{3.7};
};

struct RadioConfig {
  double pathloss_exponent{2.7};
  double reference_distance{1.0};   // m
  double reference_loss{40.0};      // dB at reference_distance
  double shadow_sigma{6.0};         // dB
  double shadow_decorrelation{8.0}; // m, exponential correlation length
  double multipath_sigma{1.5};      // dB, i.i.d. per cell
  double sensitivity{-90.0};        // dBm receiver threshold
  uint64_t seed{0};

  void validate() const;
};

enum class RssVariant { pl, sf };

/// Scalar received-signal-strength field over a GridMap raster, dBm per cell.
/// Blocked cells hold NaN; the radio maps are defined on the open floor only.
struct RssMap {
  int width{0};
  int height{0};
  double resolution{1.0};
  WorldPoint origin;
  RssVariant variant{RssVariant::pl};
  std::vector<double> values;  // row-major, NaN on blocked cells

  double at(CellIndex c) const {
    return values[static_cast<size_t>(c.iy) * width + c.ix];
  }
  /// Value of the cell containing p; NaN when out of bounds or blocked.
  double at_point(const GridMap& grid, WorldPoint p) const;
};

/// Mean path-loss RSS at p: tx_power - [L0 + 10 n log10(max(d, d0)/d0)] with
/// d the 3D distance through the transmitter height. Deterministic.
double rss_pl(const Transmitter& tx, const RadioConfig& cfg, WorldPoint p);

/// Builds the deterministic path-loss map and the stochastic shadow+multipath
/// map on the same raster. The shadow layer is a zero-mean Gaussian field with
/// marginal std shadow_sigma and exponential autocorrelation
/// exp(-lag/decorrelation) along the grid axes (Gudmundson-style), generated
/// by cell-ordered AR(1) sweeps; multipath is i.i.d. Gaussian dB noise.
/// Same seed => bit-identical maps.
std::pair<RssMap, RssMap> gen_rss_maps(const GridMap& map,
                                       const Transmitter& tx,
                                       const RadioConfig& cfg);

/// The correlated shadow layer alone (dB), over the full raster including
/// blocked cells. Exposed for statistical verification.
std::vector<double> gen_shadow_field(int width, int height, double resolution,
                                     double sigma, double decorrelation,
                                     uint64_t seed);

/// Uniform points over the free area of the map; deterministic per seed.
/// Throws when the map has no free space.
std::vector<WorldPoint> sample_receivers(const GridMap& map, int count,
                                         uint64_t seed);

/// CSV export: header `x,y,rss_dbm`, one row per free cell, 6 decimals,
/// row-major order.
void save_rss_csv(const RssMap& rss, const GridMap& grid,
                  const std::string& path);

/// Rebuilds an RssMap from a CSV produced by save_rss_csv; rows must cover
/// exactly the free cells of `grid` in row-major order.
RssMap load_rss_csv(const GridMap& grid, RssVariant variant,
                    const std::string& path);

}  // namespace che

#endif  // CHE_RADIO_HPP
