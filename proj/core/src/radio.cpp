#include "che/radio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "che/rng.hpp"

namespace che {

void RadioConfig::validate() const {
  if (!(reference_distance > 0.0))
    throw std::invalid_argument("RadioConfig: reference_distance must be > 0");
  if (shadow_sigma < 0.0 || multipath_sigma < 0.0)
    throw std::invalid_argument("RadioConfig: fading sigmas must be >= 0");
  if (!(shadow_decorrelation > 0.0))
    throw std::invalid_argument("RadioConfig: shadow_decorrelation must be > 0");
}

double RssMap::at_point(const GridMap& grid, WorldPoint p) const {
  const auto c = grid.world_to_cell(p);
  if (!c) return std::numeric_limits<double>::quiet_NaN();
  return at(*c);
}

double rss_pl(const Transmitter& tx, const RadioConfig& cfg, WorldPoint p) {
  const double horiz = distance(tx.position, p);
  const double d = std::sqrt(horiz * horiz + tx.height * tx.height);
  const double d_eff = std::max(d, cfg.reference_distance);
  const double loss = cfg.reference_loss +
                      10.0 * cfg.pathloss_exponent *
                          std::log10(d_eff / cfg.reference_distance);
  return tx.tx_power_dbm - loss;
}

std::vector<double> gen_shadow_field(int width, int height, double resolution,
                                     double sigma, double decorrelation,
                                     uint64_t seed) {
  const size_t n = static_cast<size_t>(width) * height;
  std::vector<double> field(n);
  Rng rng(seed);
  for (double& v : field) v = rng.normal();

  if (sigma == 0.0) {
    std::fill(field.begin(), field.end(), 0.0);
    return field;
  }

  // AR(1) sweep along each axis. Starting from i.i.d. N(0,1) and filtering
  // with rho = exp(-res/d_corr) keeps unit marginal variance and gives
  // autocorrelation rho^|lag| = exp(-lag*res/d_corr) along rows and columns.
  const double rho = std::exp(-resolution / decorrelation);
  const double blend = std::sqrt(1.0 - rho * rho);
  for (int iy = 0; iy < height; ++iy) {
    double* row = field.data() + static_cast<size_t>(iy) * width;
    for (int ix = 1; ix < width; ++ix) {
      row[ix] = rho * row[ix - 1] + blend * row[ix];
    }
  }
  for (int ix = 0; ix < width; ++ix) {
    for (int iy = 1; iy < height; ++iy) {
      const size_t i = static_cast<size_t>(iy) * width + ix;
      field[i] = rho * field[i - width] + blend * field[i];
    }
  }
  for (double& v : field) v *= sigma;
  return field;
}

std::pair<RssMap, RssMap> gen_rss_maps(const GridMap& map,
                                       const Transmitter& tx,
                                       const RadioConfig& cfg) {
  cfg.validate();
  const size_t n = static_cast<size_t>(map.width()) * map.height();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  RssMap pl{map.width(), map.height(), map.resolution(), map.origin(),
            RssVariant::pl, std::vector<double>(n, nan)};
  RssMap sf{map.width(), map.height(), map.resolution(), map.origin(),
            RssVariant::sf, std::vector<double>(n, nan)};

  // The fading layers are generated over the full lattice (blocked cells
  // included) so spatial correlation is unaffected by obstacle gaps.
  const std::vector<double> shadow =
      gen_shadow_field(map.width(), map.height(), map.resolution(),
                       cfg.shadow_sigma, cfg.shadow_decorrelation,
                       derive_seed(cfg.seed, "radio.shadow"));
  Rng mp_rng(derive_seed(cfg.seed, "radio.multipath"));

  for (int iy = 0; iy < map.height(); ++iy) {
    for (int ix = 0; ix < map.width(); ++ix) {
      const CellIndex c{ix, iy};
      const size_t i = static_cast<size_t>(iy) * map.width() + ix;
      const double multipath = mp_rng.normal(0.0, cfg.multipath_sigma);
      if (map.blocked(c)) continue;
      const double mean = rss_pl(tx, cfg, map.cell_center(c));
      pl.values[i] = mean;
      sf.values[i] = mean + shadow[i] + multipath;
    }
  }
  return {std::move(pl), std::move(sf)};
}

std::vector<WorldPoint> sample_receivers(const GridMap& map, int count,
                                         uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_receivers: count must be >= 1");
  if (map.free_cell_count() == 0)
    throw std::runtime_error("sample_receivers: map has no free space");

  Rng rng(seed);
  std::vector<WorldPoint> points;
  points.reserve(count);
  const double x0 = map.origin().x, y0 = map.origin().y;
  const double x1 = x0 + map.width() * map.resolution();
  const double y1 = y0 + map.height() * map.resolution();
  while (static_cast<int>(points.size()) < count) {
    const WorldPoint p{rng.uniform(x0, x1), rng.uniform(y0, y1)};
    if (map.point_free(p)) points.push_back(p);
  }
  return points;
}

RssMap load_rss_csv(const GridMap& grid, RssVariant variant,
                    const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_rss_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("load_rss_csv: empty file " + path);

  RssMap rss{grid.width(), grid.height(), grid.resolution(), grid.origin(),
             variant,
             std::vector<double>(static_cast<size_t>(grid.width()) * grid.height(),
                                 std::numeric_limits<double>::quiet_NaN())};
  for (int iy = 0; iy < grid.height(); ++iy) {
    for (int ix = 0; ix < grid.width(); ++ix) {
      const CellIndex c{ix, iy};
      if (grid.blocked(c)) continue;
      if (!std::getline(f, line)) {
        throw std::runtime_error("load_rss_csv: fewer rows than free cells in " + path);
      }
      double x, y, v;
      if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &v) != 3) {
        throw std::runtime_error("load_rss_csv: malformed row in " + path);
      }
      rss.values[static_cast<size_t>(iy) * grid.width() + ix] = v;
    }
  }
  return rss;
}

void save_rss_csv(const RssMap& rss, const GridMap& grid,
                  const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_rss_csv: cannot open " + path);
  f << "x,y,rss_dbm\n";
  char buf[128];
  for (int iy = 0; iy < grid.height(); ++iy) {
    for (int ix = 0; ix < grid.width(); ++ix) {
      const CellIndex c{ix, iy};
      if (grid.blocked(c)) continue;
      const WorldPoint p = grid.cell_center(c);
      std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f\n", p.x, p.y, rss.at(c));
      f << buf;
    }
  }
}

}  // namespace che
