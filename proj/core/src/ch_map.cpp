#include "che/ch_map.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace che {

ChMap build_chmap(const SvcModel& model, const GridMap& layout,
                  const Transmitter& tx, const RadioConfig& cfg,
                  int timestamp_step) {
  ChMap chmap{GridMap(layout.width(), layout.height(), layout.resolution(),
                      layout.origin()),
              timestamp_step};
  for (int iy = 0; iy < layout.height(); ++iy) {
    for (int ix = 0; ix < layout.width(); ++ix) {
      const CellIndex c{ix, iy};
      if (layout.blocked(c)) {
        chmap.chi.set_blocked(c, true);
        continue;
      }
      const FeatureVector x = make_features(tx, cfg, layout.cell_center(c));
      if (model.predict_raw(x) == 0) chmap.chi.set_blocked(c, true);
    }
  }
  return chmap;
}

ChMap layout_only_chmap(const GridMap& layout, int timestamp_step) {
  return ChMap{layout, timestamp_step};
}

std::optional<CoverageHoleEvent> local_detect(const ChMap& chmap,
                                              const Trajectory& traj,
                                              int k_now) {
  if (k_now < 0 || static_cast<size_t>(k_now) >= traj.samples.size()) {
    throw std::invalid_argument("local_detect: k_now outside trajectory horizon");
  }
  for (size_t k = static_cast<size_t>(k_now); k < traj.samples.size(); ++k) {
    const WorldPoint p = traj.position(k);
    if (!chmap.chi.point_free(p)) {
      return CoverageHoleEvent{static_cast<int>(k), p};
    }
  }
  return std::nullopt;
}

void save_chmap(const ChMap& chmap, const std::string& pgm_path,
                const std::string& sidecar_csv_path) {
  chmap.chi.save_pgm(pgm_path);
  if (sidecar_csv_path.empty()) return;
  std::ofstream f(sidecar_csv_path, std::ios::binary);
  if (!f) throw std::runtime_error("save_chmap: cannot open " + sidecar_csv_path);
  f << "x,y\n";
  char buf[64];
  for (int iy = 0; iy < chmap.chi.height(); ++iy) {
    for (int ix = 0; ix < chmap.chi.width(); ++ix) {
      const CellIndex c{ix, iy};
      if (!chmap.chi.blocked(c)) continue;
      const WorldPoint p = chmap.chi.cell_center(c);
      std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", p.x, p.y);
      f << buf;
    }
  }
}

}  // namespace che
