#ifndef CHE_CH_MAP_HPP
#define CHE_CH_MAP_HPP

#include <optional>
#include <string>

#include "che/grid_map.hpp"
#include "che/radio.hpp"
#include "che/svc.hpp"
#include "che/trajectory.hpp"

namespace che {

/// Binary coverage-hole map: the classifier's per-cell CH predictions folded
/// with the layout obstacles into one raster (blocked == CH or layout-blocked)
/// so the planner needs a single map. `chi.blocked(c)` is the chi value.
struct ChMap {
  GridMap chi;
  int timestamp_step{0};

  bool ch(CellIndex c) const { return chi.blocked(c); }
};

struct CoverageHoleEvent {
  int k_bs{0};          // time-step index of the first hole on the trajectory
  WorldPoint position;  // (x_bs, y_bs)
};

/// Evaluates the trained classifier at every free cell center of the layout;
/// a CH prediction (decision value <= model threshold) marks the cell.
/// Layout-blocked cells are always marked.
ChMap build_chmap(const SvcModel& model, const GridMap& layout,
                  const Transmitter& tx, const RadioConfig& cfg,
                  int timestamp_step = 0);

/// A chi map with no predicted holes (layout obstacles only); this is the
/// chi(k-1) the initial trajectory is planned against.
ChMap layout_only_chmap(const GridMap& layout, int timestamp_step = 0);

/// First index k >= k_now whose reference position falls in a CH cell;
/// out-of-bounds positions count as holes. nullopt when the remaining
/// trajectory is hole-free.
std::optional<CoverageHoleEvent> local_detect(const ChMap& chmap,
                                              const Trajectory& traj,
                                              int k_now);

/// PGM "P2" like GridMap (0 = CH/blocked, 255 = free) plus a sidecar CSV
/// (`x,y` per CH cell center) when sidecar_csv_path is nonempty.
void save_chmap(const ChMap& chmap, const std::string& pgm_path,
                const std::string& sidecar_csv_path = "");

}  // namespace che

#endif  // CHE_CH_MAP_HPP
