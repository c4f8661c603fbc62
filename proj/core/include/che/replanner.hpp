#ifndef CHE_REPLANNER_HPP
#define CHE_REPLANNER_HPP

#include <optional>
#include <string>
#include <vector>

#include "che/ch_map.hpp"
#include "che/planner.hpp"
#include "che/trajectory.hpp"

namespace che {

/// Look-ahead time bounding the SSPR candidate window, seconds.
struct LookAhead {
  double lat{0.0};
};

/// lat = dt * (k_bs - k_now). Throws when the event lies before k_now.
LookAhead lat_from_event(int k_now, const CoverageHoleEvent& event, double dt);

struct SsprCandidate {
  int index{0};         // trajectory step of the re-route departure
  double t_re{0.0};     // index * dt
  WorldPoint sp_re;
  double reroute_len{0.0};  // infinity when no re-route exists
  double total_len{0.0};    // polyline [0..index] + reroute_len
  bool feasible{false};
  bool chosen{false};
};

struct SsprResult {
  bool replanned{false};  // false: no event, original trajectory passed through
  double t_re{0.0};
  WorldPoint sp_re;
  /// Full-horizon trajectory: original samples [0..i] verbatim, then the
  /// interpolated re-route. Sample k stays at t = k*dt.
  Trajectory alternative;
  /// Defining waypoints of the alternative from k_now on: original reference
  /// positions [k_now..i] plus the PRM re-route nodes. The length fields are
  /// polyline lengths over these waypoints (the selection metric), not the
  /// arc length of the smoothed spline.
  std::vector<WorldPoint> alt_waypoints;
  double length_remaining{0.0};  // from k_now
  double length_total{0.0};      // from step 0 (used by the LAT sweep)
  size_t candidates_evaluated{0};
  std::vector<SsprCandidate> candidates;
};

/// Start Selection Path Re-planning: scans re-route departure candidates
/// SP_re(i) = reference position at step i for i in
/// [k_now, min(k_now + lat/dt, k_bs - 1)], computes the A* shortest re-route
/// from each candidate to the trajectory's target on the roadmap, and keeps
/// the shortest prefix+re-route combination (ties depart earlier).
///
/// Returns nullopt when no candidate admits a feasible re-route (or the
/// selected re-route cannot be smoothed without clipping a chi cell).
/// Without an event the original trajectory is returned unchanged.
/// Throws PlanningError when the target is blocked in chi; throws
/// std::invalid_argument on an event earlier than k_now.
std::optional<SsprResult> sspr(const ChMap& chmap, const PrmGraph& prm,
                               const Trajectory& traj, int k_now,
                               const std::optional<CoverageHoleEvent>& event,
                               LookAhead lat, const TrajectoryParams& tp);

/// Trace CSV, one row per candidate: `i,t_re,x_re,y_re,reroute_len,total_len,chosen`.
void save_sspr_trace_csv(const SsprResult& result, const std::string& path);

}  // namespace che

#endif  // CHE_REPLANNER_HPP
