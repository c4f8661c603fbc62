#ifndef CHE_TRAJECTORY_HPP
#define CHE_TRAJECTORY_HPP

#include <optional>
#include <string>
#include <vector>

#include "che/grid_map.hpp"

namespace che {

/// One reference sample of the time-parameterized trajectory.
struct TrajectorySample {
  double x{0.0};
  double y{0.0};
  double theta{0.0};  // rad, orientation to the x-axis
  double v{0.0};      // m/s
  double omega{0.0};  // rad/s
};

/// Reference trajectory at a fixed sample interval dt; sample k is at t = k*dt.
struct Trajectory {
  double dt{0.1};
  std::vector<TrajectorySample> samples;

  double total_time() const {
    return samples.empty() ? 0.0 : dt * static_cast<double>(samples.size() - 1);
  }
  WorldPoint position(size_t k) const { return {samples[k].x, samples[k].y}; }
};

struct TrajectoryParams {
  double dt{0.1};
  double v_max{1.5};
  double v_cruise{1.0};
  double a_max{0.0};          // <= 0 picks the default v_max per second
  double max_deviation{0.25}; // m, bound on spline corner cutting
};

/// Waypoints -> clamped cubic B-spline -> arc-length parameterization with a
/// trapezoidal speed profile (ramp 0 -> v_cruise -> 0). The waypoint polyline
/// is densified so the spline stays within max_deviation of it; theta comes
/// from the analytic tangent, omega from finite differences of theta.
/// Duplicate consecutive waypoints are collapsed; throws when fewer than two
/// distinct waypoints remain or v_cruise is invalid.
Trajectory interpolate(const std::vector<WorldPoint>& waypoints,
                       const TrajectoryParams& params);

/// interpolate(), then verify every sample lies in a free cell of `chi`.
/// On violation the nearest control-polyline segment midpoint is inserted and
/// the spline rebuilt, at most `max_refinements` times; nullopt when the
/// curve still clips a blocked cell after that.
std::optional<Trajectory> interpolate_on_map(const GridMap& chi,
                                             const std::vector<WorldPoint>& waypoints,
                                             const TrajectoryParams& params,
                                             int max_refinements = 3);

double path_length(const std::vector<WorldPoint>& points);
double path_length(const Trajectory& traj);

/// CSV: header `t,x,y,theta,v,omega`, one row per sample, 6 decimals.
void save_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory_csv(const std::string& path);

}  // namespace che

#endif  // CHE_TRAJECTORY_HPP
