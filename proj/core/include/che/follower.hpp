#ifndef CHE_FOLLOWER_HPP
#define CHE_FOLLOWER_HPP

#include <string>
#include <vector>

#include "che/trajectory.hpp"

namespace che {

struct AgvState {
  double x{0.0};
  double y{0.0};
  double theta{0.0};  // wrapped to (-pi, pi]
  double t{0.0};
};

/// Overdamped preset: k_theta / (2 sqrt(k_y)) > 1, so heading settles
/// without oscillating through the reference line.
struct FollowerGains {
  double k_x{1.2};
  double k_y{2.0};
  double k_theta{5.0};
  double v_max{1.5};
  double omega_max{3.0};
};

struct ControlInput {
  double v{0.0};
  double omega{0.0};
};

/// Kanayama-style nonlinear tracking law. Position error is rotated into the
/// robot frame: v = v_r cos(e_theta) + k_x e_x,
/// omega = omega_r + v_r (k_y e_y + k_theta sin(e_theta)); v clamps to
/// [0, v_max] (no reversing), |omega| to omega_max.
ControlInput control_step(const AgvState& state, const TrajectorySample& ref,
                          const FollowerGains& gains);

struct FollowStep {
  AgvState state;  // before applying this step's command
  double x_err{0.0};
  double y_err{0.0};
  double xy_error{0.0};
  double theta_error{0.0};
  double v_cmd{0.0};
  double omega_cmd{0.0};
};

using FollowTrace = std::vector<FollowStep>;

/// Euler-integrated unicycle closed loop over the reference trajectory.
/// `settle_steps` extra steps hold the final reference sample so the AGV can
/// regulate onto the target. The trace holds one row per control step plus a
/// terminal row with the final state. Deterministic, no RNG.
FollowTrace simulate(const Trajectory& traj, AgvState initial,
                     const FollowerGains& gains, int settle_steps = 0);

/// Same loop with mid-simulation trajectory replacement at a step boundary:
/// reference sample k comes from `alt` once k >= switch_step (the
/// re-planning hook; both trajectories share the t = k*dt timeline).
FollowTrace simulate_with_replacement(const Trajectory& traj, int switch_step,
                                      const Trajectory& alt, AgvState initial,
                                      const FollowerGains& gains,
                                      int settle_steps = 0);

/// CSV: `t,x,y,theta,x_err,y_err,theta_err,v_cmd,omega_cmd`.
void save_follow_trace_csv(const FollowTrace& trace, double dt,
                           const std::string& path);

}  // namespace che

#endif  // CHE_FOLLOWER_HPP
