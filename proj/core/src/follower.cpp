#include "che/follower.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace che {

ControlInput control_step(const AgvState& state, const TrajectorySample& ref,
                          const FollowerGains& gains) {
  const double dx = ref.x - state.x;
  const double dy = ref.y - state.y;
  const double c = std::cos(state.theta), s = std::sin(state.theta);
  const double e_x = c * dx + s * dy;
  const double e_y = -s * dx + c * dy;
  const double e_theta = wrap_angle(ref.theta - state.theta);

  double v = ref.v * std::cos(e_theta) + gains.k_x * e_x;
  double omega = ref.omega + ref.v * (gains.k_y * e_y + gains.k_theta * std::sin(e_theta));
  v = std::clamp(v, 0.0, gains.v_max);
  omega = std::clamp(omega, -gains.omega_max, gains.omega_max);
  return {v, omega};
}

namespace {

FollowTrace run_loop(const Trajectory& traj, const Trajectory* alt,
                     int switch_step, AgvState state,
                     const FollowerGains& gains, int settle_steps) {
  const double dt = traj.dt;
  const auto ref_at = [&](size_t k) -> const TrajectorySample& {
    const Trajectory& active =
        (alt != nullptr && static_cast<int>(k) >= switch_step) ? *alt : traj;
    if (k < active.samples.size()) return active.samples[k];
    return active.samples.back();
  };
  // One control step per sample interval: the command at sample k carries
  // the AGV to sample k+1's instant; no step is applied at the horizon end.
  const size_t horizon =
      (alt ? std::max(traj.samples.size(), alt->samples.size())
           : traj.samples.size()) +
      static_cast<size_t>(settle_steps);

  FollowTrace trace;
  trace.reserve(horizon + 1);
  for (size_t k = 0; k + 1 < horizon; ++k) {
    const TrajectorySample& ref = ref_at(k);
    FollowStep step;
    step.state = state;
    step.x_err = ref.x - state.x;
    step.y_err = ref.y - state.y;
    step.xy_error = std::hypot(step.x_err, step.y_err);
    step.theta_error = wrap_angle(ref.theta - state.theta);
    const ControlInput u = control_step(state, ref, gains);
    step.v_cmd = u.v;
    step.omega_cmd = u.omega;
    trace.push_back(step);

    state.x += u.v * std::cos(state.theta) * dt;
    state.y += u.v * std::sin(state.theta) * dt;
    state.theta = wrap_angle(state.theta + u.omega * dt);
    state.t += dt;
  }

  const TrajectorySample& last = ref_at(horizon - 1);
  FollowStep final_step;
  final_step.state = state;
  final_step.x_err = last.x - state.x;
  final_step.y_err = last.y - state.y;
  final_step.xy_error = std::hypot(final_step.x_err, final_step.y_err);
  final_step.theta_error = wrap_angle(last.theta - state.theta);
  trace.push_back(final_step);
  return trace;
}

}  // namespace

FollowTrace simulate(const Trajectory& traj, AgvState initial,
                     const FollowerGains& gains, int settle_steps) {
  if (traj.samples.empty()) throw std::invalid_argument("simulate: empty trajectory");
  return run_loop(traj, nullptr, 0, initial, gains, settle_steps);
}

FollowTrace simulate_with_replacement(const Trajectory& traj, int switch_step,
                                      const Trajectory& alt, AgvState initial,
                                      const FollowerGains& gains,
                                      int settle_steps) {
  if (traj.samples.empty() || alt.samples.empty()) {
    throw std::invalid_argument("simulate_with_replacement: empty trajectory");
  }
  if (traj.dt != alt.dt) {
    throw std::invalid_argument("simulate_with_replacement: dt mismatch");
  }
  return run_loop(traj, &alt, switch_step, initial, gains, settle_steps);
}

void save_follow_trace_csv(const FollowTrace& trace, double dt,
                           const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_follow_trace_csv: cannot open " + path);
  f << "t,x,y,theta,x_err,y_err,theta_err,v_cmd,omega_cmd\n";
  char buf[256];
  for (size_t k = 0; k < trace.size(); ++k) {
    const FollowStep& s = trace[k];
    std::snprintf(buf, sizeof(buf),
                  "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", k * dt,
                  s.state.x, s.state.y, s.state.theta, s.x_err, s.y_err,
                  s.theta_error, s.v_cmd, s.omega_cmd);
    f << buf;
  }
}

}  // namespace che
