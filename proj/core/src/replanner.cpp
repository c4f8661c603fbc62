#include "che/replanner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace che {

LookAhead lat_from_event(int k_now, const CoverageHoleEvent& event, double dt) {
  if (event.k_bs < k_now) {
    throw std::invalid_argument("lat_from_event: event earlier than k_now");
  }
  return LookAhead{dt * static_cast<double>(event.k_bs - k_now)};
}

namespace {

double polyline_prefix_length(const Trajectory& traj, int from, int to) {
  double len = 0.0;
  for (int k = from + 1; k <= to; ++k) {
    len += distance(traj.position(k - 1), traj.position(k));
  }
  return len;
}

SsprResult identity_result(const Trajectory& traj, int k_now) {
  SsprResult r;
  r.replanned = false;
  r.t_re = k_now * traj.dt;
  r.sp_re = traj.position(k_now);
  r.alternative = traj;
  for (size_t k = static_cast<size_t>(k_now); k < traj.samples.size(); ++k) {
    r.alt_waypoints.push_back(traj.position(k));
  }
  r.length_remaining = path_length(r.alt_waypoints);
  r.length_total = polyline_prefix_length(traj, 0, k_now) + r.length_remaining;
  return r;
}

}  // namespace

std::optional<SsprResult> sspr(const ChMap& chmap, const PrmGraph& prm,
                               const Trajectory& traj, int k_now,
                               const std::optional<CoverageHoleEvent>& event,
                               LookAhead lat, const TrajectoryParams& tp) {
  if (traj.samples.empty()) throw std::invalid_argument("sspr: empty trajectory");
  if (k_now < 0 || static_cast<size_t>(k_now) >= traj.samples.size()) {
    throw std::invalid_argument("sspr: k_now outside trajectory horizon");
  }
  if (!event) return identity_result(traj, k_now);
  if (event->k_bs < k_now) throw std::invalid_argument("sspr: event earlier than k_now");
  if (lat.lat < 0.0) throw std::invalid_argument("sspr: negative look-ahead");

  const WorldPoint target = traj.position(traj.samples.size() - 1);
  if (!chmap.chi.point_free(target)) throw PlanningError("sspr: target blocked in chi");

  const int window = static_cast<int>(std::floor(lat.lat / traj.dt + 1e-9));
  const int i_max = std::min(k_now + window, event->k_bs - 1);

  SsprResult result;
  result.replanned = true;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double prefix_len = polyline_prefix_length(traj, 0, k_now);
  int best = -1;
  double best_total = kInf;

  for (int i = k_now; i <= i_max; ++i) {
    if (i > k_now) {
      prefix_len += distance(traj.position(i - 1), traj.position(i));
    }
    SsprCandidate cand;
    cand.index = i;
    cand.t_re = i * traj.dt;
    cand.sp_re = traj.position(i);
    cand.reroute_len = kInf;
    cand.total_len = kInf;

    const AugmentedQuery q = connect_query_points(prm, chmap, cand.sp_re, target);
    if (const auto path = astar(q.graph, q.start_id, q.goal_id)) {
      cand.feasible = true;
      cand.reroute_len = path->length;
      cand.total_len = prefix_len + path->length;
    }
    if (cand.feasible && cand.total_len < best_total) {
      best_total = cand.total_len;
      best = static_cast<int>(result.candidates.size());
    }
    result.candidates.push_back(cand);
  }
  result.candidates_evaluated = result.candidates.size();
  if (best < 0) return std::nullopt;

  SsprCandidate& chosen = result.candidates[best];
  chosen.chosen = true;
  result.t_re = chosen.t_re;
  result.sp_re = chosen.sp_re;
  result.length_total = chosen.total_len;
  result.length_remaining =
      chosen.total_len - polyline_prefix_length(traj, 0, k_now);

  const AugmentedQuery chosen_q =
      connect_query_points(prm, chmap, chosen.sp_re, target);
  const auto chosen_path = astar(chosen_q.graph, chosen_q.start_id, chosen_q.goal_id);
  const std::vector<WorldPoint> reroute_pts =
      path_waypoints(chosen_q.graph, *chosen_path);
  const auto reroute_traj = interpolate_on_map(chmap.chi, reroute_pts, tp);
  if (!reroute_traj) return std::nullopt;  // unsmoothable within chi

  result.alternative.dt = traj.dt;
  result.alternative.samples.assign(traj.samples.begin(),
                                    traj.samples.begin() + chosen.index + 1);
  result.alternative.samples.insert(result.alternative.samples.end(),
                                    reroute_traj->samples.begin() + 1,
                                    reroute_traj->samples.end());

  for (int k = k_now; k <= chosen.index; ++k) {
    result.alt_waypoints.push_back(traj.position(k));
  }
  result.alt_waypoints.insert(result.alt_waypoints.end(),
                              reroute_pts.begin() + 1, reroute_pts.end());
  return result;
}

void save_sspr_trace_csv(const SsprResult& result, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_sspr_trace_csv: cannot open " + path);
  f << "i,t_re,x_re,y_re,reroute_len,total_len,chosen\n";
  char buf[192];
  for (const SsprCandidate& c : result.candidates) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n",
                  c.index, c.t_re, c.sp_re.x, c.sp_re.y, c.reroute_len,
                  c.total_len, c.chosen ? 1 : 0);
    f << buf;
  }
}

}  // namespace che
