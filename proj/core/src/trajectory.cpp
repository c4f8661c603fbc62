#include "che/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace che {

namespace {

// Clamped uniform cubic B-spline over the given control points. Parameter
// domain [0, m-3] for m control points; the curve interpolates the endpoints.
class CubicBSpline {
 public:
  explicit CubicBSpline(std::vector<WorldPoint> control)
      : p_(std::move(control)) {
    if (p_.size() < 4) throw std::invalid_argument("CubicBSpline: need >= 4 control points");
    const int m = static_cast<int>(p_.size());
    // knots: 0,0,0,0, 1, 2, ..., m-4, (m-3) x4
    knots_.resize(m + 4);
    for (int i = 0; i < m + 4; ++i) {
      knots_[i] = std::clamp(i - 3, 0, m - 3);
    }
  }

  double u_max() const { return static_cast<double>(p_.size() - 3); }

  WorldPoint position(double u) const {
    return de_boor(u, 3, p_, knots_);
  }

  WorldPoint derivative(double u) const {
    // C'(u) is a quadratic B-spline with hodograph control points.
    if (dq_.empty()) build_hodograph();
    return de_boor(u, 2, dq_, dknots_);
  }

 private:
  void build_hodograph() const {
    const int m = static_cast<int>(p_.size());
    dq_.resize(m - 1);
    for (int i = 0; i + 1 < m; ++i) {
      const double span = knots_[i + 4] - knots_[i + 1];
      const double s = span > 0.0 ? 3.0 / span : 0.0;
      dq_[i] = {s * (p_[i + 1].x - p_[i].x), s * (p_[i + 1].y - p_[i].y)};
    }
    dknots_.assign(knots_.begin() + 1, knots_.end() - 1);
  }

  static WorldPoint de_boor(double u, int degree,
                            const std::vector<WorldPoint>& ctrl,
                            const std::vector<double>& knots) {
    const int m = static_cast<int>(ctrl.size());
    const double lo = knots[degree];
    const double hi = knots[m];
    u = std::clamp(u, lo, hi);
    // Find span k with knots[k] <= u < knots[k+1] (last span closed on top).
    int k = degree;
    while (k + 1 < m && u >= knots[k + 1]) ++k;

    std::vector<WorldPoint> d(degree + 1);
    for (int j = 0; j <= degree; ++j) d[j] = ctrl[k - degree + j];
    for (int r = 1; r <= degree; ++r) {
      for (int j = degree; j >= r; --j) {
        const int i = k - degree + j;
        const double den = knots[i + degree + 1 - r] - knots[i];
        const double a = den > 0.0 ? (u - knots[i]) / den : 0.0;
        d[j] = {(1.0 - a) * d[j - 1].x + a * d[j].x,
                (1.0 - a) * d[j - 1].y + a * d[j].y};
      }
    }
    return d[degree];
  }

  std::vector<WorldPoint> p_;
  std::vector<double> knots_;
  mutable std::vector<WorldPoint> dq_;
  mutable std::vector<double> dknots_;
};

std::vector<WorldPoint> collapse_duplicates(const std::vector<WorldPoint>& pts) {
  std::vector<WorldPoint> out;
  for (const auto& p : pts) {
    if (out.empty() || distance(out.back(), p) > 1e-12) out.push_back(p);
  }
  return out;
}

// Subdivide polyline segments so consecutive control points are at most
// `spacing` apart; bounded spacing bounds the spline's corner cutting.
std::vector<WorldPoint> densify(const std::vector<WorldPoint>& pts,
                                double spacing) {
  std::vector<WorldPoint> out;
  out.push_back(pts.front());
  for (size_t i = 1; i < pts.size(); ++i) {
    const WorldPoint& a = pts[i - 1];
    const WorldPoint& b = pts[i];
    const double len = distance(a, b);
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int k = 1; k <= pieces; ++k) {
      const double t = static_cast<double>(k) / pieces;
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

// Trapezoidal speed profile over path length L: ramp with accel a to
// v_cruise, cruise, ramp down; degenerates to a triangle on short paths.
struct SpeedProfile {
  double accel, v_peak, t_ramp, t_cruise, length;

  SpeedProfile(double L, double v_cruise, double a) : accel(a), length(L) {
    const double d_ramp = v_cruise * v_cruise / (2.0 * a);
    if (2.0 * d_ramp >= L) {
      v_peak = std::sqrt(a * L);
      t_ramp = v_peak / a;
      t_cruise = 0.0;
    } else {
      v_peak = v_cruise;
      t_ramp = v_cruise / a;
      t_cruise = (L - 2.0 * d_ramp) / v_cruise;
    }
  }

  double total_time() const { return 2.0 * t_ramp + t_cruise; }

  double speed(double t) const {
    if (t <= 0.0) return 0.0;
    if (t < t_ramp) return accel * t;
    if (t < t_ramp + t_cruise) return v_peak;
    const double td = total_time() - t;
    return td > 0.0 ? accel * td : 0.0;
  }

  double arc(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= total_time()) return length;
    if (t < t_ramp) return 0.5 * accel * t * t;
    const double d_ramp = 0.5 * accel * t_ramp * t_ramp;
    if (t < t_ramp + t_cruise) return d_ramp + v_peak * (t - t_ramp);
    const double td = total_time() - t;
    return length - 0.5 * accel * td * td;
  }
};

struct ArcTable {
  std::vector<double> u;
  std::vector<double> s;

  double u_at(double arc) const {
    if (arc <= 0.0) return u.front();
    if (arc >= s.back()) return u.back();
    const auto it = std::upper_bound(s.begin(), s.end(), arc);
    const size_t hi = static_cast<size_t>(it - s.begin());
    const size_t lo = hi - 1;
    const double span = s[hi] - s[lo];
    const double t = span > 0.0 ? (arc - s[lo]) / span : 0.0;
    return u[lo] + t * (u[hi] - u[lo]);
  }
};

ArcTable build_arc_table(const CubicBSpline& spline) {
  // Chord-length accumulation on a dense parameter grid; 32 samples per knot
  // span keeps the s->u lookup error far below the 1e-6 resampling contract.
  const int spans = static_cast<int>(std::lround(spline.u_max()));
  const int steps = 32 * std::max(spans, 1);
  ArcTable table;
  table.u.resize(steps + 1);
  table.s.resize(steps + 1);
  WorldPoint prev = spline.position(0.0);
  table.u[0] = 0.0;
  table.s[0] = 0.0;
  for (int i = 1; i <= steps; ++i) {
    const double u = spline.u_max() * i / steps;
    const WorldPoint p = spline.position(u);
    table.u[i] = u;
    table.s[i] = table.s[i - 1] + distance(prev, p);
    prev = p;
  }
  return table;
}

Trajectory sample_trajectory(const CubicBSpline& spline, const ArcTable& table,
                             const TrajectoryParams& params) {
  const double accel = params.a_max > 0.0 ? params.a_max : params.v_max;
  const SpeedProfile profile(table.s.back(), params.v_cruise, accel);
  const double T = profile.total_time();
  const int steps = static_cast<int>(std::ceil(T / params.dt - 1e-9));

  Trajectory traj;
  traj.dt = params.dt;
  traj.samples.resize(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    const double t = std::min(k * params.dt, T);
    const double u = table.u_at(profile.arc(t));
    const WorldPoint p = spline.position(u);
    const WorldPoint d = spline.derivative(u);
    TrajectorySample& s = traj.samples[k];
    s.x = p.x;
    s.y = p.y;
    s.theta = std::atan2(d.y, d.x);
    s.v = std::min(profile.speed(t), params.v_max);
  }
  for (int k = 0; k < steps; ++k) {
    traj.samples[k].omega =
        wrap_angle(traj.samples[k + 1].theta - traj.samples[k].theta) / params.dt;
  }
  if (steps > 0) traj.samples[steps].omega = traj.samples[steps - 1].omega;
  return traj;
}

}  // namespace

Trajectory interpolate(const std::vector<WorldPoint>& waypoints,
                       const TrajectoryParams& params) {
  if (!(params.v_cruise > 0.0)) throw std::invalid_argument("interpolate: v_cruise must be > 0");
  if (params.v_cruise > params.v_max + 1e-12) {
    throw std::invalid_argument("interpolate: v_cruise must not exceed v_max");
  }
  const std::vector<WorldPoint> distinct = collapse_duplicates(waypoints);
  if (distinct.size() < 2) {
    throw std::invalid_argument("interpolate: need at least two distinct waypoints");
  }
  // Spacing 3x the deviation bound: a cubic B-spline stays within
  // |second difference|/6 <= 2h/6 of its control polygon at the knots.
  const double spacing = 3.0 * std::max(params.max_deviation, 1e-3);
  std::vector<WorldPoint> control = densify(distinct, spacing);
  while (control.size() < 4) control = densify(control, spacing / 2.0);

  const CubicBSpline spline(control);
  return sample_trajectory(spline, build_arc_table(spline), params);
}

std::optional<Trajectory> interpolate_on_map(
    const GridMap& chi, const std::vector<WorldPoint>& waypoints,
    const TrajectoryParams& params, int max_refinements) {
  std::vector<WorldPoint> control = collapse_duplicates(waypoints);
  if (control.size() < 2) {
    throw std::invalid_argument("interpolate_on_map: need at least two distinct waypoints");
  }

  for (int attempt = 0; attempt <= max_refinements; ++attempt) {
    Trajectory traj = interpolate(control, params);
    std::vector<size_t> insert_before;
    for (const TrajectorySample& s : traj.samples) {
      if (chi.point_free({s.x, s.y})) continue;
      // Pull the spline back toward the collision-free polyline: insert the
      // midpoint of the control segment nearest to the violating sample.
      size_t best = 1;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (size_t i = 1; i < control.size(); ++i) {
        const WorldPoint& a = control[i - 1];
        const WorldPoint& b = control[i];
        const double dx = b.x - a.x, dy = b.y - a.y;
        const double len2 = dx * dx + dy * dy;
        double t = len2 > 0.0 ? ((s.x - a.x) * dx + (s.y - a.y) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double ex = a.x + t * dx - s.x, ey = a.y + t * dy - s.y;
        const double d2 = ex * ex + ey * ey;
        if (d2 < best_d2) {
          best_d2 = d2;
          best = i;
        }
      }
      insert_before.push_back(best);
    }
    if (insert_before.empty()) return traj;
    if (attempt == max_refinements) break;

    std::sort(insert_before.begin(), insert_before.end());
    insert_before.erase(std::unique(insert_before.begin(), insert_before.end()),
                        insert_before.end());
    for (size_t n = insert_before.size(); n-- > 0;) {
      const size_t i = insert_before[n];
      const WorldPoint mid{(control[i - 1].x + control[i].x) / 2.0,
                           (control[i - 1].y + control[i].y) / 2.0};
      control.insert(control.begin() + static_cast<long>(i), mid);
    }
  }
  return std::nullopt;
}

double path_length(const std::vector<WorldPoint>& points) {
  double len = 0.0;
  for (size_t i = 1; i < points.size(); ++i) len += distance(points[i - 1], points[i]);
  return len;
}

double path_length(const Trajectory& traj) {
  double len = 0.0;
  for (size_t i = 1; i < traj.samples.size(); ++i) {
    len += distance(traj.position(i - 1), traj.position(i));
  }
  return len;
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_trajectory_csv: cannot open " + path);
  f << "t,x,y,theta,v,omega\n";
  char buf[192];
  for (size_t k = 0; k < traj.samples.size(); ++k) {
    const TrajectorySample& s = traj.samples[k];
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                  k * traj.dt, s.x, s.y, s.theta, s.v, s.omega);
    f << buf;
  }
}

Trajectory load_trajectory_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_trajectory_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("load_trajectory_csv: empty file " + path);
  Trajectory traj;
  std::vector<double> times;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    double t;
    TrajectorySample s;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &t, &s.x, &s.y,
                    &s.theta, &s.v, &s.omega) != 6) {
      throw std::runtime_error("load_trajectory_csv: malformed row in " + path);
    }
    times.push_back(t);
    traj.samples.push_back(s);
  }
  if (times.size() >= 2) traj.dt = times[1] - times[0];
  return traj;
}

}  // namespace che
