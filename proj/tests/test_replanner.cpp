#include <doctest.h>

#include <cmath>
#include <limits>

#include "che/replanner.hpp"
#include "che/rng.hpp"
#include "oracles.hpp"

using namespace che;

TEST_SUITE_BEGIN("replanner");

namespace {

struct ReplanWorld {
  ChMap chmap;
  PrmGraph prm;
  Trajectory traj;
  std::optional<CoverageHoleEvent> event;
  TrajectoryParams tp;

  explicit ReplanWorld(uint64_t seed, int grid = 15, double hole_x = 7.0,
                       double hole_y = 7.0, double hole_r = 1.6)
      : chmap{GridMap(grid, grid, 1.0, {0.0, 0.0}), 1} {
    tp.dt = 0.1;
    tp.v_max = 1.5;
    tp.v_cruise = 1.0;
    tp.max_deviation = 0.25;

    // Initial trajectory planned with no hole knowledge: straight diagonal.
    const ChMap free_chi = layout_only_chmap(
        GridMap(grid, grid, 1.0, {0.0, 0.0}));
    traj = *interpolate_on_map(free_chi.chi,
                               {{1.2, 1.2}, {grid - 1.8, grid - 1.8}}, tp);

    for (int iy = 0; iy < grid; ++iy) {
      for (int ix = 0; ix < grid; ++ix) {
        const WorldPoint c = chmap.chi.cell_center({ix, iy});
        if (std::hypot(c.x - hole_x, c.y - hole_y) <= hole_r) {
          chmap.chi.set_blocked({ix, iy}, true);
        }
      }
    }
    prm = prm_build(chmap, {80, 6.0, seed});
    event = local_detect(chmap, traj, 0);
  }
};

double oracle_best_total(const ChMap& chmap, const PrmGraph& prm,
                         const Trajectory& traj, int k_now,
                         const CoverageHoleEvent& event, double lat) {
  const WorldPoint target = traj.position(traj.samples.size() - 1);
  const int window = static_cast<int>(std::floor(lat / traj.dt + 1e-9));
  const int i_max = std::min(k_now + window, event.k_bs - 1);
  double best = std::numeric_limits<double>::infinity();
  for (int i = k_now; i <= i_max; ++i) {
    double prefix = 0.0;
    for (int k = 1; k <= i; ++k) {
      prefix += distance(traj.position(k - 1), traj.position(k));
    }
    const AugmentedQuery q =
        connect_query_points(prm, chmap, traj.position(i), target);
    const auto len = oracle::dijkstra_length(q.graph, q.start_id, q.goal_id);
    if (len) best = std::min(best, prefix + *len);
  }
  return best;
}

}  // namespace

TEST_CASE("lat_from_event formula") {
  CoverageHoleEvent e{10, {0.0, 0.0}};
  CHECK(lat_from_event(10, e, 0.1).lat == 0.0);

  e.k_bs = 77;
  CHECK(lat_from_event(10, e, 0.1).lat == doctest::Approx(6.7).epsilon(1e-12));

  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const int k_now = static_cast<int>(rng.uniform_int(100));
    const int k_bs = k_now + static_cast<int>(rng.uniform_int(200));
    const double dt = rng.uniform(0.01, 0.5);
    CHECK(lat_from_event(k_now, {k_bs, {0, 0}}, dt).lat ==
          doctest::Approx(dt * (k_bs - k_now)).epsilon(1e-12));
  }

  e.k_bs = 5;
  CHECK_THROWS(lat_from_event(10, e, 0.1));
}

TEST_CASE("no event returns the original trajectory unchanged") {
  ReplanWorld w(3);
  const auto result = sspr(w.chmap, w.prm, w.traj, 0, std::nullopt,
                           LookAhead{5.0}, w.tp);
  REQUIRE(result.has_value());
  CHECK_FALSE(result->replanned);
  REQUIRE(result->alternative.samples.size() == w.traj.samples.size());
  for (size_t k = 0; k < w.traj.samples.size(); ++k) {
    CHECK(result->alternative.samples[k].x == w.traj.samples[k].x);
    CHECK(result->alternative.samples[k].y == w.traj.samples[k].y);
  }
}

TEST_CASE("zero look-ahead departs immediately") {
  ReplanWorld w(4);
  REQUIRE(w.event.has_value());
  const auto result = sspr(w.chmap, w.prm, w.traj, 0, w.event, LookAhead{0.0}, w.tp);
  REQUIRE(result.has_value());
  CHECK(result->candidates_evaluated == 1);
  CHECK(result->candidates[0].index == 0);
  CHECK(result->t_re == 0.0);
}

TEST_CASE("sspr matches the exhaustive dijkstra oracle") {
  int checked = 0;
  for (uint64_t seed = 0; seed < 12; ++seed) {
    ReplanWorld w(100 + seed);
    if (!w.event) continue;
    const LookAhead lat = lat_from_event(0, *w.event, w.traj.dt);
    const auto result = sspr(w.chmap, w.prm, w.traj, 0, w.event, lat, w.tp);
    const double expected =
        oracle_best_total(w.chmap, w.prm, w.traj, 0, *w.event, lat.lat);
    if (!result) {
      CHECK(std::isinf(expected));
      continue;
    }
    ++checked;
    CHECK(result->length_total == doctest::Approx(expected).epsilon(1e-9));
  }
  CHECK(checked >= 8);
}

TEST_CASE("no enumerated candidate beats the chosen one") {
  ReplanWorld w(7);
  REQUIRE(w.event.has_value());
  const LookAhead lat = lat_from_event(0, *w.event, w.traj.dt);
  const auto result = sspr(w.chmap, w.prm, w.traj, 0, w.event, lat, w.tp);
  REQUIRE(result.has_value());
  int chosen_count = 0;
  for (const SsprCandidate& c : result->candidates) {
    if (c.feasible) CHECK(c.total_len >= result->length_total - 1e-9);
    chosen_count += c.chosen;
  }
  CHECK(chosen_count == 1);
  CHECK(result->candidates_evaluated == result->candidates.size());
}

TEST_CASE("ties depart earlier") {
  ReplanWorld w(9);
  REQUIRE(w.event.has_value());
  const LookAhead lat = lat_from_event(0, *w.event, w.traj.dt);
  const auto result = sspr(w.chmap, w.prm, w.traj, 0, w.event, lat, w.tp);
  REQUIRE(result.has_value());
  for (const SsprCandidate& c : result->candidates) {
    if (c.chosen) break;
    // Everything enumerated before the chosen index must be strictly worse.
    CHECK(c.total_len > result->length_total);
  }
}

TEST_CASE("prefix preservation and chi safety of the alternative") {
  ReplanWorld w(11);
  REQUIRE(w.event.has_value());
  const int k_now = 0;
  const LookAhead lat = lat_from_event(k_now, *w.event, w.traj.dt);
  const auto result = sspr(w.chmap, w.prm, w.traj, k_now, w.event, lat, w.tp);
  REQUIRE(result.has_value());

  const int depart = static_cast<int>(std::lround(result->t_re / w.traj.dt));
  CHECK(depart >= k_now);
  CHECK(depart < w.event->k_bs);
  for (int k = 0; k <= depart; ++k) {
    CHECK(result->alternative.samples[k].x == w.traj.samples[k].x);
    CHECK(result->alternative.samples[k].y == w.traj.samples[k].y);
    CHECK(result->alternative.samples[k].theta == w.traj.samples[k].theta);
  }
  for (size_t k = k_now; k < result->alternative.samples.size(); ++k) {
    CHECK(w.chmap.chi.point_free(result->alternative.position(k)));
  }
  CHECK(path_length(result->alt_waypoints) ==
        doctest::Approx(result->length_remaining).epsilon(1e-9));
}

TEST_CASE("unreachable target is an explicit failure") {
  ReplanWorld w(13);
  REQUIRE(w.event.has_value());
  // Wall off the target corner entirely.
  for (int iy = 0; iy < 15; ++iy) {
    for (int ix = 0; ix < 15; ++ix) {
      if (ix + iy >= 22) w.chmap.chi.set_blocked({ix, iy}, true);
    }
  }
  CHECK_THROWS_AS(sspr(w.chmap, w.prm, w.traj, 0, w.event,
                       lat_from_event(0, *w.event, w.traj.dt), w.tp),
                  PlanningError);  // the target itself is blocked

  // Keep the target free but isolate it behind a ring of holes.
  ReplanWorld w2(14);
  REQUIRE(w2.event.has_value());
  const WorldPoint target = w2.traj.position(w2.traj.samples.size() - 1);
  for (int iy = 0; iy < 15; ++iy) {
    for (int ix = 0; ix < 15; ++ix) {
      const WorldPoint c = w2.chmap.chi.cell_center({ix, iy});
      const double d = std::hypot(c.x - target.x, c.y - target.y);
      if (d > 1.1 && d <= 3.2) w2.chmap.chi.set_blocked({ix, iy}, true);
    }
  }
  const PrmGraph prm = prm_build(w2.chmap, {60, 6.0, 21});
  const auto blocked = sspr(w2.chmap, prm, w2.traj, 0, w2.event,
                            lat_from_event(0, *w2.event, w2.traj.dt), w2.tp);
  CHECK_FALSE(blocked.has_value());
}

TEST_CASE("event earlier than k_now is caller misuse") {
  ReplanWorld w(15);
  REQUIRE(w.event.has_value());
  CHECK_THROWS_AS(sspr(w.chmap, w.prm, w.traj, w.event->k_bs + 1, w.event,
                       LookAhead{1.0}, w.tp),
                  std::invalid_argument);
}

TEST_CASE("longer look-ahead never lengthens the alternative") {
  // Same roadmap, wider candidate window: the minimum over a superset.
  for (uint64_t seed = 40; seed < 46; ++seed) {
    ReplanWorld w(seed);
    if (!w.event) continue;
    const double full = lat_from_event(0, *w.event, w.traj.dt).lat;
    double prev = std::numeric_limits<double>::infinity();
    for (double lat : {0.0, full / 3.0, 2.0 * full / 3.0, full}) {
      const auto r = sspr(w.chmap, w.prm, w.traj, 0, w.event, LookAhead{lat}, w.tp);
      if (!r) continue;
      CHECK(r->length_total <= prev + 1e-9);
      prev = std::min(prev, r->length_total);
    }
  }
}

TEST_SUITE_END();
