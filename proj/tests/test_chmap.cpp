#include <doctest.h>

#include <cmath>

#include "che/ch_map.hpp"
#include "che/rng.hpp"

using namespace che;

TEST_SUITE_BEGIN("chmap");

namespace {

SvcModel constant_model(double bias) {
  SvcModel m;
  m.bias = bias;
  m.decision_threshold = 0.0;
  return m;
}

Trajectory straight_traj(WorldPoint a, WorldPoint b, int steps, double dt) {
  Trajectory t;
  t.dt = dt;
  for (int k = 0; k <= steps; ++k) {
    const double f = static_cast<double>(k) / steps;
    TrajectorySample s;
    s.x = a.x + f * (b.x - a.x);
    s.y = a.y + f * (b.y - a.y);
    s.theta = std::atan2(b.y - a.y, b.x - a.x);
    s.v = 1.0;
    t.samples.push_back(s);
  }
  return t;
}

}  // namespace

TEST_CASE("constant classifiers reproduce the layout or blank it out") {
  GridMap layout(15, 15, 1.0, {0.0, 0.0});
  layout.block_rect(3.0, 3.0, 5.0, 5.0);
  Transmitter tx;
  tx.position = {7.0, 7.0};
  RadioConfig cfg;

  const ChMap pass = build_chmap(constant_model(1.0), layout, tx, cfg);
  for (int iy = 0; iy < 15; ++iy) {
    for (int ix = 0; ix < 15; ++ix) {
      CHECK(pass.ch({ix, iy}) == layout.blocked({ix, iy}));
    }
  }

  const ChMap all = build_chmap(constant_model(-1.0), layout, tx, cfg);
  for (int iy = 0; iy < 15; ++iy) {
    for (int ix = 0; ix < 15; ++ix) {
      CHECK(all.ch({ix, iy}));
    }
  }
}

TEST_CASE("build_chmap equals the per-cell prediction oracle") {
  GridMap layout(20, 20, 1.0, {0.0, 0.0});
  layout.block_rect(10.0, 0.0, 12.0, 4.0);
  Transmitter tx;
  tx.position = {10.0, 10.0};
  tx.height = 3.0;
  RadioConfig cfg;

  // A real (non-constant) classifier: one support vector per corner region.
  SvcModel m;
  m.gamma = 0.02;
  m.bias = 0.4;
  m.decision_threshold = 0.1;
  FeatureVector sv1 = make_features(tx, cfg, {2.0, 2.0});
  FeatureVector sv2 = make_features(tx, cfg, {17.0, 16.0});
  m.support_vectors = {sv1, sv2};
  m.dual_coef = {-2.0, -1.5};

  const ChMap chmap = build_chmap(m, layout, tx, cfg, 4);
  CHECK(chmap.timestamp_step == 4);
  bool any_hole_on_free = false;
  for (int iy = 0; iy < 20; ++iy) {
    for (int ix = 0; ix < 20; ++ix) {
      const CellIndex c{ix, iy};
      bool expected;
      if (layout.blocked(c)) {
        expected = true;
      } else {
        const FeatureVector f = make_features(tx, cfg, layout.cell_center(c));
        expected = m.decision_value_raw(f) <= m.decision_threshold;
        if (expected) any_hole_on_free = true;
      }
      CHECK(chmap.ch(c) == expected);
    }
  }
  CHECK(any_hole_on_free);  // the oracle exercised both branches
}

TEST_CASE("raising the threshold only grows the hole set") {
  GridMap layout(12, 12, 1.0, {0.0, 0.0});
  Transmitter tx;
  tx.position = {6.0, 6.0};
  RadioConfig cfg;
  SvcModel m;
  m.gamma = 0.05;
  m.bias = 0.0;
  m.support_vectors = {make_features(tx, cfg, {3.0, 3.0})};
  m.dual_coef = {-1.0};

  m.decision_threshold = -0.5;
  const ChMap low = build_chmap(m, layout, tx, cfg);
  m.decision_threshold = -0.2;
  const ChMap high = build_chmap(m, layout, tx, cfg);
  for (int iy = 0; iy < 12; ++iy) {
    for (int ix = 0; ix < 12; ++ix) {
      if (low.ch({ix, iy})) CHECK(high.ch({ix, iy}));
    }
  }
}

TEST_CASE("local_detect finds nothing on a hole-free map") {
  GridMap layout(30, 30, 1.0, {0.0, 0.0});
  const ChMap chmap = layout_only_chmap(layout);
  const Trajectory traj = straight_traj({1.0, 1.0}, {28.0, 28.0}, 300, 0.1);
  CHECK_FALSE(local_detect(chmap, traj, 0).has_value());
}

TEST_CASE("local_detect reports the hole the trajectory crosses") {
  GridMap layout(30, 30, 1.0, {0.0, 0.0});
  ChMap chmap = layout_only_chmap(layout);
  chmap.chi.set_blocked(*chmap.chi.world_to_cell({20.0, 21.0}), true);

  // A trajectory whose samples include exactly (20, 21).
  const Trajectory traj = straight_traj({10.0, 11.0}, {25.0, 26.0}, 300, 0.1);
  const auto event = local_detect(chmap, traj, 0);
  REQUIRE(event.has_value());
  CHECK(event->position.x == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(event->position.y == doctest::Approx(21.0).epsilon(1e-9));
  CHECK(traj.position(event->k_bs).x == event->position.x);
}

TEST_CASE("local_detect equals a linear scan and is the minimum index") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    GridMap layout(20, 20, 1.0, {0.0, 0.0});
    ChMap chmap = layout_only_chmap(layout);
    for (int i = 0; i < 40; ++i) {
      chmap.chi.set_blocked({static_cast<int>(rng.uniform_int(20)),
                             static_cast<int>(rng.uniform_int(20))},
                            true);
    }
    const Trajectory traj = straight_traj(
        {rng.uniform(0.5, 19.5), rng.uniform(0.5, 19.5)},
        {rng.uniform(0.5, 19.5), rng.uniform(0.5, 19.5)}, 200, 0.1);
    const int k_now = static_cast<int>(rng.uniform_int(50));

    std::optional<int> expected;
    for (size_t k = k_now; k < traj.samples.size(); ++k) {
      if (!chmap.chi.point_free(traj.position(k))) {
        expected = static_cast<int>(k);
        break;
      }
    }
    const auto event = local_detect(chmap, traj, k_now);
    CHECK(event.has_value() == expected.has_value());
    if (event && expected) {
      CHECK(event->k_bs == *expected);
      for (int k = k_now; k < event->k_bs; ++k) {
        CHECK(chmap.chi.point_free(traj.position(k)));
      }
    }
  }
}

TEST_CASE("out-of-bounds reference positions count as holes") {
  GridMap layout(10, 10, 1.0, {0.0, 0.0});
  const ChMap chmap = layout_only_chmap(layout);
  const Trajectory traj = straight_traj({8.0, 8.0}, {12.0, 8.0}, 40, 0.1);
  const auto event = local_detect(chmap, traj, 0);
  REQUIRE(event.has_value());
  CHECK(traj.position(event->k_bs).x >= 10.0);
}

TEST_CASE("local_detect validates k_now") {
  GridMap layout(10, 10, 1.0, {0.0, 0.0});
  const ChMap chmap = layout_only_chmap(layout);
  const Trajectory traj = straight_traj({1.0, 1.0}, {8.0, 8.0}, 10, 0.1);
  CHECK_THROWS(local_detect(chmap, traj, -1));
  CHECK_THROWS(local_detect(chmap, traj, 11));
}

TEST_SUITE_END();
