#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "che/planner.hpp"
#include "che/rng.hpp"
#include "oracles.hpp"

using namespace che;

TEST_SUITE_BEGIN("planner");

namespace {

ChMap open_floor(int n) {
  return layout_only_chmap(GridMap(n, n, 1.0, {0.0, 0.0}));
}

ChMap random_floor(int n, int blocked_cells, uint64_t seed) {
  GridMap map(n, n, 1.0, {0.0, 0.0});
  Rng rng(seed);
  for (int i = 0; i < blocked_cells; ++i) {
    map.set_blocked({static_cast<int>(rng.uniform_int(n)),
                     static_cast<int>(rng.uniform_int(n))},
                    true);
  }
  return layout_only_chmap(map);
}

}  // namespace

TEST_CASE("two nodes on an open map form one edge") {
  const ChMap chmap = open_floor(10);
  const PrmGraph g = prm_build(chmap, {2, 100.0, 7});
  CHECK(g.nodes.size() == 2);
  CHECK(g.edge_count() == 1);
}

TEST_CASE("zero radius yields zero edges") {
  const ChMap chmap = open_floor(10);
  const PrmGraph g = prm_build(chmap, {15, 0.0, 7});
  CHECK(g.nodes.size() == 15);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("edge set equals the pairwise brute force") {
  const ChMap chmap = random_floor(25, 120, 3);
  const PrmGraph g = prm_build(chmap, {30, 8.0, 11});
  REQUIRE(g.nodes.size() == 30);

  size_t expected_edges = 0;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    for (size_t j = i + 1; j < g.nodes.size(); ++j) {
      const double d = distance(g.nodes[i], g.nodes[j]);
      const bool should =
          d <= 8.0 && d > 0.0 && chmap.chi.segment_free(g.nodes[i], g.nodes[j]);
      const auto& adj = g.adjacency[i];
      const bool has = std::any_of(adj.begin(), adj.end(), [&](const auto& e) {
        return e.first == static_cast<int>(j);
      });
      CHECK(has == should);
      expected_edges += should;
    }
  }
  CHECK(g.edge_count() == expected_edges);

  // PrmGraph invariants: nodes in free space, weights consistent.
  for (const WorldPoint& p : g.nodes) CHECK(chmap.chi.point_free(p));
  for (size_t i = 0; i < g.adjacency.size(); ++i) {
    for (const auto& [j, w] : g.adjacency[i]) {
      CHECK(w <= 8.0);
      CHECK(j != static_cast<int>(i));
      CHECK(w == doctest::Approx(distance(g.nodes[i], g.nodes[j])).epsilon(1e-12));
    }
  }
}

TEST_CASE("same seed with larger node count extends the node set") {
  const ChMap chmap = random_floor(20, 60, 5);
  const PrmGraph small = prm_build(chmap, {20, 6.0, 42});
  const PrmGraph large = prm_build(chmap, {40, 6.0, 42});
  for (size_t i = 0; i < small.nodes.size(); ++i) {
    CHECK(small.nodes[i].x == large.nodes[i].x);
    CHECK(small.nodes[i].y == large.nodes[i].y);
  }
}

TEST_CASE("sampling a nearly full map errors out") {
  GridMap map(10, 10, 1.0, {0.0, 0.0}, /*blocked=*/true);
  const ChMap chmap = layout_only_chmap(map);
  CHECK_THROWS_AS(prm_build(chmap, {5, 3.0, 1}), PlanningError);
}

TEST_CASE("query points connect under the same rule, zero edges allowed") {
  const ChMap chmap = open_floor(12);
  const PrmGraph g = prm_build(chmap, {10, 5.0, 9});

  const WorldPoint on_node = g.nodes[0];
  const AugmentedQuery q = connect_query_points(g, chmap, on_node, {11.0, 11.0});
  CHECK(q.graph.nodes.size() == g.nodes.size() + 2);
  // The start coincides with node 0: a zero-length edge must exist.
  const auto& adj = q.graph.adjacency[q.start_id];
  CHECK(std::any_of(adj.begin(), adj.end(),
                    [](const auto& e) { return e.first == 0 && e.second == 0.0; }));

  // The base graph is untouched.
  CHECK(g.nodes.size() == 10);
  for (const auto& a : g.adjacency) {
    for (const auto& [j, w] : a) CHECK(j < 10);
  }
}

TEST_CASE("blocked query points are planning errors") {
  ChMap chmap = open_floor(12);
  chmap.chi.set_blocked({6, 6}, true);
  const PrmGraph g = prm_build(chmap, {8, 5.0, 2});
  CHECK_THROWS_AS(connect_query_points(g, chmap, {6.5, 6.5}, {1.0, 1.0}),
                  PlanningError);
  CHECK_THROWS_AS(connect_query_points(g, chmap, {1.0, 1.0}, {6.5, 6.5}),
                  PlanningError);
}

TEST_CASE("astar trivial cases") {
  // Weights at or above the chord lengths keep the heuristic admissible
  // (PRM edges always satisfy this: weight == chord).
  PrmGraph g;
  g.nodes = {{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.2}};
  g.adjacency.resize(3);
  auto connect = [&](int a, int b, double w) {
    g.adjacency[a].emplace_back(b, w);
    g.adjacency[b].emplace_back(a, w);
  };
  connect(0, 1, 3.0);
  connect(0, 2, 1.0);
  connect(2, 1, 1.0);

  const auto self = astar(g, 1, 1);
  REQUIRE(self.has_value());
  CHECK(self->nodes == std::vector<int>{1});
  CHECK(self->length == 0.0);

  const auto two_hop = astar(g, 0, 1);
  REQUIRE(two_hop.has_value());
  CHECK(two_hop->length == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(two_hop->nodes == std::vector<int>{0, 2, 1});
}

TEST_CASE("astar returns no-path as a value") {
  PrmGraph g;
  g.nodes = {{0.0, 0.0}, {5.0, 0.0}};
  g.adjacency.resize(2);
  CHECK_FALSE(astar(g, 0, 1).has_value());
}

TEST_CASE("astar equals dijkstra on random roadmaps") {
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const ChMap chmap = random_floor(18, 80, 1000 + trial);
    PrmGraph g;
    try {
      g = prm_build(chmap, {2 + static_cast<int>(rng.uniform_int(30)),
                            rng.uniform(2.0, 9.0),
                            2000 + static_cast<uint64_t>(trial)});
    } catch (const PlanningError&) {
      continue;  // free space too small for this draw
    }
    const int s = static_cast<int>(rng.uniform_int(g.nodes.size()));
    const int t = static_cast<int>(rng.uniform_int(g.nodes.size()));
    const auto fast = astar(g, s, t);
    const auto slow = oracle::dijkstra_length(g, s, t);
    CHECK(fast.has_value() == slow.has_value());
    if (fast && slow) {
      CHECK(fast->length == doctest::Approx(*slow).epsilon(1e-9));
      // Path edges exist and sum to the reported length.
      double sum = 0.0;
      for (size_t k = 1; k < fast->nodes.size(); ++k) {
        const auto& adj = g.adjacency[fast->nodes[k - 1]];
        const auto it = std::find_if(adj.begin(), adj.end(), [&](const auto& e) {
          return e.first == fast->nodes[k];
        });
        REQUIRE(it != adj.end());
        sum += it->second;
      }
      CHECK(sum == doctest::Approx(fast->length).epsilon(1e-9));
    }
  }
}

TEST_SUITE_END();
