#include <benchmark/benchmark.h>

#include "che/planner.hpp"

namespace {

che::ChMap make_floor() {
  che::GridMap map(50, 50, 1.0, {0.0, 0.0});
  map.block_rect(14.0, 10.0, 18.0, 30.0);
  map.block_rect(30.0, 22.0, 34.0, 42.0);
  return che::layout_only_chmap(map);
}

void PrmBuild(benchmark::State& state) {
  const che::ChMap chmap = make_floor();
  const int nodes = static_cast<int>(state.range(0));
  uint64_t seed = 0;
  for (auto _ : state) {
    const che::PrmGraph g = che::prm_build(chmap, {nodes, 9.0, seed++});
    benchmark::DoNotOptimize(g.edge_count());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(PrmBuild)->Arg(100)->Arg(200)->Arg(400)->Complexity();

void AstarQuery(benchmark::State& state) {
  const che::ChMap chmap = make_floor();
  const che::PrmGraph g =
      che::prm_build(chmap, {static_cast<int>(state.range(0)), 9.0, 7});
  const che::AugmentedQuery q =
      che::connect_query_points(g, chmap, {3.0, 3.0}, {46.0, 46.0});
  for (auto _ : state) {
    auto path = che::astar(q.graph, q.start_id, q.goal_id);
    benchmark::DoNotOptimize(path);
  }
}
BENCHMARK(AstarQuery)->Arg(200)->Arg(400);

void SegmentFree(benchmark::State& state) {
  const che::ChMap chmap = make_floor();
  double x = 1.0;
  for (auto _ : state) {
    x = x < 40.0 ? x + 0.37 : 1.0;
    benchmark::DoNotOptimize(
        chmap.chi.segment_free({x, 2.0}, {48.0 - x, 47.0}));
  }
}
BENCHMARK(SegmentFree);

}  // namespace
