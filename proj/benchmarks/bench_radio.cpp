#include <benchmark/benchmark.h>

#include "che/radio.hpp"

namespace {

void ShadowField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  uint64_t seed = 0;
  for (auto _ : state) {
    auto field = che::gen_shadow_field(n, n, 1.0, 6.0, 8.0, seed++);
    benchmark::DoNotOptimize(field.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(ShadowField)->Arg(50)->Arg(100)->Arg(200);

void FullRssMaps(benchmark::State& state) {
  che::GridMap map(static_cast<int>(state.range(0)),
                   static_cast<int>(state.range(0)), 1.0, {0.0, 0.0});
  che::Transmitter tx;
  tx.position = {25.0, 25.0};
  che::RadioConfig cfg;
  for (auto _ : state) {
    auto maps = che::gen_rss_maps(map, tx, cfg);
    benchmark::DoNotOptimize(maps.second.values.data());
    ++cfg.seed;
  }
}
BENCHMARK(FullRssMaps)->Arg(50)->Arg(100);

}  // namespace
