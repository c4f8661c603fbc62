#include <benchmark/benchmark.h>

#include <cmath>

#include "che/rng.hpp"
#include "che/svc.hpp"

namespace {

che::LabeledDataset ring_dataset(int n, uint64_t seed) {
  che::Rng rng(seed);
  che::LabeledDataset ds;
  for (int i = 0; i < n; ++i) {
    const double a = rng.uniform(0.0, 2.0 * M_PI);
    const bool core = i % 2 == 0;
    const double r = core ? 0.8 * std::sqrt(rng.uniform()) : rng.uniform(1.3, 2.0);
    che::FeatureVector f{};
    f[che::kFeatX] = r * std::cos(a);
    f[che::kFeatY] = r * std::sin(a);
    ds.rows.push_back(f);
    ds.labels.push_back(core ? 0 : 1);
  }
  return ds;
}

void SmoTrain(benchmark::State& state) {
  const che::LabeledDataset ds = ring_dataset(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    const che::SvcModel m = che::train(ds, 10.0, 1.0);
    benchmark::DoNotOptimize(m.support_vectors.size());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(SmoTrain)->Arg(100)->Arg(400)->Arg(1000)->Complexity()->Unit(benchmark::kMillisecond);

void DecisionValue(benchmark::State& state) {
  const che::LabeledDataset ds = ring_dataset(600, 3);
  const che::SvcModel m = che::train(ds, 10.0, 1.0);
  che::Rng rng(9);
  for (auto _ : state) {
    che::FeatureVector x{};
    x[che::kFeatX] = rng.uniform(-2.0, 2.0);
    x[che::kFeatY] = rng.uniform(-2.0, 2.0);
    benchmark::DoNotOptimize(m.decision_value(x));
  }
}
BENCHMARK(DecisionValue);

}  // namespace
