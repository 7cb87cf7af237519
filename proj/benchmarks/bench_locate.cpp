#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pointloc/exact.hpp"
#include "pointloc/generator.hpp"
#include "pointloc/locator.hpp"

namespace {

struct Instance {
  pointloc::PackedEdgeIndex index;
  std::vector<pointloc::Vec2> queries;
};

Instance make_instance(std::size_t n, int word_bits) {
  const auto s = pointloc::random_subdivision({n, 7, 64});
  auto index = pointloc::PackedEdgeIndex::build(s, word_bits);

  std::mt19937_64 rng(n * 31 + word_bits);
  std::uniform_real_distribution<double> coord(-3.0, 67.0);
  std::vector<pointloc::Vec2> queries(4096);
  for (auto& q : queries) q = {coord(rng), coord(rng)};
  return {std::move(index), std::move(queries)};
}

void BM_Locate(benchmark::State& state) {
  const auto instance =
      make_instance(state.range(0), static_cast<int>(state.range(1)));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& q = instance.queries[i++ & 4095];
    benchmark::DoNotOptimize(instance.index.locate(q.x, q.y));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Locate)
    ->ArgsProduct({{64, 256, 1024}, {64, 128}})
    ->ArgNames({"n", "word_bits"});

void BM_LocateBruteforce(benchmark::State& state) {
  const auto instance = make_instance(state.range(0), 64);
  const auto& geometry = instance.index.geometry();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& q = instance.queries[i++ & 4095];
    benchmark::DoNotOptimize(pointloc::locate_bruteforce(geometry, q.x, q.y));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LocateBruteforce)->Arg(64)->Arg(256)->Arg(1024)->ArgName("n");

void BM_EvaluateOnly(benchmark::State& state) {
  const auto instance =
      make_instance(state.range(0), static_cast<int>(state.range(1)));
  std::vector<pointloc::QueryPoint> quantized;
  quantized.reserve(instance.queries.size());
  const auto& geometry = instance.index.geometry();
  const auto& cut = instance.index.cut();
  for (const auto& q : instance.queries) {
    const double x = std::clamp(q.x, 0.0, cut.max_abs);
    const double y = std::clamp(q.y, 0.0, cut.max_abs);
    quantized.push_back(instance.index.quantize_query(x, y));
  }
  (void)geometry;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        instance.index.evaluate(quantized[i++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EvaluateOnly)
    ->ArgsProduct({{64, 256, 1024}, {64, 128}})
    ->ArgNames({"n", "word_bits"});

void BM_Build(benchmark::State& state) {
  const auto s = pointloc::random_subdivision(
      {static_cast<std::size_t>(state.range(0)), 7, 64});
  for (auto _ : state)
    benchmark::DoNotOptimize(pointloc::PackedEdgeIndex::build(s, 64));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Build)->Arg(64)->Arg(256)->Arg(1024)->ArgName("n");

}  // namespace

BENCHMARK_MAIN();
