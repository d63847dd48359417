#include <benchmark/benchmark.h>

#include "mixncut/bench.hpp"
#include "mixncut/features.hpp"
#include "mixncut/sparsify.hpp"
#include "mixncut/spectral.hpp"

using namespace mixncut;

namespace {

AppearanceImage composite(std::size_t size) {
  const auto& lib = builtin_textures();
  return compose(synth_texture(lib[0].params, size, size, lib[0].seed),
                 synth_texture(lib[1].params, size, size, lib[1].seed),
                 make_pattern(PatternKind::centered_disk, size, size))
      .image;
}

void BM_VarianceSplit(benchmark::State& state) {
  const auto img = composite(std::size_t(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(variance_split_partition(img, 1000, 1));
}
BENCHMARK(BM_VarianceSplit)->Arg(160)->Arg(320)->Unit(benchmark::kMillisecond);

void BM_DataSampler(benchmark::State& state) {
  const auto img = composite(std::size_t(state.range(0)));
  const auto c = variance_split_partition(img, 1000, 1);
  const ClusterPairTable table(c, 30.0);
  const std::size_t m = 2 * img.pixel_count();
  for (auto _ : state) benchmark::DoNotOptimize(sample_data_edges(img, c, table, m, 2));
  state.SetItemsProcessed(state.iterations() * std::int64_t(m));
}
BENCHMARK(BM_DataSampler)->Arg(160)->Arg(320)->Unit(benchmark::kMillisecond);

void BM_BaselinePairs(benchmark::State& state) {
  const std::size_t size = std::size_t(state.range(0));
  const std::size_t m = 100 * size * size;
  for (auto _ : state) benchmark::DoNotOptimize(sample_baseline_pairs(size, size, 50.0, m, 3));
  state.SetItemsProcessed(state.iterations() * std::int64_t(m));
}
BENCHMARK(BM_BaselinePairs)->Arg(64)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_Freeze(benchmark::State& state) {
  const std::size_t n = 160 * 160, m = std::size_t(state.range(0));
  std::vector<std::pair<Vertex, Vertex>> pairs(m);
  std::uint64_t x = 88172645463325252ULL;
  for (auto& p : pairs) {
    x ^= x << 13, x ^= x >> 7, x ^= x << 17;
    p = {Vertex(x % n), Vertex((x >> 32) % n)};
  }
  for (auto _ : state) {
    EdgeAccumulator acc(n);
    for (const auto& [i, j] : pairs) acc.add(i, j, 1.0);
    benchmark::DoNotOptimize(std::move(acc).freeze());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(m));
}
BENCHMARK(BM_Freeze)->Arg(1 << 16)->Arg(1 << 21)->Unit(benchmark::kMillisecond);

MixedOperator mixed(std::size_t size) {
  const auto img = composite(size);
  const auto c = variance_split_partition(img, 1000, 1);
  const auto data = sample_data_edges(img, c, 30.0, 2 * img.pixel_count(), 2);
  return MixedOperator(build_transition(data),
                       build_transition(build_grid_graph(size, size)), 0.995);
}

void BM_MixedApply(benchmark::State& state) {
  const auto op = mixed(std::size_t(state.range(0)));
  std::vector<double> x(op.size(), 1.0), y(op.size());
  for (auto _ : state) {
    op.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_MixedApply)->Arg(160)->Arg(320)->Unit(benchmark::kMicrosecond);

void BM_Eigensolver(benchmark::State& state) {
  const auto op = mixed(std::size_t(state.range(0)));
  EigenOptions opt;
  opt.count = 2;
  for (auto _ : state) benchmark::DoNotOptimize(top_eigenpairs(op, opt));
}
BENCHMARK(BM_Eigensolver)->Arg(64)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_GaborFeatures(benchmark::State& state) {
  const auto img = composite(std::size_t(state.range(0)));
  const auto bank = gabor_bank();
  for (auto _ : state) benchmark::DoNotOptimize(gabor_features(img, bank));
}
BENCHMARK(BM_GaborFeatures)->Arg(160)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
