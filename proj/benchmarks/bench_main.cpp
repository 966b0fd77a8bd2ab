#include <benchmark/benchmark.h>

#include "sze/codec.hpp"
#include "sze/laplacian_solver.hpp"
#include "sze/metrics.hpp"
#include "sze/partition.hpp"
#include "sze/rng.hpp"
#include "sze/synth.hpp"

namespace {

using namespace sze;

Graph random_pair(std::size_t c, double p, std::uint64_t seed) {
  Rng rng(seed);
  Graph g(2 * c);
  for (Vertex u = 0; u < c; ++u) {
    for (Vertex v = c; v < 2 * c; ++v) {
      if (rng.uniform01() < p) g.set_weight(u, v, 1.0);
    }
  }
  return g;
}

// Sparse-ish connected graph: a ring plus random chords.
Graph ring_with_chords(std::size_t n, std::size_t chords, std::uint64_t seed) {
  Rng rng(seed);
  Graph g(n);
  for (Vertex v = 0; v < n; ++v) g.set_weight(v, (v + 1) % n, 1.0);
  for (std::size_t i = 0; i < chords; ++i) {
    const Vertex u = rng.index(n), v = rng.index(n);
    if (u != v) g.set_weight(u, v, 0.5 + 0.5 * rng.uniform01());
  }
  return g;
}

void BM_PairCheck(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const Graph g = random_pair(c, 0.5, 1);
  const VertexSet a = VertexSet::range(0, c), b = VertexSet::range(c, 2 * c);
  for (auto _ : state) benchmark::DoNotOptimize(check_pair_regularity(g, a, b, 0.25));
}
BENCHMARK(BM_PairCheck)->Arg(32)->Arg(128)->Arg(512);

void BM_CheckAllPairs(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto gt = make_gt({k, 20, 20}, 0);
  const auto p = initial_partition(gt.graph, k, 0);
  for (auto _ : state) benchmark::DoNotOptimize(check_all_pairs(gt.graph, p, 0.25));
}
BENCHMARK(BM_CheckAllPairs)->Arg(10)->Arg(40);

void BM_FindRegularPartition(benchmark::State& state) {
  const auto gt = make_gt(GroundTruthSpec{}, 0);
  PartitionConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(find_regular_partition(gt.graph, config));
}
BENCHMARK(BM_FindRegularPartition)->Unit(benchmark::kMillisecond);

void BM_ResistanceDense(benchmark::State& state) {
  const Graph g = ring_with_chords(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    const ResistanceCalculator calc(g, ResistanceRoute::pseudoinverse);
    benchmark::DoNotOptimize(calc.resistance(0, g.size() / 2));
  }
}
BENCHMARK(BM_ResistanceDense)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_ResistanceCg(benchmark::State& state) {
  const Graph g = ring_with_chords(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    const ResistanceCalculator calc(g, ResistanceRoute::conjugate_gradient);
    benchmark::DoNotOptimize(calc.resistance(0, g.size() / 2));
  }
}
BENCHMARK(BM_ResistanceCg)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_SpectralGapDense(benchmark::State& state) {
  const Graph g = ring_with_chords(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(g));
}
BENCHMARK(BM_SpectralGapDense)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_SpectralGapLanczos(benchmark::State& state) {
  const Graph g = ring_with_chords(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap_lanczos(g));
}
BENCHMARK(BM_SpectralGapLanczos)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_Expand(benchmark::State& state) {
  const std::size_t k = 10;
  const auto m = static_cast<std::size_t>(state.range(0));
  EquitablePartition p;
  p.n = k * m;
  for (std::size_t i = 0; i < k; ++i) p.classes.push_back(VertexSet::range(i * m, (i + 1) * m));
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(10, 10, 0.6);
  d.diagonal().setZero();
  const auto r = reduce(p, d, std::vector<PairStatus>(45), 0.3, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(expand(r, {m, ExpansionMode::bernoulli, 4}));
}
BENCHMARK(BM_Expand)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
