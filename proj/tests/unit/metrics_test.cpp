#include <gtest/gtest.h>

#include <cmath>

#include <json.hpp>

#include "oracles.hpp"
#include "sze/error.hpp"
#include "sze/laplacian_solver.hpp"
#include "sze/metrics.hpp"
#include "sze/synth.hpp"

namespace sze {
namespace {

Graph complete(std::size_t n) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  w.diagonal().setZero();
  return Graph(w);
}

Graph path(std::size_t n) {
  Graph g(n);
  for (Vertex v = 0; v + 1 < n; ++v) g.set_weight(v, v + 1, 1.0);
  return g;
}

Graph cycle(std::size_t n) {
  Graph g = path(n);
  g.set_weight(n - 1, 0, 1.0);
  return g;
}

// Weighted six-vertex graph with values frozen from an independent numpy
// computation (pinv of the Laplacian, eigvalsh of the normalized Laplacian).
Graph frozen_graph() {
  Graph g(6);
  g.set_weight(0, 1, 1.0);
  g.set_weight(1, 2, 0.5);
  g.set_weight(2, 3, 0.25);
  g.set_weight(3, 4, 1.0);
  g.set_weight(4, 5, 0.75);
  g.set_weight(5, 0, 0.5);
  g.set_weight(0, 3, 0.2);
  g.set_weight(1, 4, 0.9);
  return g;
}

TEST(ResistanceTest, Examples) {
  EXPECT_NEAR(effective_resistance(path(2), 0, 1), 1.0, 1e-12);
  EXPECT_NEAR(effective_resistance(path(4), 0, 3), 3.0, 1e-12);
  EXPECT_NEAR(effective_resistance(path(4), 0, 3, ResistanceRoute::conjugate_gradient), 3.0, 1e-9);
  EXPECT_EQ(effective_resistance(path(4), 2, 2), 0.0);
  for (std::size_t n = 5; n <= 20; ++n) {
    const Graph g = complete(n);
    for (auto route : {ResistanceRoute::pseudoinverse, ResistanceRoute::conjugate_gradient}) {
      EXPECT_NEAR(effective_resistance(g, 0, n - 1, route), 2.0 / static_cast<double>(n), 1e-10) << n;
    }
    EXPECT_NEAR(rel_dev(g, 1, 2), 1.0 / static_cast<double>(n - 1), 1e-10) << n;
  }
}

TEST(ResistanceTest, FrozenValues) {
  const Graph g = frozen_graph();
  const ResistanceCalculator dense(g, ResistanceRoute::pseudoinverse);
  const ResistanceCalculator cg(g, ResistanceRoute::conjugate_gradient);
  struct Expected {
    Vertex i, j;
    double r, reldev;
  };
  const Expected cases[] = {{0, 1, 0.7490357098419805, 0.3415941958178626},
                            {0, 3, 1.394799054373523, 0.08381751297830671},
                            {2, 5, 2.4591265397536386, 0.13248330297510597},
                            {1, 4, 0.7502799552071672, 0.058305172251947424}};
  for (const auto& c : cases) {
    EXPECT_NEAR(dense.resistance(c.i, c.j), c.r, 1e-12);
    EXPECT_NEAR(cg.resistance(c.i, c.j), c.r, 1e-9);
    EXPECT_NEAR(oracle::resistance(g, c.i, c.j), c.r, 1e-12);
    EXPECT_NEAR(rel_dev(g, c.i, c.j), c.reldev, 1e-12);
  }
  EXPECT_NEAR(g.volume(), 10.2, 1e-12);
  EXPECT_NEAR(spectral_gap(g), 0.7193718741244708, 1e-10);
  EXPECT_NEAR(spectral_gap_lanczos(g), 0.7193718741244708, 1e-7);
  EXPECT_NEAR(combinatorial_spectral_gap(g), 0.7367125864351888, 1e-10);
}

TEST(ResistanceTest, RoutesAgreeWithEachOtherAndTheOracle) {
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.index(120);
    const Graph g = oracle::random_connected_graph(n, 4.0 / static_cast<double>(n), trial % 2 == 0, rng);
    const ResistanceCalculator dense(g, ResistanceRoute::pseudoinverse);
    const ResistanceCalculator cg(g, ResistanceRoute::conjugate_gradient);
    EXPECT_TRUE(dense.dense());
    EXPECT_FALSE(cg.dense());
    for (int q = 0; q < 5; ++q) {
      const Vertex i = rng.index(n);
      const Vertex j = rng.index(n);
      const double r = dense.resistance(i, j);
      EXPECT_NEAR(r, cg.resistance(i, j), 1e-8);
      if (n <= 40) {
        EXPECT_NEAR(r, oracle::resistance(g, i, j), 1e-9);
      }
    }
  }
}

TEST(ResistanceTest, Disconnected) {
  Graph g(4);
  g.set_weight(0, 1, 1.0);
  g.set_weight(2, 3, 1.0);
  EXPECT_THROW(effective_resistance(g, 0, 2, ResistanceRoute::pseudoinverse), DisconnectedGraphError);
  EXPECT_THROW(effective_resistance(g, 0, 2, ResistanceRoute::conjugate_gradient), DisconnectedGraphError);
  EXPECT_THROW(commute_time(g, 0, 2), DisconnectedGraphError);
  EXPECT_THROW(spectral_gap(g), DisconnectedGraphError);
  EXPECT_THROW(spectral_gap_lanczos(g), DisconnectedGraphError);
  EXPECT_THROW(rel_dev_aggregate(g), DisconnectedGraphError);
  EXPECT_THROW(laplacian_pseudoinverse(g), DisconnectedGraphError);
}

TEST(ResistanceProperty, MetricAndTriangleInequality) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + rng.index(40);
    const Graph g = oracle::random_connected_graph(n, 0.2, true, rng);
    const ResistanceCalculator calc(g);
    for (int q = 0; q < 20; ++q) {
      const Vertex a = rng.index(n), b = rng.index(n), c = rng.index(n);
      EXPECT_NEAR(calc.resistance(a, b), calc.resistance(b, a), 1e-12);
      EXPECT_LE(calc.resistance(a, c), calc.resistance(a, b) + calc.resistance(b, c) + 1e-10);
      if (a != b) {
        EXPECT_GT(calc.resistance(a, b), 0.0);
      }
    }
  }
}

TEST(ResistanceProperty, RayleighMonotonicity) {
  Rng rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4 + rng.index(30);
    const Graph g = oracle::random_connected_graph(n, 0.15, true, rng);
    Graph more = g;
    Vertex u = rng.index(n), v = rng.index(n);
    while (u == v) v = rng.index(n);
    more.set_weight(u, v, std::min(1.0, g.weight(u, v) + 0.5));
    const ResistanceCalculator before(g), after(more);
    for (Vertex i = 0; i < n; ++i) {
      for (Vertex j = i + 1; j < n; ++j) EXPECT_LE(after.resistance(i, j), before.resistance(i, j) + 1e-12);
    }
  }
}

TEST(ResistanceProperty, ScalingLeavesRelDevUnchanged) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.index(30);
    const Graph g = oracle::random_connected_graph(n, 0.3, true, rng);
    const double c = 0.1 + 0.9 * rng.uniform01();
    const Graph scaled(g.weights() * c);
    const Vertex i = rng.index(n);
    const Vertex j = (i + 1 + rng.index(n - 1)) % n;
    EXPECT_NEAR(rel_dev(scaled, i, j), rel_dev(g, i, j), 1e-9);
    EXPECT_NEAR(effective_resistance(scaled, i, j), effective_resistance(g, i, j) / c, 1e-9);
  }
}

TEST(CommuteTimeTest, Examples) {
  EXPECT_NEAR(commute_time(path(2), 0, 1), 2.0, 1e-12);
  EXPECT_NEAR(commute_time(complete(4), 0, 3), 6.0, 1e-12);
}

TEST(LocalPredictionTest, Examples) {
  EXPECT_NEAR(local_prediction(complete(4), 0, 1), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(local_prediction(path(3), 0, 1), 1.5, 1e-15);
  EXPECT_THROW(local_prediction(Graph(3), 0, 1), PreconditionError);
}

TEST(RelDevTest, Examples) {
  EXPECT_NEAR(rel_dev(path(2), 0, 1), 1.0, 1e-12);
  EXPECT_THROW(rel_dev(path(2), 0, 0), PreconditionError);
  // Star with three leaves: R(leaf, leaf) = 2, prediction 1 + 1 = 2.
  Graph star(4);
  for (Vertex v = 1; v < 4; ++v) star.set_weight(0, v, 1.0);
  EXPECT_NEAR(rel_dev(star, 1, 2), 0.0, 1e-12);
}

TEST(SpectralGapTest, Examples) {
  for (std::size_t n : {3u, 10u, 25u}) {
    EXPECT_NEAR(spectral_gap(complete(n)), static_cast<double>(n) / static_cast<double>(n - 1), 1e-10);
    EXPECT_NEAR(spectral_gap_lanczos(complete(n)), static_cast<double>(n) / static_cast<double>(n - 1), 1e-7);
  }
  EXPECT_NEAR(spectral_gap(cycle(4)), 1.0, 1e-10);
  EXPECT_NEAR(spectral_gap_lanczos(cycle(4)), 1.0, 1e-7);
  // Combinatorial gap of K_n is n.
  EXPECT_NEAR(combinatorial_spectral_gap(complete(10)), 10.0, 1e-9);
}

TEST(SpectralGapTest, LanczosMatchesDense) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + rng.index(200);
    const Graph g = oracle::random_connected_graph(n, 5.0 / static_cast<double>(n), trial % 2 == 1, rng);
    EXPECT_NEAR(spectral_gap_lanczos(g), spectral_gap(g), 1e-7) << "n=" << n;
  }
}

TEST(LaplacianSolverTest, CsrMultiplyMatchesDense) {
  Rng rng(9);
  const Graph g = oracle::random_connected_graph(50, 0.1, true, rng);
  const CsrLaplacian csr(g);
  Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(50, [&] { return rng.uniform01(); });
  Eigen::VectorXd y;
  csr.multiply(x, y);
  const Eigen::MatrixXd l = Eigen::MatrixXd(g.degrees().asDiagonal()) - g.weights();
  EXPECT_LE((y - l * x).cwiseAbs().maxCoeff(), 1e-12);

  CgStats stats;
  const LaplacianCg cg(g);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(50);
  b(3) = 1.0;
  b(17) = -1.0;
  const Eigen::VectorXd sol = cg.solve(b, &stats);
  EXPECT_LE(stats.relative_residual, 1e-10);
  EXPECT_GT(stats.iterations, 0u);
  EXPECT_LE((l * sol - b).norm(), 1e-8);
  EXPECT_NEAR(sol.sum(), 0.0, 1e-9);
}

TEST(LaplacianSolverTest, IterationCapIsReported) {
  Rng rng(10);
  const Graph g = oracle::random_connected_graph(80, 0.05, true, rng);
  const LaplacianCg capped(g, 1e-14, 1);
  EXPECT_THROW(capped.resistance(0, 79), ConvergenceError);
}

TEST(LaplacianSolverTest, PseudoinverseIdentities) {
  Rng rng(11);
  const Graph g = oracle::random_connected_graph(30, 0.2, true, rng);
  const Eigen::MatrixXd lp = laplacian_pseudoinverse(g);
  const Eigen::MatrixXd l = Eigen::MatrixXd(g.degrees().asDiagonal()) - g.weights();
  EXPECT_LE((l * lp * l - l).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((lp * l * lp - lp).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(lp.rowwise().sum().cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SamplingTest, FullEnumerationAndSampling) {
  SamplingConfig config;
  const auto all = sample_pairs(10, config);
  EXPECT_EQ(all.size(), 45u);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));

  const auto sampled = sample_pairs(600, config);
  EXPECT_EQ(sampled.size(), 6000u);
  EXPECT_TRUE(std::is_sorted(sampled.begin(), sampled.end()));
  EXPECT_EQ(std::adjacent_find(sampled.begin(), sampled.end()), sampled.end());
  for (const auto& [i, j] : sampled) EXPECT_LT(i, j);
  EXPECT_EQ(sampled, sample_pairs(600, config));
  config.seed = 1;
  EXPECT_NE(sampled, sample_pairs(600, config));

  const std::vector<Vertex> subset{2, 5, 9};
  EXPECT_EQ(sample_pairs(subset, SamplingConfig{}), (std::vector<VertexPair>{{2, 5}, {2, 9}, {5, 9}}));
}

TEST(BoundCheckTest, Examples) {
  const Graph k10 = complete(10);
  const auto pairs = sample_pairs(10, SamplingConfig{});
  const auto check = luxburg_bound_check(k10, pairs);
  EXPECT_TRUE(check.holds);
  EXPECT_FALSE(check.bipartite);
  EXPECT_LT(check.max_violation, 0.0);

  const auto gt = make_gt(GroundTruthSpec{}, 0);
  EXPECT_TRUE(luxburg_bound_check(gt.graph, sample_pairs(gt.graph.size(), SamplingConfig{})).holds);

  const auto c4 = luxburg_bound_check(cycle(4), sample_pairs(4, SamplingConfig{}));
  EXPECT_TRUE(c4.bipartite);
}

TEST(BoundCheckProperty, HoldsOnConnectedNonBipartiteGraphs) {
  Rng rng(12);
  std::size_t checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.index(40);
    const Graph g = oracle::random_connected_graph(n, rng.uniform01() * 0.5, trial % 2 == 0, rng);
    if (is_bipartite(g)) continue;
    ++checked;
    const auto check = luxburg_bound_check(g, sample_pairs(n, SamplingConfig{}));
    EXPECT_TRUE(check.holds) << "trial " << trial << " violation " << check.max_violation;
  }
  EXPECT_GT(checked, 150u);
}

TEST(MetricsReportTest, AggregateAndSerialization) {
  const Graph g = frozen_graph();
  const auto report = rel_dev_aggregate(g, SamplingConfig{});
  EXPECT_EQ(report.n_pairs_sampled, 15u);
  EXPECT_LE(report.reldev_min, report.reldev_mean);
  EXPECT_LE(report.reldev_mean, report.reldev_max);
  EXPECT_GE(report.reldev_min, 0.0);
  EXPECT_NEAR(report.volume, 10.2, 1e-12);
  EXPECT_NEAR(report.spectral_gap, 0.7193718741244708, 1e-10);
  EXPECT_NEAR(report.d_min, 0.75, 1e-15);
  EXPECT_NEAR(report.bound_rhs, 2.0 / (0.7193718741244708 * 0.75), 1e-9);
  EXPECT_TRUE(report.bound_holds);

  const auto parsed = nlohmann::json::parse(report.to_json());
  EXPECT_NEAR(parsed.at("reldev_mean").get<double>(), report.reldev_mean, 1e-15);
  EXPECT_EQ(parsed.at("n_pairs_sampled").get<std::size_t>(), 15u);
  EXPECT_EQ(parsed.at("bound_holds").get<bool>(), true);

  const auto header = MetricsReport::csv_header();
  const auto row = report.to_csv_row();
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));

  const std::vector<VertexPair> bad{{1, 1}};
  EXPECT_THROW(rel_dev_aggregate(g, bad), PreconditionError);
}

}  // namespace
}  // namespace sze
