#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "oracles.hpp"
#include "sze/codec.hpp"
#include "sze/error.hpp"
#include "sze/synth.hpp"

namespace sze {
namespace {

EquitablePartition blocks(std::size_t k, std::size_t m) {
  EquitablePartition p;
  p.n = k * m;
  for (std::size_t i = 0; i < k; ++i) p.classes.push_back(VertexSet::range(i * m, (i + 1) * m));
  return p;
}

std::vector<PairStatus> all_regular(std::size_t k) { return std::vector<PairStatus>(k * (k - 1) / 2); }

ReducedGraph single_edge(double density) {
  Eigen::MatrixXd d(2, 2);
  d << 0.0, density, density, 0.0;
  return reduce(blocks(2, 4), d, all_regular(2), 0.3, 0.1);
}

ReducedGraph triangle() {
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(3, 3, 0.9);
  d.diagonal().setZero();
  return reduce(blocks(3, 4), d, all_regular(3), 0.3, 0.1);
}

// Weight sum over the block rows [a, a + m) x columns [b, b + m).
double block_weight(const Graph& g, std::size_t a, std::size_t b, std::size_t m) {
  return g.weights()
      .block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(m),
             static_cast<Eigen::Index>(m))
      .sum();
}

void expect_valid(const Graph& g) {
  const auto& w = g.weights();
  EXPECT_TRUE(w.isApprox(w.transpose(), 0.0));
  EXPECT_TRUE((w.diagonal().array() == 0.0).all());
  EXPECT_TRUE((w.array() >= 0.0).all() && (w.array() <= 1.0).all());
}

TEST(ReduceTest, SingleRegularEdge) {
  const auto r = single_edge(0.8);
  EXPECT_EQ(r.k, 2u);
  EXPECT_EQ(r.m, 4u);
  EXPECT_EQ(r.edge_count(), 1u);
  EXPECT_DOUBLE_EQ(r.densities(0, 1), 0.8);
  EXPECT_DOUBLE_EQ(r.densities(1, 0), 0.8);
  EXPECT_EQ(r.densities(0, 0), 0.0);
}

TEST(ReduceTest, IrregularPairHasNoEdge) {
  Eigen::MatrixXd d(2, 2);
  d << 0.0, 0.8, 0.8, 0.0;
  std::vector<PairStatus> statuses(1);
  statuses[0].verdict = Verdict::irregular;
  EXPECT_EQ(reduce(blocks(2, 4), d, statuses, 0.5, 0.1).edge_count(), 0u);
  statuses[0].verdict = Verdict::unverified;
  EXPECT_EQ(reduce(blocks(2, 4), d, statuses, 0.5, 0.1).edge_count(), 0u);
}

TEST(ReduceTest, ThresholdMustExceedEpsilon) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  EXPECT_THROW(reduce(blocks(2, 4), d, all_regular(2), 0.1, 0.1), PreconditionError);
  EXPECT_THROW(reduce(blocks(2, 4), d, all_regular(2), 0.05, 0.1), PreconditionError);
  EXPECT_THROW(reduce(blocks(2, 4), Eigen::MatrixXd::Zero(3, 3), all_regular(2), 0.3, 0.1), PreconditionError);
  EXPECT_THROW(reduce(blocks(2, 4), d, all_regular(3), 0.3, 0.1), PreconditionError);
}

TEST(ReduceTest, GroundTruthCliquesGiveAChain) {
  const auto gt = make_gt(GroundTruthSpec{}, 11);
  // Planted pairs taken as regular. Chain links carry density 20/400 = 0.05
  // and the threshold sits below it.
  const auto r = reduce(gt.graph, gt.partition, all_regular(10), 0.04, 0.01);
  ASSERT_EQ(r.k, 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = i + 1; j < 10; ++j) {
      EXPECT_EQ(r.edges(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), j == i + 1)
          << i << "," << j;
    }
  }
  EXPECT_EQ(r.edge_count(), 9u);
  EXPECT_TRUE((r.intra_densities.array() == 1.0).all());
}

TEST(TFoldTest, Examples) {
  const Graph k22 = t_fold(single_edge(0.8), 2);
  EXPECT_EQ(k22.size(), 4u);
  EXPECT_EQ(k22.edge_count(), 4u);
  EXPECT_EQ(k22.weight(0, 1), 0.0);
  EXPECT_EQ(k22.weight(0, 2), 1.0);

  const auto tri = triangle();
  EXPECT_EQ(t_fold(tri, 1), tri.adjacency());
  const Graph six = t_fold(tri, 2);
  EXPECT_EQ(six.size(), 6u);
  EXPECT_EQ(six.edge_count(), 12u);
  EXPECT_THROW(t_fold(tri, 0), PreconditionError);
}

TEST(TFoldTest, EdgeCountIsEdgesTimesTSquared) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 2 + rng.index(8);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < d.cols(); ++j) d(i, j) = d(j, i) = rng.uniform01();
    }
    const auto r = reduce(blocks(k, 3), d, all_regular(k), 0.5, 0.1);
    const std::size_t t = 1 + rng.index(5);
    const Graph g = t_fold(r, t);
    EXPECT_EQ(g.edge_count(), r.edge_count() * t * t);
    expect_valid(g);
  }
}

TEST(ExpandTest, ConstantBlock) {
  const Graph g = expand(single_edge(0.8), {3, ExpansionMode::constant, 0});
  ASSERT_EQ(g.size(), 6u);
  EXPECT_DOUBLE_EQ(edge_density(g, VertexSet::range(0, 3), VertexSet::range(3, 6)), 0.8);
  EXPECT_EQ(block_weight(g, 0, 0, 3), 0.0);
  EXPECT_EQ(block_weight(g, 3, 3, 3), 0.0);
  for (Vertex u = 0; u < 3; ++u) {
    for (Vertex v = 3; v < 6; ++v) EXPECT_DOUBLE_EQ(g.weight(u, v), 0.8);
  }
}

TEST(ExpandTest, CompleteWithUnitSizeIsAdjacency) {
  const auto tri = triangle();
  EXPECT_EQ(expand(tri, {1, ExpansionMode::complete, 0}), tri.adjacency());
  EXPECT_EQ(expand(single_edge(0.4), {1, ExpansionMode::complete, 0}), single_edge(0.4).adjacency());
}

TEST(ExpandTest, BernoulliConcentrates) {
  const auto r = single_edge(0.5);
  const std::size_t m = 100;
  const Graph g = expand(r, {m, ExpansionMode::bernoulli, 42});
  const double realized = edge_density(g, VertexSet::range(0, m), VertexSet::range(m, 2 * m));
  EXPECT_NEAR(realized, 0.5, 0.05);
  // Five standard deviations of the block density.
  EXPECT_LE(std::abs(realized - 0.5), 5.0 * std::sqrt(0.25 / (m * m)));
  EXPECT_TRUE(g.is_binary());
  EXPECT_EQ(g, expand(r, {m, ExpansionMode::bernoulli, 42}));
  EXPECT_NE(g, expand(r, {m, ExpansionMode::bernoulli, 43}));
}

TEST(ExpandTest, ValidInEveryModeAndEmptyNonEdges) {
  Rng rng(8);
  for (auto mode : {ExpansionMode::constant, ExpansionMode::bernoulli, ExpansionMode::complete}) {
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t k = 2 + rng.index(6);
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
      for (Eigen::Index i = 0; i < d.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < d.cols(); ++j) d(i, j) = d(j, i) = rng.uniform01();
      }
      const auto r = reduce(blocks(k, 5), d, all_regular(k), 0.4, 0.1);
      const std::size_t m = 1 + rng.index(6);
      const Graph g = expand(r, {m, mode, rng.next()});
      expect_valid(g);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
          if (i != j && r.edges(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) continue;
          EXPECT_EQ(block_weight(g, i * m, j * m, m), 0.0);
        }
      }
    }
  }
  EXPECT_THROW(expand(triangle(), {0, ExpansionMode::constant, 0}), PreconditionError);
}

TEST(ExpandTest, AllPairsScopeAndIntraFill) {
  Eigen::MatrixXd d(2, 2);
  d << 0.0, 0.2, 0.2, 0.0;
  Eigen::VectorXd intra(2);
  intra << 0.6, 1.0;
  const auto r = reduce(blocks(2, 4), d, all_regular(2), 0.3, 0.1, intra);
  EXPECT_EQ(r.edge_count(), 0u);
  EXPECT_EQ(expand(r, {4, ExpansionMode::constant, 0}).edge_count(), 0u);
  ExpansionSpec spec{4, ExpansionMode::constant, 0, ExpansionScope::all_pairs, true};
  const Graph g = expand(r, spec);
  EXPECT_DOUBLE_EQ(edge_density(g, VertexSet::range(0, 4), VertexSet::range(4, 8)), 0.2);
  EXPECT_DOUBLE_EQ(g.weight(0, 1), 0.6);
  EXPECT_DOUBLE_EQ(g.weight(5, 6), 1.0);
  EXPECT_TRUE(intra_class_densities(g, blocks(2, 4)).isApprox(intra, 1e-12));
}

TEST(CodecProperty, RoundTripReproducesBlockDensities) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng.index(5);
    const std::size_t m = 2 + rng.index(6);
    const auto p = blocks(k, m);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k * m), static_cast<Eigen::Index>(k * m));
    Eigen::MatrixXd target = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const double value = rng.index(3) == 0 ? 0.0 : 0.4 + 0.6 * rng.uniform01();
        target(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
        target(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
        w.block(static_cast<Eigen::Index>(i * m), static_cast<Eigen::Index>(j * m), static_cast<Eigen::Index>(m),
                static_cast<Eigen::Index>(m))
            .setConstant(value);
      }
    }
    w = w.selfadjointView<Eigen::Upper>();
    const Graph g(w);
    const auto r = reduce(g, p, all_regular(k), 0.3, 0.1);
    const Graph back = expand(r, {m, ExpansionMode::constant, 0});
    EXPECT_LE((class_densities(back, p) - target).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((back.weights() - g.weights()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(KeyLemmaTest, Examples) {
  const auto a = key_lemma_feasibility(0.5, 0.1, 2, 1, 100, 1);
  EXPECT_NEAR(a.delta, 0.4, 1e-15);
  EXPECT_NEAR(a.epsilon0, 0.04, 1e-15);
  EXPECT_FALSE(a.epsilon_ok);
  EXPECT_FALSE(a.feasible);

  for (std::size_t h = 1; h <= 4; ++h) {
    const auto b = key_lemma_feasibility(0.5, 0.01, 2, h, 100, 1);
    EXPECT_NEAR(b.epsilon0, 0.060025, 1e-15);
    EXPECT_TRUE(b.feasible);
    EXPECT_NEAR(b.copy_lower_bound, std::pow(6.0025, static_cast<double>(h)), 1e-9);
  }
  // t - 1 <= eps0 m fails for t = 8 (7 > 6.0025).
  EXPECT_FALSE(key_lemma_feasibility(0.5, 0.01, 2, 1, 100, 8).size_ok);
  EXPECT_TRUE(key_lemma_feasibility(0.5, 0.01, 2, 1, 100, 7).size_ok);

  EXPECT_THROW(key_lemma_feasibility(0.3, 0.3, 2, 1, 100, 1), PreconditionError);
  EXPECT_THROW(key_lemma_feasibility(0.3, 0.0, 2, 1, 100, 1), PreconditionError);
}

TEST(KeyLemmaTest, Monotone) {
  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const double eps = 0.001 + 0.2 * rng.uniform01();
    const double d = eps + 0.001 + (1.0 - eps - 0.001) * rng.uniform01();
    const std::size_t delta = 1 + rng.index(4);
    const std::size_t m = 1 + rng.index(2000);
    const std::size_t t = 1 + rng.index(20);
    const bool base = key_lemma_feasibility(d, eps, delta, 2, m, t).feasible;
    if (!base) continue;
    EXPECT_TRUE(key_lemma_feasibility(d, eps * rng.uniform01() + 1e-6, delta, 2, m, t).feasible);
    EXPECT_TRUE(key_lemma_feasibility(d + (1.0 - d) * rng.uniform01(), eps, delta, 2, m, t).feasible);
  }
}

TEST(CompressionTest, Examples) {
  EXPECT_DOUBLE_EQ(compression_metrics(200, 10).node_ratio, 0.95);
  EXPECT_DOUBLE_EQ(compression_metrics(50, 50).node_ratio, 0.0);
  EXPECT_NEAR(compression_metrics(10000, 20).storage_ratio, 0.9998, 1e-4);
  EXPECT_DOUBLE_EQ(compression_metrics(10000, 20).storage_ratio,
                   1.0 - (190.0 + 10000.0) / (10000.0 * 9999.0 / 2.0));
}

TEST(ReducedIoTest, RoundTrip) {
  Eigen::MatrixXd d(3, 3);
  d << 0.0, 0.125, 0.7, 0.125, 0.0, 1.0 / 3.0, 0.7, 1.0 / 3.0, 0.0;
  Eigen::VectorXd intra(3);
  intra << 1.0, 0.5, 0.1;
  std::vector<PairStatus> statuses(3);
  statuses[1].verdict = Verdict::irregular;
  const auto r = reduce(blocks(3, 7), d, statuses, 0.3, 0.1, intra);

  std::stringstream buffer;
  write_reduced(buffer, r);
  const auto back = read_reduced(buffer);
  EXPECT_EQ(back.k, r.k);
  EXPECT_EQ(back.m, r.m);
  EXPECT_EQ(back.densities, r.densities);
  EXPECT_EQ(back.edges, r.edges);
  EXPECT_EQ(back.intra_densities, r.intra_densities);
  EXPECT_EQ(back.epsilon, r.epsilon);
  EXPECT_EQ(back.d_threshold, r.d_threshold);

  const auto path = std::filesystem::temp_directory_path() / "sze_codec_test_reduced.txt";
  save_reduced(r, path);
  EXPECT_EQ(load_reduced(path).densities, r.densities);
  std::filesystem::remove(path);

  std::istringstream asymmetric("2 1 0.1 0.3\n0 0.5\n0.4 0\n0 1\n1 0\n");
  EXPECT_THROW(read_reduced(asymmetric), ParseError);
  std::istringstream truncated("2 1 0.1 0.3\n0 0.5\n");
  EXPECT_THROW(read_reduced(truncated), ParseError);
  std::istringstream bad_mask("2 1 0.1 0.3\n0 0.5\n0.5 0\n0 2\n2 0\n");
  EXPECT_THROW(read_reduced(bad_mask), ParseError);
}

}  // namespace
}  // namespace sze
