#include "sze/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "sze/error.hpp"
#include "sze/graph_io.hpp"
#include "sze/parallel.hpp"
#include "sze/rng.hpp"

namespace sze {
namespace {

Eigen::Index at(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_connected(const Graph& g, const char* what) {
  if (g.size() < 2) throw PreconditionError(std::string(what) + ": need at least two vertices");
  if (!is_connected(g)) throw DisconnectedGraphError(std::string(what) + ": graph is disconnected");
}

// Smallest two eigenvalues of a dense symmetric matrix.
double second_smallest(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw ConvergenceError("dense eigensolve failed");
  return eig.eigenvalues()(1);
}

}  // namespace

ResistanceCalculator::ResistanceCalculator(const Graph& g, ResistanceRoute route) : n_(g.size()) {
  require_connected(g, "resistance");
  const bool use_dense = route == ResistanceRoute::pseudoinverse ||
                         (route == ResistanceRoute::automatic && n_ <= dense_limit);
  if (use_dense) {
    pseudoinverse_ = laplacian_pseudoinverse(g);
  } else {
    cg_.emplace(g);
  }
}

double ResistanceCalculator::resistance(Vertex i, Vertex j) const {
  if (i >= n_ || j >= n_) throw PreconditionError("resistance: vertex out of range");
  if (i == j) return 0.0;
  if (pseudoinverse_) {
    const auto& p = *pseudoinverse_;
    return p(at(i), at(i)) + p(at(j), at(j)) - 2.0 * p(at(i), at(j));
  }
  return cg_->resistance(i, j);
}

double effective_resistance(const Graph& g, Vertex i, Vertex j, ResistanceRoute route) {
  if (route == ResistanceRoute::automatic || route == ResistanceRoute::conjugate_gradient) {
    // A single query never needs the full pseudoinverse.
    if (i >= g.size() || j >= g.size()) throw PreconditionError("resistance: vertex out of range");
    require_connected(g, "resistance");
    return LaplacianCg(g).resistance(i, j);
  }
  return ResistanceCalculator(g, route).resistance(i, j);
}

double commute_time(const Graph& g, Vertex i, Vertex j) {
  return g.volume() * effective_resistance(g, i, j);
}

double local_prediction(const Graph& g, Vertex i, Vertex j) {
  const double di = g.degree(i);
  const double dj = g.degree(j);
  if (di <= 0.0 || dj <= 0.0) throw PreconditionError("local prediction: isolated vertex");
  return 1.0 / di + 1.0 / dj;
}

double rel_dev(const Graph& g, Vertex i, Vertex j) {
  if (i == j) throw PreconditionError("rel_dev: i == j");
  const double r = effective_resistance(g, i, j);
  return std::abs(r - local_prediction(g, i, j)) / r;
}

double spectral_gap(const Graph& g) {
  require_connected(g, "spectral gap");
  if (g.size() > ResistanceCalculator::dense_limit) return spectral_gap_lanczos(g);
  const Eigen::VectorXd inv_sqrt = g.degrees().array().rsqrt();
  Eigen::MatrixXd l = -(inv_sqrt.asDiagonal() * g.weights() * inv_sqrt.asDiagonal());
  l.diagonal().array() += 1.0;
  return second_smallest(l);
}

double spectral_gap_lanczos(const Graph& g, double tolerance) {
  require_connected(g, "spectral gap");
  const CsrLaplacian lap(g);
  Eigen::VectorXd root(at(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) root(at(i)) = std::sqrt(lap.degrees()[i]);
  // I - N restricted to the complement of sqrt(d), the top eigenvector of N.
  auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    lap.multiply_normalized_adjacency(x, y);
    y = x - y;
  };
  return lanczos_smallest(apply, root, tolerance, std::max<std::size_t>(g.size(), 2));
}

double combinatorial_spectral_gap(const Graph& g) {
  require_connected(g, "spectral gap");
  if (g.size() > ResistanceCalculator::dense_limit) {
    const CsrLaplacian lap(g);
    return lanczos_smallest([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { lap.multiply(x, y); },
                            Eigen::VectorXd::Ones(at(g.size())), 1e-8, g.size());
  }
  Eigen::MatrixXd l = -g.weights();
  l.diagonal() += g.degrees();
  return second_smallest(l);
}

std::vector<VertexPair> sample_pairs(std::span<const Vertex> vertices, const SamplingConfig& config) {
  const std::size_t n = vertices.size();
  std::vector<VertexPair> pairs;
  if (n < 2) return pairs;
  auto ordered = [](Vertex a, Vertex b) { return a < b ? VertexPair{a, b} : VertexPair{b, a}; };
  if (n <= config.full_enumeration_limit) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) pairs.push_back(ordered(vertices[a], vertices[b]));
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
  }
  const std::size_t total = n * (n - 1) / 2;
  const std::size_t wanted = std::min(total, config.samples_per_vertex * n);
  Rng rng = Rng::derive(config.seed, 0x9a1f);
  std::set<VertexPair> chosen;
  while (chosen.size() < wanted) {
    const std::size_t a = rng.index(n);
    const std::size_t b = rng.index(n);
    if (a != b) chosen.insert(ordered(vertices[a], vertices[b]));
  }
  return {chosen.begin(), chosen.end()};
}

std::vector<VertexPair> sample_pairs(std::size_t n, const SamplingConfig& config) {
  std::vector<Vertex> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  return sample_pairs(all, config);
}

BoundCheck luxburg_bound_check(const Graph& g, std::span<const VertexPair> pairs) {
  const ResistanceCalculator calculator(g);
  const double rhs = 2.0 / (spectral_gap(g) * g.min_degree());
  BoundCheck out;
  out.bipartite = is_bipartite(g);
  out.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& [i, j] : pairs) {
    // C_ij / vol(G) is R_ij.
    const double lhs = std::abs(calculator.resistance(i, j) - local_prediction(g, i, j));
    out.max_violation = std::max(out.max_violation, lhs - rhs);
  }
  if (pairs.empty()) out.max_violation = -rhs;
  out.holds = out.max_violation <= 0.0;
  return out;
}

MetricsReport rel_dev_aggregate(const Graph& g, std::span<const VertexPair> pairs, std::uint64_t seed,
                                ResistanceRoute route) {
  if (pairs.empty()) throw PreconditionError("rel_dev_aggregate: no pairs");
  const ResistanceCalculator calculator(g, route);
  const Eigen::VectorXd degrees = g.degrees();
  if ((degrees.array() <= 0.0).any()) throw PreconditionError("rel_dev_aggregate: isolated vertex");

  MetricsReport report;
  report.seed = seed;
  report.n_pairs_sampled = pairs.size();
  report.volume = degrees.sum();
  report.d_min = degrees.minCoeff();
  report.spectral_gap = spectral_gap(g);
  report.combinatorial_gap = combinatorial_spectral_gap(g);
  report.bound_rhs = 2.0 / (report.spectral_gap * report.d_min);
  report.bipartite = is_bipartite(g);

  std::vector<double> reldev(pairs.size());
  std::vector<double> violation(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    if (i == j) throw PreconditionError("rel_dev_aggregate: pair with i == j");
    const double r = calculator.resistance(i, j);
    const double prediction = 1.0 / degrees(at(i)) + 1.0 / degrees(at(j));
    reldev[p] = std::abs(r - prediction) / r;
    violation[p] = std::abs(r - prediction) - report.bound_rhs;
  });
  // Sequential sum keeps the mean independent of the thread count.
  double sum = 0.0;
  for (double v : reldev) sum += v;
  report.reldev_mean = sum / static_cast<double>(reldev.size());
  report.reldev_min = *std::min_element(reldev.begin(), reldev.end());
  report.reldev_max = *std::max_element(reldev.begin(), reldev.end());
  report.bound_max_violation = *std::max_element(violation.begin(), violation.end());
  report.bound_holds = report.bound_max_violation <= 0.0;
  return report;
}

MetricsReport rel_dev_aggregate(const Graph& g, const SamplingConfig& config) {
  return rel_dev_aggregate(g, sample_pairs(g.size(), config), config.seed);
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["reldev_mean"] = reldev_mean;
  j["reldev_min"] = reldev_min;
  j["reldev_max"] = reldev_max;
  j["spectral_gap"] = spectral_gap;
  j["combinatorial_gap"] = combinatorial_gap;
  j["volume"] = volume;
  j["d_min"] = d_min;
  j["bound_rhs"] = bound_rhs;
  j["bound_max_violation"] = bound_max_violation;
  j["bound_holds"] = bound_holds;
  j["bipartite"] = bipartite;
  j["n_pairs_sampled"] = n_pairs_sampled;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

std::string MetricsReport::csv_header() {
  return "reldev_mean,reldev_min,reldev_max,spectral_gap,combinatorial_gap,volume,d_min,bound_rhs,"
         "bound_max_violation,bound_holds,bipartite,n_pairs_sampled,seed";
}

std::string MetricsReport::to_csv_row() const {
  std::string row;
  for (double v : {reldev_mean, reldev_min, reldev_max, spectral_gap, combinatorial_gap, volume, d_min,
                   bound_rhs, bound_max_violation}) {
    row += format_real(v) + ',';
  }
  row += std::string(bound_holds ? "1" : "0") + ',' + (bipartite ? "1" : "0") + ',' +
         std::to_string(n_pairs_sampled) + ',' + std::to_string(seed);
  return row;
}

}  // namespace sze
