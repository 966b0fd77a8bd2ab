#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sze/graph.hpp"
#include "sze/laplacian_solver.hpp"

namespace sze {

using VertexPair = std::pair<Vertex, Vertex>;

enum class ResistanceRoute {
  /// Dense pseudoinverse up to `dense_limit` vertices, CG beyond.
  automatic,
  pseudoinverse,
  conjugate_gradient,
};

/// Effective resistances of one connected graph. The pseudoinverse or the CG
/// preconditioner is built once and shared by every query.
class ResistanceCalculator {
 public:
  static constexpr std::size_t dense_limit = 2000;

  explicit ResistanceCalculator(const Graph& g, ResistanceRoute route = ResistanceRoute::automatic);

  /// R_ij = L+_ii + L+_jj - 2 L+_ij; 0 when i == j.
  double resistance(Vertex i, Vertex j) const;
  bool dense() const noexcept { return pseudoinverse_.has_value(); }

 private:
  std::size_t n_;
  std::optional<Eigen::MatrixXd> pseudoinverse_;
  std::optional<LaplacianCg> cg_;
};

double effective_resistance(const Graph& g, Vertex i, Vertex j,
                            ResistanceRoute route = ResistanceRoute::automatic);
/// vol(G) R_ij
double commute_time(const Graph& g, Vertex i, Vertex j);
/// 1/d_i + 1/d_j; throws PreconditionError for an isolated vertex.
double local_prediction(const Graph& g, Vertex i, Vertex j);
/// |R_ij - (1/d_i + 1/d_j)| / R_ij; i != j.
double rel_dev(const Graph& g, Vertex i, Vertex j);

/// lambda_2 of I - D^{-1/2} W D^{-1/2}. Dense eigensolve up to 2000
/// vertices, Lanczos beyond. Throws DisconnectedGraphError.
double spectral_gap(const Graph& g);
/// Lanczos route of spectral_gap, usable at any size.
double spectral_gap_lanczos(const Graph& g, double tolerance = 1e-8);
/// lambda_2 of D - W.
double combinatorial_spectral_gap(const Graph& g);

struct SamplingConfig {
  /// Every pair is used up to this many vertices.
  std::size_t full_enumeration_limit = 500;
  /// Beyond the limit, samples_per_vertex * n distinct pairs are drawn.
  std::size_t samples_per_vertex = 10;
  std::uint64_t seed = 0;
};

/// Distinct pairs (i < j) over the given vertices, sorted.
std::vector<VertexPair> sample_pairs(std::span<const Vertex> vertices, const SamplingConfig& config);
std::vector<VertexPair> sample_pairs(std::size_t n, const SamplingConfig& config);

struct BoundCheck {
  bool holds = true;
  /// max over pairs of |C_ij / vol - (1/d_i + 1/d_j)| - 2 / (lambda_2 d_min);
  /// negative when every pair has slack.
  double max_violation = 0.0;
  bool bipartite = false;
};

/// |C_ij / vol(G) - (1/d_i + 1/d_j)| <= (1/lambda_2)(2/d_min) on every pair.
/// Stated for non-bipartite graphs; bipartite input is flagged, not refused.
BoundCheck luxburg_bound_check(const Graph& g, std::span<const VertexPair> pairs);

struct MetricsReport {
  double reldev_mean = 0.0;
  double reldev_min = 0.0;
  double reldev_max = 0.0;
  double spectral_gap = 0.0;
  double combinatorial_gap = 0.0;
  double volume = 0.0;
  double d_min = 0.0;
  /// 2 / (lambda_2 d_min)
  double bound_rhs = 0.0;
  double bound_max_violation = 0.0;
  bool bound_holds = true;
  bool bipartite = false;
  std::size_t n_pairs_sampled = 0;
  std::uint64_t seed = 0;

  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

/// RelDev statistics over `pairs`, spectral gaps and the von Luxburg bound check.
MetricsReport rel_dev_aggregate(const Graph& g, std::span<const VertexPair> pairs, std::uint64_t seed = 0,
                                ResistanceRoute route = ResistanceRoute::automatic);
/// Pairs drawn by sample_pairs over all vertices.
MetricsReport rel_dev_aggregate(const Graph& g, const SamplingConfig& config = {});

}  // namespace sze
