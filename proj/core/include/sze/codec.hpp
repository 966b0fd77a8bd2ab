#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sze/graph.hpp"
#include "sze/partition.hpp"

namespace sze {

/// k-vertex summary of a regular partition.
struct ReducedGraph {
  std::size_t k = 0;
  /// Class cardinality of the partition that was reduced.
  std::size_t m = 0;
  /// Symmetric k x k inter-class densities, zero diagonal.
  Eigen::MatrixXd densities;
  /// Per-class internal densities; empty when not recorded.
  Eigen::VectorXd intra_densities;
  /// edges(i, j) set iff the pair is regular and densities(i, j) > d_threshold.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> edges;
  double d_threshold = 0.0;
  double epsilon = 0.0;

  std::size_t edge_count() const;
  Graph adjacency() const;
};

/// Drops C0 and keeps the regular pairs above `d_threshold` as edges.
/// Throws PreconditionError if d_threshold <= epsilon or the shapes of
/// `densities` / `statuses` do not match the partition.
ReducedGraph reduce(const EquitablePartition& p, const Eigen::MatrixXd& densities,
                    std::span<const PairStatus> statuses, double d_threshold, double epsilon,
                    const Eigen::VectorXd& intra_densities = {});

/// Convenience overload: densities are computed on `g`.
ReducedGraph reduce(const Graph& g, const EquitablePartition& p,
                    std::span<const PairStatus> statuses, double d_threshold, double epsilon);

/// Every vertex of R becomes t independent vertices and every edge a K_{t,t}.
Graph t_fold(const ReducedGraph& r, std::size_t t);

enum class ExpansionMode { constant, bernoulli, complete };

enum class ExpansionScope {
  /// Blocks only for edges of R.
  reduced_edges,
  /// Every inter-class pair at its recorded density, regular or not.
  all_pairs,
};

struct ExpansionSpec {
  std::size_t m = 1;
  ExpansionMode mode = ExpansionMode::constant;
  std::uint64_t seed = 0;
  ExpansionScope scope = ExpansionScope::reduced_edges;
  /// Fill intra-class blocks at the class's internal density.
  bool fill_intra = false;
};

/// Graph on k m vertices; vertex i m + s is slot s of class i.
Graph expand(const ReducedGraph& r, const ExpansionSpec& spec);

struct KeyLemmaResult {
  double delta = 0.0;
  double epsilon0 = 0.0;
  bool epsilon_ok = false;
  bool size_ok = false;
  bool feasible = false;
  /// (epsilon0 m)^h
  double copy_lower_bound = 0.0;
};

/// delta = d - eps, eps0 = delta^max_degree / (2 + max_degree);
/// feasible iff eps <= eps0 and t - 1 <= eps0 m.
KeyLemmaResult key_lemma_feasibility(double d, double epsilon, std::size_t max_degree,
                                     std::size_t h, std::size_t m, std::size_t t);

struct CompressionMetrics {
  double node_ratio = 0.0;
  double storage_ratio = 0.0;
};

/// node_ratio = 1 - k/n; storage_ratio = 1 - (k(k-1)/2 + n) / (n(n-1)/2).
CompressionMetrics compression_metrics(std::size_t n, std::size_t k);

/// Header `k m epsilon d_threshold`, k density rows, k mask rows, then an
/// optional `intra` line with the internal densities.
void write_reduced(std::ostream& out, const ReducedGraph& r);
ReducedGraph read_reduced(std::istream& in);
void save_reduced(const ReducedGraph& r, const std::filesystem::path& path);
ReducedGraph load_reduced(const std::filesystem::path& path);

}  // namespace sze
