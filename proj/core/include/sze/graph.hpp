#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace sze {

using Vertex = std::size_t;

/// Sorted set of distinct vertex indices.
class VertexSet {
 public:
  VertexSet() = default;

  /// Sorts `members`; throws PreconditionError on duplicates.
  explicit VertexSet(std::vector<Vertex> members);
  VertexSet(std::initializer_list<Vertex> members)
      : VertexSet(std::vector<Vertex>(members)) {}

  /// {first, first + 1, ..., last - 1}
  static VertexSet range(Vertex first, Vertex last);

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  Vertex operator[](std::size_t i) const { return members_[i]; }
  std::span<const Vertex> members() const noexcept { return members_; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  bool contains(Vertex v) const;
  bool disjoint(const VertexSet& other) const;
  /// Largest member + 1, or 0 for the empty set.
  Vertex bound() const noexcept { return members_.empty() ? 0 : members_.back() + 1; }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  std::vector<Vertex> members_;
};

/// Undirected weighted graph stored as a dense symmetric matrix.
///
/// Invariants: weights are symmetric, in [0, 1], and the diagonal is zero.
/// A zero weight means "no edge". Every mutator re-establishes the
/// invariants or throws PreconditionError.
class Graph {
 public:
  Graph() = default;
  /// Edgeless graph on n vertices.
  explicit Graph(std::size_t n);
  /// Validates the invariants of `weights`.
  explicit Graph(Eigen::MatrixXd weights);

  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
  double weight(Vertex i, Vertex j) const { return weights_(index(i), index(j)); }
  const Eigen::MatrixXd& weights() const noexcept { return weights_; }

  /// Sets both (i, j) and (j, i). i != j, w in [0, 1].
  void set_weight(Vertex i, Vertex j, double w);

  double degree(Vertex v) const;
  Eigen::VectorXd degrees() const;
  double min_degree() const;
  double max_degree() const;
  double volume() const;
  /// Number of unordered pairs with non-zero weight.
  std::size_t edge_count() const;
  bool is_binary() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.size() == b.size() && a.weights_ == b.weights_;
  }

 private:
  Eigen::Index index(Vertex v) const;

  Eigen::MatrixXd weights_;
};

/// Sum of weights over x × y. x, y must be nonempty and disjoint.
double edge_weight_between(const Graph& g, const VertexSet& x, const VertexSet& y);

/// edge_weight_between / (|x| |y|).
double edge_density(const Graph& g, const VertexSet& x, const VertexSet& y);

/// Weights >= threshold become 1, the rest 0. threshold in (0, 1].
Graph binarize(const Graph& g, double threshold);

/// Component label per vertex, labels numbered in order of first vertex.
std::vector<std::size_t> connected_components(const Graph& g);
bool is_connected(const Graph& g);
bool is_bipartite(const Graph& g);

}  // namespace sze
