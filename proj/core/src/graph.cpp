#include "sze/graph.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "sze/error.hpp"

namespace sze {

VertexSet::VertexSet(std::vector<Vertex> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw PreconditionError("VertexSet: duplicate vertex");
  }
}

VertexSet VertexSet::range(Vertex first, Vertex last) {
  std::vector<Vertex> members;
  members.reserve(last > first ? last - first : 0);
  for (Vertex v = first; v < last; ++v) members.push_back(v);
  return VertexSet(std::move(members));
}

bool VertexSet::contains(Vertex v) const {
  return std::binary_search(members_.begin(), members_.end(), v);
}

bool VertexSet::disjoint(const VertexSet& other) const {
  auto a = members_.begin();
  auto b = other.members_.begin();
  while (a != members_.end() && b != other.members_.end()) {
    if (*a == *b) return false;
    if (*a < *b) {
      ++a;
    } else {
      ++b;
    }
  }
  return true;
}

Graph::Graph(std::size_t n) : weights_(Eigen::MatrixXd::Zero(n, n)) {}

Graph::Graph(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols()) throw PreconditionError("Graph: matrix is not square");
  const Eigen::Index n = weights_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) {
      throw PreconditionError("Graph: self-loop at vertex " + std::to_string(i));
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = weights_(i, j);
      if (w != weights_(j, i)) {
        throw PreconditionError("Graph: asymmetric weight at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
      }
      if (!(w >= 0.0 && w <= 1.0)) {
        throw PreconditionError("Graph: weight outside [0, 1] at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
      }
    }
  }
}

Eigen::Index Graph::index(Vertex v) const {
  if (v >= size()) throw PreconditionError("Graph: vertex " + std::to_string(v) + " out of range");
  return static_cast<Eigen::Index>(v);
}

void Graph::set_weight(Vertex i, Vertex j, double w) {
  if (i == j) throw PreconditionError("Graph: self-loops are not allowed");
  if (!(w >= 0.0 && w <= 1.0)) throw PreconditionError("Graph: weight outside [0, 1]");
  weights_(index(i), index(j)) = w;
  weights_(index(j), index(i)) = w;
}

double Graph::degree(Vertex v) const { return weights_.row(index(v)).sum(); }

Eigen::VectorXd Graph::degrees() const { return weights_.rowwise().sum(); }

double Graph::min_degree() const { return size() == 0 ? 0.0 : degrees().minCoeff(); }

double Graph::max_degree() const { return size() == 0 ? 0.0 : degrees().maxCoeff(); }

double Graph::volume() const { return weights_.sum(); }

std::size_t Graph::edge_count() const {
  std::size_t count = 0;
  const Eigen::Index n = weights_.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) count += weights_(i, j) != 0.0;
  }
  return count;
}

bool Graph::is_binary() const {
  return (weights_.array() == 0.0 || weights_.array() == 1.0).all();
}

namespace {

void check_pair_sets(const Graph& g, const VertexSet& x, const VertexSet& y) {
  if (x.empty() || y.empty()) throw PreconditionError("edge density: empty vertex set");
  if (x.bound() > g.size() || y.bound() > g.size()) {
    throw PreconditionError("edge density: vertex out of range");
  }
  if (!x.disjoint(y)) throw PreconditionError("edge density: sets overlap");
}

}  // namespace

double edge_weight_between(const Graph& g, const VertexSet& x, const VertexSet& y) {
  check_pair_sets(g, x, y);
  const auto& w = g.weights();
  double total = 0.0;
  for (Vertex j : y) {
    for (Vertex i : x) total += w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return total;
}

double edge_density(const Graph& g, const VertexSet& x, const VertexSet& y) {
  return edge_weight_between(g, x, y) /
         (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

Graph binarize(const Graph& g, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw PreconditionError("binarize: threshold must be in (0, 1]");
  }
  Eigen::MatrixXd w = (g.weights().array() >= threshold).cast<double>().matrix();
  w.diagonal().setZero();
  return Graph(std::move(w));
}

std::vector<std::size_t> connected_components(const Graph& g) {
  const std::size_t n = g.size();
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(n, unset);
  const auto& w = g.weights();
  std::size_t next = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (label[root] != unset) continue;
    std::queue<std::size_t> frontier;
    frontier.push(root);
    label[root] = next;
    while (!frontier.empty()) {
      const auto u = frontier.front();
      frontier.pop();
      for (std::size_t v = 0; v < n; ++v) {
        if (label[v] == unset && w(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0.0) {
          label[v] = next;
          frontier.push(v);
        }
      }
    }
    ++next;
  }
  return label;
}

bool is_connected(const Graph& g) {
  const auto labels = connected_components(g);
  return std::all_of(labels.begin(), labels.end(), [](std::size_t l) { return l == 0; });
}

bool is_bipartite(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<int> side(n, -1);
  const auto& w = g.weights();
  for (std::size_t root = 0; root < n; ++root) {
    if (side[root] != -1) continue;
    std::queue<std::size_t> frontier;
    frontier.push(root);
    side[root] = 0;
    while (!frontier.empty()) {
      const auto u = frontier.front();
      frontier.pop();
      for (std::size_t v = 0; v < n; ++v) {
        if (w(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) <= 0.0) continue;
        if (side[v] == -1) {
          side[v] = 1 - side[u];
          frontier.push(v);
        } else if (side[v] == side[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace sze
