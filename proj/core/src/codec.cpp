#include "sze/codec.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "sze/error.hpp"
#include "sze/graph_io.hpp"
#include "sze/parallel.hpp"
#include "sze/rng.hpp"

namespace sze {
namespace {

Eigen::Index at(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Fills the m x m block between classes i and j (i == j: the class itself).
void fill_block(Eigen::MatrixXd& w, std::size_t i, std::size_t j, std::size_t m, double density,
                ExpansionMode mode, Rng& rng) {
  if (density <= 0.0) return;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = i == j ? a + 1 : 0; b < m; ++b) {
      double value = 0.0;
      switch (mode) {
        case ExpansionMode::constant: value = density; break;
        case ExpansionMode::complete: value = 1.0; break;
        case ExpansionMode::bernoulli: value = rng.uniform01() < density ? 1.0 : 0.0; break;
      }
      w(at(i * m + a), at(j * m + b)) = value;
      w(at(j * m + b), at(i * m + a)) = value;
    }
  }
}

}  // namespace

std::size_t ReducedGraph::edge_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) count += edges(at(i), at(j)) ? 1 : 0;
  }
  return count;
}

Graph ReducedGraph::adjacency() const {
  Graph g(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (edges(at(i), at(j))) g.set_weight(i, j, 1.0);
    }
  }
  return g;
}

ReducedGraph reduce(const EquitablePartition& p, const Eigen::MatrixXd& densities,
                    std::span<const PairStatus> statuses, double d_threshold, double epsilon,
                    const Eigen::VectorXd& intra_densities) {
  if (!(d_threshold > epsilon)) {
    throw PreconditionError("reduce: the key lemma needs d_threshold > epsilon");
  }
  if (!(epsilon > 0.0)) throw PreconditionError("reduce: epsilon must be positive");
  const std::size_t k = p.class_count();
  if (densities.rows() != at(k) || densities.cols() != at(k)) {
    throw PreconditionError("reduce: density matrix does not match the partition");
  }
  if (statuses.size() != k * (k - (k > 0)) / 2) {
    throw PreconditionError("reduce: expected one status per class pair");
  }
  if (intra_densities.size() != 0 && intra_densities.size() != at(k)) {
    throw PreconditionError("reduce: intra densities do not match the partition");
  }

  ReducedGraph r;
  r.k = k;
  r.m = p.class_size();
  r.densities = densities;
  r.densities.diagonal().setZero();
  r.intra_densities = intra_densities;
  r.d_threshold = d_threshold;
  r.epsilon = epsilon;
  r.edges.setConstant(at(k), at(k), false);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const bool edge = statuses[pair_index(i, j, k)].is_regular() && densities(at(i), at(j)) > d_threshold;
      r.edges(at(i), at(j)) = edge;
      r.edges(at(j), at(i)) = edge;
    }
  }
  return r;
}

ReducedGraph reduce(const Graph& g, const EquitablePartition& p,
                    std::span<const PairStatus> statuses, double d_threshold, double epsilon) {
  return reduce(p, class_densities(g, p), statuses, d_threshold, epsilon, intra_class_densities(g, p));
}

Graph t_fold(const ReducedGraph& r, std::size_t t) {
  if (t == 0) throw PreconditionError("t_fold: t must be positive");
  ExpansionSpec spec;
  spec.m = t;
  spec.mode = ExpansionMode::complete;
  return expand(r, spec);
}

Graph expand(const ReducedGraph& r, const ExpansionSpec& spec) {
  if (spec.m == 0) throw PreconditionError("expand: m must be positive");
  const std::size_t k = r.k;
  const std::size_t m = spec.m;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(at(k * m), at(k * m));

  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  for (std::size_t i = 0; i < k; ++i) {
    if (spec.fill_intra && r.intra_densities.size() == at(k)) blocks.emplace_back(i, i);
    for (std::size_t j = i + 1; j < k; ++j) {
      const bool wanted = spec.scope == ExpansionScope::all_pairs ? r.densities(at(i), at(j)) > 0.0
                                                                  : r.edges(at(i), at(j));
      if (wanted) blocks.emplace_back(i, j);
    }
  }
  // Blocks are disjoint, so they can be filled concurrently; each has its
  // own stream keyed by the class pair.
  parallel_for(blocks.size(), [&](std::size_t b) {
    const auto [i, j] = blocks[b];
    Rng rng = Rng::derive(spec.seed, i * k + j);
    const double density = i == j ? r.intra_densities(at(i)) : r.densities(at(i), at(j));
    fill_block(w, i, j, m, density, spec.mode, rng);
  });
  return Graph(std::move(w));
}

KeyLemmaResult key_lemma_feasibility(double d, double epsilon, std::size_t max_degree,
                                     std::size_t h, std::size_t m, std::size_t t) {
  if (!(epsilon > 0.0) || !(d > epsilon)) throw PreconditionError("key lemma: need d > epsilon > 0");
  if (max_degree == 0) throw PreconditionError("key lemma: max degree must be positive");
  if (h == 0) throw PreconditionError("key lemma: h must be positive");
  KeyLemmaResult out;
  out.delta = d - epsilon;
  const double dd = static_cast<double>(max_degree);
  out.epsilon0 = std::pow(out.delta, dd) / (2.0 + dd);
  out.epsilon_ok = epsilon <= out.epsilon0;
  out.size_ok = static_cast<double>(t) - 1.0 <= out.epsilon0 * static_cast<double>(m);
  out.feasible = out.epsilon_ok && out.size_ok;
  out.copy_lower_bound = std::pow(out.epsilon0 * static_cast<double>(m), static_cast<double>(h));
  return out;
}

CompressionMetrics compression_metrics(std::size_t n, std::size_t k) {
  if (n < 2) throw PreconditionError("compression metrics: need n >= 2");
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return {1.0 - kk / nn, 1.0 - (kk * (kk - 1.0) / 2.0 + nn) / (nn * (nn - 1.0) / 2.0)};
}

void write_reduced(std::ostream& out, const ReducedGraph& r) {
  out << r.k << ' ' << r.m << ' ' << format_real(r.epsilon) << ' ' << format_real(r.d_threshold) << '\n';
  for (std::size_t i = 0; i < r.k; ++i) {
    for (std::size_t j = 0; j < r.k; ++j) out << (j ? " " : "") << format_real(r.densities(at(i), at(j)));
    out << '\n';
  }
  for (std::size_t i = 0; i < r.k; ++i) {
    for (std::size_t j = 0; j < r.k; ++j) out << (j ? " " : "") << (r.edges(at(i), at(j)) ? 1 : 0);
    out << '\n';
  }
  if (r.intra_densities.size() == at(r.k)) {
    out << "intra";
    for (std::size_t i = 0; i < r.k; ++i) out << ' ' << format_real(r.intra_densities(at(i)));
    out << '\n';
  }
}

ReducedGraph read_reduced(std::istream& in) {
  std::string text;
  std::size_t line = 1;
  if (!std::getline(in, text)) throw ParseError("missing header", line);
  ReducedGraph r;
  {
    std::istringstream header(text);
    if (!(header >> r.k >> r.m >> r.epsilon >> r.d_threshold)) {
      throw ParseError("malformed `k m epsilon d_threshold` header", line);
    }
  }
  const auto k = at(r.k);
  r.densities.resize(k, k);
  r.edges.resize(k, k);
  auto read_row = [&](auto&& store) {
    ++line;
    if (!std::getline(in, text)) throw ParseError("unexpected end of input", line);
    std::istringstream row(text);
    for (Eigen::Index j = 0; j < k; ++j) {
      double value = 0.0;
      if (!(row >> value)) throw ParseError("expected " + std::to_string(k) + " values", line);
      store(j, value);
    }
  };
  for (Eigen::Index i = 0; i < k; ++i) {
    read_row([&](Eigen::Index j, double v) {
      if (!(v >= 0.0 && v <= 1.0)) throw ParseError("density outside [0, 1]", line);
      r.densities(i, j) = v;
    });
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    read_row([&](Eigen::Index j, double v) {
      if (v != 0.0 && v != 1.0) throw ParseError("edge mask entries must be 0 or 1", line);
      r.edges(i, j) = v == 1.0;
    });
  }
  if (r.densities != r.densities.transpose() || r.edges != r.edges.transpose()) {
    throw ParseError("reduced graph is not symmetric", 0);
  }
  ++line;
  if (std::getline(in, text) && !text.empty()) {
    std::istringstream row(text);
    std::string tag;
    row >> tag;
    if (tag != "intra") throw ParseError("expected `intra` line", line);
    r.intra_densities.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (!(row >> r.intra_densities(i))) throw ParseError("expected intra densities", line);
    }
  }
  return r;
}

void save_reduced(const ReducedGraph& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_reduced(out, r);
}

ReducedGraph load_reduced(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_reduced(in);
}

}  // namespace sze
