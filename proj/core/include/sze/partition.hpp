#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sze/graph.hpp"

namespace sze {

/// Classes C1..Ck of identical cardinality plus the exceptional set C0.
struct EquitablePartition {
  std::size_t n = 0;
  std::vector<VertexSet> classes;
  VertexSet exceptional;

  static constexpr std::size_t no_class = std::numeric_limits<std::size_t>::max();

  std::size_t class_count() const noexcept { return classes.size(); }
  std::size_t class_size() const noexcept { return classes.empty() ? 0 : classes.front().size(); }
  /// Class index of every vertex; `no_class` for members of C0.
  std::vector<std::size_t> class_of() const;
  /// Throws PreconditionError unless the classes are equal-sized and,
  /// together with C0, partition [0, n).
  void validate() const;

  friend bool operator==(const EquitablePartition&, const EquitablePartition&) = default;
};

/// Witness that (C_r, C_s) is irregular: x ⊆ C_r, y ⊆ C_s with
/// |d(x, y) - d(C_r, C_s)| = density_gap >= eps^4.
struct Certificate {
  VertexSet x;
  VertexSet y;
  double density_gap = 0.0;
};

enum class Verdict {
  regular,
  irregular,
  /// Subset deviation is large but no certificate survived validation.
  unverified,
};

enum class Condition { none, low_density, degree_deviation, subset_deviation };

struct PairStatus {
  Verdict verdict = Verdict::regular;
  Condition condition = Condition::none;
  /// Present exactly when verdict == irregular.
  std::optional<Certificate> certificate;

  bool is_regular() const noexcept { return verdict == Verdict::regular; }
};

const char* to_string(Verdict verdict);
const char* to_string(Condition condition);

struct PartitionConfig {
  double epsilon = 0.25;
  /// b: number of classes of the initial partition.
  std::size_t initial_classes = 10;
  std::size_t max_iterations = 20;
  std::uint64_t seed = 0;
  /// Weighted input is binarized at this threshold before the checks.
  double binarize_threshold = 0.5;
  /// Refinement never produces classes smaller than this.
  std::size_t min_class_size = 8;
  /// Refinements without improvement of the irregular fraction before the
  /// class size is halved.
  std::size_t stall_patience = 2;

  void validate() const;
  /// The check lemma is stated for 0 < eps < 1/16.
  bool within_check_lemma_range() const noexcept { return epsilon < 1.0 / 16.0; }
};

/// Seeded random permutation cut into b classes of floor(n/b); the
/// remaining n mod b vertices form C0.
EquitablePartition initial_partition(const Graph& g, std::size_t b, std::uint64_t seed);

/// sigma(y1, y2) = |N(y1) ∩ N(y2) ∩ a| - d^2 / c where d is the average degree
/// of the bipartite graph between a and b and c = |a| = |b|.
double neighborhood_deviation(const Graph& g, const VertexSet& a, const VertexSet& b, Vertex y1,
                              Vertex y2);

/// All sigma(y1, y2) for members of b, indexed by position in b, from one
/// product of the bipartite adjacency with itself. The diagonal is not a
/// deviation and is left as computed.
Eigen::MatrixXd deviation_matrix(const Graph& g, const VertexSet& a, const VertexSet& b);

/// Sum of sigma over unordered distinct pairs of y, divided by |y|^2.
double subset_deviation(const Graph& g, const VertexSet& a, const VertexSet& b, const VertexSet& y);

/// Constructive regularity check of the pair (c_r, c_s) on a 0/1 graph.
/// Conditions are tried in order: low density, degree deviation, subset
/// deviation.
PairStatus check_pair_regularity(const Graph& g, const VertexSet& c_r, const VertexSet& c_s,
                                 double epsilon);

/// Direct recomputation of the certificate invariants from the graph.
bool certificate_is_sound(const Graph& g, const VertexSet& c_r, const VertexSet& c_s,
                          const Certificate& certificate, double epsilon);

/// Position of pair (r, s), r < s, in the lexicographic pair order.
std::size_t pair_index(std::size_t r, std::size_t s, std::size_t k);

/// Statuses of all class pairs in lexicographic order. Pairs are checked in
/// parallel; the result does not depend on the thread count.
std::vector<PairStatus> check_all_pairs(const Graph& g, const EquitablePartition& p,
                                        double epsilon);

/// k x k matrix of inter-class densities; zero diagonal.
Eigen::MatrixXd class_densities(const Graph& g, const EquitablePartition& p);
/// Density inside each class: weight sum / (c (c - 1)).
Eigen::VectorXd intra_class_densities(const Graph& g, const EquitablePartition& p);

enum class RefineMode {
  /// Keep the class size; regroup the split pieces.
  regroup,
  /// Halve the class size.
  split,
};

/// One refinement step. Every class takes part in at most one certificate,
/// picked at random among its irregular partners; certified classes are cut
/// into (certificate members, rest) and the pieces are re-chunked into
/// classes of the new cardinality. Leftovers and the old C0 are pooled,
/// ordered by their density profile towards the current classes and
/// chunked; the remainder becomes C0. The new cardinality is the largest
/// size not above the mode's target that keeps |C0| < eps n.
///
/// Returns `p` unchanged when no pair is non-regular. Throws
/// PartitionFailure when no admissible size >= min_class_size exists.
EquitablePartition refine(const Graph& g, const EquitablePartition& p,
                          std::span<const PairStatus> statuses, const PartitionConfig& config,
                          RefineMode mode = RefineMode::regroup, std::uint64_t stream = 0);

struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t k = 0;
  std::size_t class_size = 0;
  std::size_t irregular_count = 0;
  std::size_t c0_size = 0;
};

struct PartitionResult {
  EquitablePartition partition;
  /// Inter-class densities on the original (weighted) graph.
  Eigen::MatrixXd densities;
  /// Intra-class densities on the original graph.
  Eigen::VectorXd intra_densities;
  /// Pair statuses of `partition`, lexicographic order.
  std::vector<PairStatus> statuses;
  std::vector<IterationRecord> trace;
  bool converged = false;
  bool within_check_lemma_range = false;
  std::string diagnostic;

  std::size_t irregular_count() const;
};

/// Called after every round of pair checks with the 0/1 graph the checks ran on.
using IterationObserver = std::function<void(const Graph& checked, const EquitablePartition&,
                                             std::span<const PairStatus>)>;

/// Iterates check -> halt test -> refine from the seeded initial partition.
/// Halts once at most eps k(k-1)/2 pairs are not verified regular. When the
/// iteration budget runs out or refinement fails, the iterate with the
/// lowest non-regular fraction is returned with converged = false.
PartitionResult find_regular_partition(const Graph& g, const PartitionConfig& config,
                                       const IterationObserver& observer = {});

}  // namespace sze
