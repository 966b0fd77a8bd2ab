#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sze/codec.hpp"
#include "sze/graph.hpp"
#include "sze/metrics.hpp"
#include "sze/partition.hpp"

namespace sze {

struct GroundTruthSpec {
  std::size_t k = 10;
  std::size_t s = 20;
  /// Unit edges drawn between class i and i + 1.
  std::size_t inter_edges_per_link = 20;

  void validate() const;
};

struct GroundTruth {
  Graph graph;
  /// Contiguous blocks: class i is [i s, (i + 1) s); C0 is empty.
  EquitablePartition partition;
};

/// k unit-weight cliques of size s chained by seeded random inter edges
/// between consecutive classes only.
GroundTruth make_gt(const GroundTruthSpec& spec, std::uint64_t seed);

struct EdgeCounts {
  std::size_t intra = 0;
  std::size_t inter = 0;
};

/// Non-zero pairs inside a class / across classes. Vertices labelled
/// `EquitablePartition::no_class` count as their own cluster.
EdgeCounts count_edges(const Graph& g, std::span<const std::size_t> labels);

/// #In: pairs inside the classes of `labels`.
std::size_t intra_pair_count(std::span<const std::size_t> labels);
/// #Out: pairs across classes.
std::size_t inter_pair_count(std::span<const std::size_t> labels);

/// Removes exactly `count` uniformly chosen intra-class edges.
Graph remove_intra_edges(const Graph& g, std::span<const std::size_t> labels, std::size_t count,
                         std::uint64_t seed);
/// Removes round(fraction x current intra-edge count) intra-class edges.
Graph sparsify_intra(const Graph& g, std::span<const std::size_t> labels, double fraction,
                     std::uint64_t seed);

/// Adds `count` uniformly chosen absent inter-class pairs with `weight`.
/// Throws PreconditionError when fewer absent pairs exist.
Graph add_inter(const Graph& g, std::span<const std::size_t> labels, std::size_t count, double weight,
                std::uint64_t seed);
/// add_inter with count = round(fraction #Out).
Graph add_inter_fraction(const Graph& g, std::span<const std::size_t> labels, double fraction,
                         double weight, std::uint64_t seed);

/// Inter-class weights below `weight` (absent pairs included) are raised to
/// `weight`; intra weights are untouched.
Graph complete_inter(const Graph& g, std::span<const std::size_t> labels, double weight);

/// 2 (weight sum) / (n (n - 1))
double global_density(const Graph& g);
/// D(x) = (1 - x) #In + x #Out
double planted_density_formula(double x, double in, double out);

struct SzeConfig {
  PartitionConfig partition;
  double d_threshold = 0.3;
  ExpansionMode mode = ExpansionMode::constant;
  ExpansionScope scope = ExpansionScope::all_pairs;
  bool fill_intra = true;
  SamplingConfig sampling;
};

/// Compress (partition + reduce) then decompress (expand) and measure RelDev
/// on input and reconstruction over the same pairs. Failures of the metric
/// stages are recorded in the *_error fields rather than thrown.
struct SzeResult {
  PartitionResult partition;
  ReducedGraph reduced;
  Graph reconstruction;
  CompressionMetrics compression;
  /// Original vertex of every reconstruction vertex (class i, slot s at i m + s).
  std::vector<Vertex> original_of;
  std::vector<VertexPair> pairs;
  std::optional<MetricsReport> input_report;
  std::optional<MetricsReport> reconstruction_report;
  std::string input_error;
  std::string reconstruction_error;
  double c0_fraction = 0.0;
};

SzeResult run_sze(const Graph& g, const SzeConfig& config);

struct ExperimentConfig {
  GroundTruthSpec gt;
  std::vector<double> levels{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t seeds = 5;
  std::uint64_t base_seed = 0;
  /// Weight of inter-cluster completion (experiment 2).
  double completion_weight = 0.2;
  /// Intra retention levels of experiment 3, variant B.
  std::vector<double> retention{0.5, 0.75, 1.0};
  SzeConfig sze;
};

struct ExperimentRow {
  int experiment = 0;
  std::string variant;
  double level = 0.0;
  std::uint64_t seed = 0;
  /// Mean RelDev of the perturbed (uncompressed) graph; NaN on failure.
  double reldev_gt = 0.0;
  /// Mean RelDev of the SZE reconstruction; NaN on failure.
  double reldev_sze = 0.0;
  double density = 0.0;
  bool converged = false;
  double c0_frac = 0.0;
  std::size_t intra_edges = 0;
  std::size_t inter_edges = 0;
  double volume = 0.0;
  double spectral_gap_sze = 0.0;
  std::string error;
};

/// Remove q intra edges, add q unit inter edges.
std::vector<ExperimentRow> experiment_constant_density(const ExperimentConfig& config);
/// Variant "delete": remove intra edges only. Variant "complete": then set
/// every absent inter pair to completion_weight.
std::vector<ExperimentRow> experiment_sparsify_only(const ExperimentConfig& config);
/// Variant "joint": remove x #In intra edges, raise inter edges to x #Out.
/// Variants "retain<pct>": keep a fixed share of #In, sweep x' #Out.
std::vector<ExperimentRow> experiment_selective_density(const ExperimentConfig& config);
std::vector<ExperimentRow> run_experiment(int experiment, const ExperimentConfig& config);

/// Header `experiment,variant,level,seed,reldev_gt,reldev_sze,density,converged,c0_frac`.
void write_experiment_csv(std::ostream& out, std::span<const ExperimentRow> rows);

}  // namespace sze
