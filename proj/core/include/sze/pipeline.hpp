#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sze/graph.hpp"
#include "sze/synth.hpp"

namespace sze {

/// One point per row.
struct PointDataset {
  Eigen::MatrixXd points;
  std::optional<std::vector<std::size_t>> labels;

  std::size_t size() const noexcept { return static_cast<std::size_t>(points.rows()); }
};

/// Comma-separated reals, one point per line; with `labeled` the last
/// column is a non-negative integer class id. Blank lines and lines
/// starting with '#' are skipped. Throws ParseError.
PointDataset read_points_csv(std::istream& in, bool labeled);
PointDataset load_points_csv(const std::filesystem::path& path, bool labeled);

/// W_ij = exp(-|x_i - x_j|^2 / sigma^2), zero diagonal.
Graph similarity_matrix(const PointDataset& data, double sigma);

/// k-means++ seeding followed by Lloyd iterations; labels are 0..k-1.
std::vector<std::size_t> kmeans_labels(const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed,
                                       std::size_t max_iterations = 100);

/// Raises every inter-cluster weight below `weight` to `weight`.
Graph densify_inter_completion(const Graph& g, const std::vector<std::size_t>& labels, double weight);

struct PipelineConfig {
  double sigma = 1.0;
  /// Inter-cluster completion weight; empty disables densification.
  std::optional<double> densify_weight;
  /// Clusters for the densifier when the data carries no labels.
  std::size_t clusters = 10;
  SzeConfig sze;
};

struct PipelineSummary {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t class_size = 0;
  std::size_t c0_size = 0;
  bool converged = false;
  std::size_t iterations = 0;
  double node_ratio = 0.0;
  double storage_ratio = 0.0;
  double input_density = 0.0;
  double reconstruction_density = 0.0;
  double reldev_input = 0.0;
  double reldev_reconstruction = 0.0;

  static std::string csv_header();
  std::string to_csv_row() const;
};

struct PipelineOutcome {
  Graph graph;
  SzeResult sze;
  PipelineSummary summary;
};

/// Optionally densifies, runs SZE and writes graph.edges, partition.txt,
/// trace.csv, reduced.txt, reconstruction.edges, metrics_input.json,
/// metrics_reconstruction.json and summary.csv into `out_dir`. Stage
/// failures are rethrown as Error naming the stage.
PipelineOutcome pipeline_run(const Graph& g, const std::optional<std::vector<std::size_t>>& labels,
                             const PipelineConfig& config, const std::filesystem::path& out_dir);
PipelineOutcome pipeline_run(const PointDataset& data, const PipelineConfig& config,
                             const std::filesystem::path& out_dir);

}  // namespace sze
