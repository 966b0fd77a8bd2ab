#include "sze/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sze/codec.hpp"
#include "sze/error.hpp"
#include "sze/graph_io.hpp"
#include "sze/parallel.hpp"
#include "sze/partition_io.hpp"
#include "sze/rng.hpp"

namespace sze {
namespace {

template <typename Stage>
auto stage(const char* name, Stage&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const std::exception& e) {
    throw Error(std::string("stage ") + name + ": " + e.what());
  }
}

std::string error_json(const std::string& message) {
  return nlohmann::ordered_json{{"error", message}}.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

PointDataset read_points_csv(std::istream& in, bool labeled) {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> labels;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty() || text[0] == '#' || text.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream fields(text);
    std::string field;
    while (std::getline(fields, field, ',')) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(field, &used);
      } catch (const std::exception&) {
        throw ParseError("not a number: '" + field + "'", line);
      }
      if (field.find_first_not_of(" \t\r", used) != std::string::npos) {
        throw ParseError("trailing characters in '" + field + "'", line);
      }
      if (!std::isfinite(value)) throw ParseError("non-finite coordinate", line);
      row.push_back(value);
    }
    if (labeled) {
      if (row.size() < 2) throw ParseError("need coordinates and a label", line);
      const double label = row.back();
      if (label < 0 || label != std::floor(label)) throw ParseError("label must be a non-negative integer", line);
      labels.push_back(static_cast<std::size_t>(label));
      row.pop_back();
    }
    if (row.empty()) throw ParseError("empty point", line);
    if (!rows.empty() && row.size() != rows.front().size()) throw ParseError("inconsistent dimension", line);
    rows.push_back(std::move(row));
  }
  PointDataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size());
  data.points.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) data.points(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  if (labeled) data.labels = std::move(labels);
  return data;
}

PointDataset load_points_csv(const std::filesystem::path& path, bool labeled) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_points_csv(in, labeled);
}

Graph similarity_matrix(const PointDataset& data, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw PreconditionError("sigma must be positive");
  const std::size_t n = data.size();
  if (n < 2) throw PreconditionError("similarity matrix needs at least two points");
  if (!data.points.allFinite()) throw PreconditionError("non-finite coordinates");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double scale = 1.0 / (sigma * sigma);
  parallel_for(n, [&](std::size_t i) {
    const auto a = static_cast<Eigen::Index>(i);
    for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(n); ++b) {
      if (b == a) continue;
      w(a, b) = std::exp(-(data.points.row(a) - data.points.row(b)).squaredNorm() * scale);
    }
  });
  return Graph(std::move(w));
}

std::vector<std::size_t> kmeans_labels(const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed,
                                       std::size_t max_iterations) {
  const auto n = points.rows();
  if (k == 0 || static_cast<Eigen::Index>(k) > n) throw PreconditionError("k-means needs 1 <= k <= n");
  Rng rng = Rng::derive(seed, 0x4b4d);
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd centers(kk, points.cols());
  centers.row(0) = points.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
  Eigen::VectorXd nearest = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (Eigen::Index c = 1; c < kk; ++c) {
    // D^2 sampling.
    const double total = nearest.sum();
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      double target = rng.uniform01() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= nearest(i);
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
    }
    centers.row(c) = points.row(pick);
    nearest = nearest.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<std::size_t> labels(static_cast<std::size_t>(n), 0);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      (centers.rowwise() - points.row(i)).rowwise().squaredNorm().minCoeff(&best);
      auto& label = labels[static_cast<std::size_t>(i)];
      if (label != static_cast<std::size_t>(best)) {
        label = static_cast<std::size_t>(best);
        changed = true;
      }
    }
    if (!changed && it > 0) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(kk, points.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(kk);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto c = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]);
      sums.row(c) += points.row(i);
      counts(c) += 1.0;
    }
    for (Eigen::Index c = 0; c < kk; ++c) {
      if (counts(c) > 0) centers.row(c) = sums.row(c) / counts(c);
    }
  }
  return labels;
}

Graph densify_inter_completion(const Graph& g, const std::vector<std::size_t>& labels, double weight) {
  if (labels.empty()) throw PreconditionError("densification needs a clustering");
  return complete_inter(g, labels, weight);
}

std::string PipelineSummary::csv_header() {
  return "n,k,class_size,c0_size,converged,iterations,node_ratio,storage_ratio,input_density,"
         "reconstruction_density,reldev_input,reldev_reconstruction";
}

std::string PipelineSummary::to_csv_row() const {
  std::ostringstream row;
  row << n << ',' << k << ',' << class_size << ',' << c0_size << ',' << (converged ? 1 : 0) << ','
      << iterations << ',' << format_real(node_ratio) << ',' << format_real(storage_ratio) << ','
      << format_real(input_density) << ',' << format_real(reconstruction_density) << ','
      << format_real(reldev_input) << ',' << format_real(reldev_reconstruction);
  return row.str();
}

PipelineOutcome pipeline_run(const Graph& g, const std::optional<std::vector<std::size_t>>& labels,
                             const PipelineConfig& config, const std::filesystem::path& out_dir) {
  PipelineOutcome outcome;
  outcome.graph = stage("densify", [&] {
    if (!config.densify_weight) return g;
    if (!labels) throw PreconditionError("densification needs labels or a clustering");
    return densify_inter_completion(g, *labels, *config.densify_weight);
  });
  outcome.sze = stage("sze", [&] { return run_sze(outcome.graph, config.sze); });

  const auto& r = outcome.sze;
  auto& s = outcome.summary;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  s.n = outcome.graph.size();
  s.k = r.partition.partition.class_count();
  s.class_size = r.partition.partition.class_size();
  s.c0_size = r.partition.partition.exceptional.size();
  s.converged = r.partition.converged;
  s.iterations = r.partition.trace.size();
  s.node_ratio = r.compression.node_ratio;
  s.storage_ratio = r.compression.storage_ratio;
  s.input_density = global_density(outcome.graph);
  s.reconstruction_density = global_density(r.reconstruction);
  s.reldev_input = r.input_report ? r.input_report->reldev_mean : nan;
  s.reldev_reconstruction = r.reconstruction_report ? r.reconstruction_report->reldev_mean : nan;

  stage("write", [&] {
    std::filesystem::create_directories(out_dir);
    save_graph(outcome.graph, out_dir / "graph.edges", GraphFormat::edge_list);
    save_partition(r.partition.partition, out_dir / "partition.txt");
    {
      std::ofstream trace(out_dir / "trace.csv");
      write_trace(trace, r.partition.trace);
    }
    save_reduced(r.reduced, out_dir / "reduced.txt");
    save_graph(r.reconstruction, out_dir / "reconstruction.edges", GraphFormat::edge_list);
    write_text(out_dir / "metrics_input.json",
               r.input_report ? r.input_report->to_json() : error_json(r.input_error));
    write_text(out_dir / "metrics_reconstruction.json",
               r.reconstruction_report ? r.reconstruction_report->to_json()
                                       : error_json(r.reconstruction_error));
    write_text(out_dir / "summary.csv", PipelineSummary::csv_header() + "\n" + s.to_csv_row() + "\n");
  });
  return outcome;
}

PipelineOutcome pipeline_run(const PointDataset& data, const PipelineConfig& config,
                             const std::filesystem::path& out_dir) {
  const Graph w = stage("similarity", [&] { return similarity_matrix(data, config.sigma); });
  std::optional<std::vector<std::size_t>> labels = data.labels;
  if (!labels && config.densify_weight) {
    labels = stage("cluster", [&] { return kmeans_labels(data.points, config.clusters, config.sze.partition.seed); });
  }
  return pipeline_run(w, labels, config, out_dir);
}

}  // namespace sze
