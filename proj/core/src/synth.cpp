#include "sze/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>

#include "sze/error.hpp"
#include "sze/graph_io.hpp"
#include "sze/parallel.hpp"
#include "sze/rng.hpp"

namespace sze {
namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

bool same_class(std::span<const std::size_t> labels, Vertex u, Vertex v) {
  return labels[u] == labels[v] && labels[u] != EquitablePartition::no_class;
}

void require_labels(const Graph& g, std::span<const std::size_t> labels) {
  if (labels.size() != g.size()) throw PreconditionError("one class label per vertex required");
}

std::size_t rounded(double x) { return static_cast<std::size_t>(std::llround(x)); }

// Pairs u < v with the given membership and presence, in lexicographic order.
std::vector<VertexPair> collect(const Graph& g, std::span<const std::size_t> labels, bool intra, bool present) {
  std::vector<VertexPair> out;
  for (Vertex u = 0; u < g.size(); ++u) {
    for (Vertex v = u + 1; v < g.size(); ++v) {
      if (same_class(labels, u, v) == intra && (g.weight(u, v) != 0.0) == present) out.emplace_back(u, v);
    }
  }
  return out;
}

std::vector<VertexPair> choose(std::vector<VertexPair> pairs, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  // Partial Fisher-Yates: the first `count` slots are a uniform sample.
  for (std::size_t i = 0; i < count; ++i) std::swap(pairs[i], pairs[i + rng.index(pairs.size() - i)]);
  pairs.resize(count);
  return pairs;
}

double mean_or_nan(const std::optional<MetricsReport>& report) {
  return report ? report->reldev_mean : nan;
}

struct Job {
  int experiment = 0;
  std::string variant;
  double level = 0.0;
  std::uint64_t seed = 0;
  /// Builds the perturbed graph from the ground truth; `stream` seeds it.
  std::function<Graph(const GroundTruth&, std::uint64_t stream)> perturb;
  std::uint64_t stream = 0;
};

std::vector<ExperimentRow> run_jobs(const ExperimentConfig& config, const std::vector<Job>& jobs) {
  config.gt.validate();
  std::vector<ExperimentRow> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    const GroundTruth gt = make_gt(config.gt, job.seed);
    const Graph g = job.perturb(gt, mix_seed(job.seed, job.stream));
    const auto labels = gt.partition.class_of();

    ExperimentRow& row = rows[i];
    row.experiment = job.experiment;
    row.variant = job.variant;
    row.level = job.level;
    row.seed = job.seed;
    row.density = global_density(g);
    row.volume = g.volume();
    const EdgeCounts counts = count_edges(g, labels);
    row.intra_edges = counts.intra;
    row.inter_edges = counts.inter;

    SzeConfig sze = config.sze;
    sze.partition.seed = job.seed;
    sze.sampling.seed = job.seed;
    try {
      const SzeResult result = run_sze(g, sze);
      row.converged = result.partition.converged;
      row.c0_frac = result.c0_fraction;
      row.reldev_gt = mean_or_nan(result.input_report);
      row.reldev_sze = mean_or_nan(result.reconstruction_report);
      row.spectral_gap_sze = result.reconstruction_report ? result.reconstruction_report->spectral_gap : nan;
      row.error = result.input_error.empty() ? result.reconstruction_error : result.input_error;
    } catch (const Error& e) {
      row.reldev_gt = row.reldev_sze = row.spectral_gap_sze = nan;
      row.error = e.what();
    }
  });
  return rows;
}

template <typename Build>
void add_grid(std::vector<Job>& jobs, const ExperimentConfig& config, int experiment,
              const std::string& variant, std::uint64_t variant_id, Build build) {
  for (std::size_t l = 0; l < config.levels.size(); ++l) {
    for (std::size_t s = 0; s < config.seeds; ++s) {
      const double level = config.levels[l];
      Job job;
      job.experiment = experiment;
      job.variant = variant;
      job.level = level;
      job.seed = config.base_seed + s;
      job.stream = variant_id * 1000 + l;
      job.perturb = [build, level](const GroundTruth& gt, std::uint64_t stream) { return build(gt, level, stream); };
      jobs.push_back(std::move(job));
    }
  }
}

void validate_levels(const ExperimentConfig& config) {
  for (double x : config.levels) {
    if (!(x >= 0.0 && x <= 1.0)) throw PreconditionError("noise levels must be in [0, 1]");
  }
  if (config.seeds == 0) throw PreconditionError("need at least one seed per level");
}

// Raises the inter-edge count of g to `target` with unit edges.
Graph raise_inter(const Graph& g, std::span<const std::size_t> labels, std::size_t target, std::uint64_t seed) {
  const std::size_t current = count_edges(g, labels).inter;
  return target > current ? add_inter(g, labels, target - current, 1.0, seed) : g;
}

}  // namespace

void GroundTruthSpec::validate() const {
  if (k < 2 || s < 2) throw PreconditionError("ground truth needs k >= 2 and s >= 2");
  if (inter_edges_per_link > s * s) {
    throw PreconditionError("ground truth: at most s^2 inter edges per link");
  }
}

GroundTruth make_gt(const GroundTruthSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = spec.k * spec.s;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  GroundTruth gt;
  gt.partition.n = n;
  for (std::size_t c = 0; c < spec.k; ++c) {
    const auto first = static_cast<Eigen::Index>(c * spec.s);
    const auto size = static_cast<Eigen::Index>(spec.s);
    w.block(first, first, size, size).setOnes();
    gt.partition.classes.push_back(VertexSet::range(c * spec.s, (c + 1) * spec.s));
  }
  w.diagonal().setZero();

  Rng rng = Rng::derive(seed, 0x67);
  for (std::size_t c = 0; c + 1 < spec.k; ++c) {
    std::vector<std::size_t> cells(spec.s * spec.s);
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = i;
    for (std::size_t i = 0; i < spec.inter_edges_per_link; ++i) {
      std::swap(cells[i], cells[i + rng.index(cells.size() - i)]);
      const auto u = static_cast<Eigen::Index>(c * spec.s + cells[i] / spec.s);
      const auto v = static_cast<Eigen::Index>((c + 1) * spec.s + cells[i] % spec.s);
      w(u, v) = w(v, u) = 1.0;
    }
  }
  gt.graph = Graph(std::move(w));
  return gt;
}

EdgeCounts count_edges(const Graph& g, std::span<const std::size_t> labels) {
  require_labels(g, labels);
  EdgeCounts counts;
  for (Vertex u = 0; u < g.size(); ++u) {
    for (Vertex v = u + 1; v < g.size(); ++v) {
      if (g.weight(u, v) == 0.0) continue;
      ++(same_class(labels, u, v) ? counts.intra : counts.inter);
    }
  }
  return counts;
}

std::size_t intra_pair_count(std::span<const std::size_t> labels) {
  std::size_t count = 0;
  for (Vertex u = 0; u < labels.size(); ++u) {
    for (Vertex v = u + 1; v < labels.size(); ++v) count += same_class(labels, u, v) ? 1 : 0;
  }
  return count;
}

std::size_t inter_pair_count(std::span<const std::size_t> labels) {
  const std::size_t n = labels.size();
  return n * (n - (n > 0)) / 2 - intra_pair_count(labels);
}

Graph remove_intra_edges(const Graph& g, std::span<const std::size_t> labels, std::size_t count,
                         std::uint64_t seed) {
  require_labels(g, labels);
  auto edges = collect(g, labels, true, true);
  if (count > edges.size()) throw PreconditionError("cannot remove more intra edges than exist");
  Eigen::MatrixXd w = g.weights();
  for (const auto& [u, v] : choose(std::move(edges), count, seed)) {
    w(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = 0.0;
    w(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = 0.0;
  }
  return Graph(std::move(w));
}

Graph sparsify_intra(const Graph& g, std::span<const std::size_t> labels, double fraction,
                     std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw PreconditionError("fraction must be in [0, 1]");
  return remove_intra_edges(g, labels, rounded(fraction * static_cast<double>(count_edges(g, labels).intra)), seed);
}

Graph add_inter(const Graph& g, std::span<const std::size_t> labels, std::size_t count, double weight,
                std::uint64_t seed) {
  require_labels(g, labels);
  if (!(weight > 0.0 && weight <= 1.0)) throw PreconditionError("inter weight must be in (0, 1]");
  auto absent = collect(g, labels, false, false);
  if (count > absent.size()) {
    throw PreconditionError("requested " + std::to_string(count) + " inter edges but only " +
                            std::to_string(absent.size()) + " pairs are free");
  }
  Eigen::MatrixXd w = g.weights();
  for (const auto& [u, v] : choose(std::move(absent), count, seed)) {
    w(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = weight;
    w(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = weight;
  }
  return Graph(std::move(w));
}

Graph add_inter_fraction(const Graph& g, std::span<const std::size_t> labels, double fraction,
                         double weight, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw PreconditionError("fraction must be in [0, 1]");
  return add_inter(g, labels, rounded(fraction * static_cast<double>(inter_pair_count(labels))), weight, seed);
}

Graph complete_inter(const Graph& g, std::span<const std::size_t> labels, double weight) {
  require_labels(g, labels);
  if (!(weight > 0.0 && weight <= 1.0)) throw PreconditionError("completion weight must be in (0, 1]");
  Eigen::MatrixXd w = g.weights();
  for (Vertex u = 0; u < g.size(); ++u) {
    for (Vertex v = u + 1; v < g.size(); ++v) {
      if (same_class(labels, u, v)) continue;
      const auto a = static_cast<Eigen::Index>(u);
      const auto b = static_cast<Eigen::Index>(v);
      w(a, b) = w(b, a) = std::max(w(a, b), weight);
    }
  }
  return Graph(std::move(w));
}

double global_density(const Graph& g) {
  const double n = static_cast<double>(g.size());
  if (g.size() < 2) return 0.0;
  return g.volume() / (n * (n - 1.0));
}

double planted_density_formula(double x, double in, double out) { return (1.0 - x) * in + x * out; }

SzeResult run_sze(const Graph& g, const SzeConfig& config) {
  SzeResult result;
  result.partition = find_regular_partition(g, config.partition);
  const auto& p = result.partition.partition;
  result.reduced = reduce(p, result.partition.densities, result.partition.statuses, config.d_threshold,
                          config.partition.epsilon, result.partition.intra_densities);

  ExpansionSpec spec;
  spec.m = p.class_size();
  spec.mode = config.mode;
  spec.seed = config.partition.seed;
  spec.scope = config.scope;
  spec.fill_intra = config.fill_intra;
  result.reconstruction = expand(result.reduced, spec);
  result.compression = compression_metrics(g.size(), p.class_count());
  result.c0_fraction = static_cast<double>(p.exceptional.size()) / static_cast<double>(g.size());

  for (const auto& cls : p.classes) result.original_of.insert(result.original_of.end(), cls.begin(), cls.end());
  result.pairs = sample_pairs(result.reconstruction.size(), config.sampling);
  std::vector<VertexPair> original_pairs;
  original_pairs.reserve(result.pairs.size());
  for (const auto& [a, b] : result.pairs) original_pairs.emplace_back(result.original_of[a], result.original_of[b]);

  try {
    result.input_report = rel_dev_aggregate(g, original_pairs, config.sampling.seed);
  } catch (const Error& e) {
    result.input_error = std::string("input metrics: ") + e.what();
  }
  try {
    result.reconstruction_report = rel_dev_aggregate(result.reconstruction, result.pairs, config.sampling.seed);
  } catch (const Error& e) {
    result.reconstruction_error = std::string("reconstruction metrics: ") + e.what();
  }
  return result;
}

std::vector<ExperimentRow> experiment_constant_density(const ExperimentConfig& config) {
  validate_levels(config);
  std::vector<Job> jobs;
  add_grid(jobs, config, 1, "constant", 0, [](const GroundTruth& gt, double x, std::uint64_t seed) {
    const auto labels = gt.partition.class_of();
    const std::size_t q = rounded(x * static_cast<double>(count_edges(gt.graph, labels).intra));
    const Graph sparse = remove_intra_edges(gt.graph, labels, q, mix_seed(seed, 1));
    return add_inter(sparse, labels, q, 1.0, mix_seed(seed, 2));
  });
  return run_jobs(config, jobs);
}

std::vector<ExperimentRow> experiment_sparsify_only(const ExperimentConfig& config) {
  validate_levels(config);
  std::vector<Job> jobs;
  add_grid(jobs, config, 2, "delete", 0, [](const GroundTruth& gt, double x, std::uint64_t seed) {
    return sparsify_intra(gt.graph, gt.partition.class_of(), x, mix_seed(seed, 1));
  });
  const double w = config.completion_weight;
  add_grid(jobs, config, 2, "complete", 1, [w](const GroundTruth& gt, double x, std::uint64_t seed) {
    const auto labels = gt.partition.class_of();
    // Same deletions as the "delete" variant at this level and seed.
    return complete_inter(sparsify_intra(gt.graph, labels, x, mix_seed(seed, 1)), labels, w);
  });
  // Both variants share one perturbation stream per level.
  for (auto& job : jobs) job.stream %= 1000;
  return run_jobs(config, jobs);
}

std::vector<ExperimentRow> experiment_selective_density(const ExperimentConfig& config) {
  validate_levels(config);
  for (double r : config.retention) {
    if (!(r >= 0.0 && r <= 1.0)) throw PreconditionError("retention levels must be in [0, 1]");
  }
  std::vector<Job> jobs;
  add_grid(jobs, config, 3, "joint", 0, [](const GroundTruth& gt, double x, std::uint64_t seed) {
    const auto labels = gt.partition.class_of();
    const double in = static_cast<double>(intra_pair_count(labels));
    const double out = static_cast<double>(inter_pair_count(labels));
    const Graph sparse = remove_intra_edges(gt.graph, labels, rounded(x * in), mix_seed(seed, 1));
    return raise_inter(sparse, labels, rounded(x * out), mix_seed(seed, 2));
  });
  for (std::size_t v = 0; v < config.retention.size(); ++v) {
    const double keep = config.retention[v];
    const std::string name = "retain" + std::to_string(rounded(keep * 100.0));
    add_grid(jobs, config, 3, name, v + 1, [keep](const GroundTruth& gt, double x, std::uint64_t seed) {
      const auto labels = gt.partition.class_of();
      const double in = static_cast<double>(intra_pair_count(labels));
      const double out = static_cast<double>(inter_pair_count(labels));
      const Graph sparse = remove_intra_edges(gt.graph, labels, rounded((1.0 - keep) * in), mix_seed(seed, 1));
      return raise_inter(sparse, labels, rounded(x * out), mix_seed(seed, 2));
    });
  }
  return run_jobs(config, jobs);
}

std::vector<ExperimentRow> run_experiment(int experiment, const ExperimentConfig& config) {
  switch (experiment) {
    case 1: return experiment_constant_density(config);
    case 2: return experiment_sparsify_only(config);
    case 3: return experiment_selective_density(config);
    default: throw PreconditionError("experiment must be 1, 2 or 3");
  }
}

void write_experiment_csv(std::ostream& out, std::span<const ExperimentRow> rows) {
  out << "experiment,variant,level,seed,reldev_gt,reldev_sze,density,converged,c0_frac\n";
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.variant << ',' << format_real(r.level) << ',' << r.seed << ','
        << format_real(r.reldev_gt) << ',' << format_real(r.reldev_sze) << ',' << format_real(r.density) << ','
        << (r.converged ? 1 : 0) << ',' << format_real(r.c0_frac) << '\n';
  }
}

}  // namespace sze
