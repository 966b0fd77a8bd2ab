// sze: compress graphs into regular-partition summaries and measure how
// resistance structure survives the round trip.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sze/codec.hpp"
#include "sze/error.hpp"
#include "sze/graph_io.hpp"
#include "sze/metrics.hpp"
#include "sze/parallel.hpp"
#include "sze/partition.hpp"
#include "sze/partition_io.hpp"
#include "sze/pipeline.hpp"
#include "sze/rng.hpp"
#include "sze/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_not_converged = 2;

struct Globals {
  std::uint64_t seed = 0;
  double epsilon = 0.25;
  std::size_t threads = 0;
  fs::path out_dir = ".";
};

struct PartitionOptions {
  std::size_t classes = 10;
  std::size_t max_iterations = 20;
  double binarize = 0.5;
  std::size_t min_class_size = 8;
  std::size_t stall_patience = 2;

  void add(CLI::App* app) {
    app->add_option("-b,--classes", classes, "Classes of the initial partition")->capture_default_str();
    app->add_option("--max-iterations", max_iterations)->capture_default_str();
    app->add_option("--binarize", binarize, "Binarization threshold for the checks")->capture_default_str();
    app->add_option("--min-class-size", min_class_size)->capture_default_str();
    app->add_option("--stall-patience", stall_patience)->capture_default_str();
  }

  sze::PartitionConfig config(const Globals& g) const {
    sze::PartitionConfig c;
    c.epsilon = g.epsilon;
    c.initial_classes = classes;
    c.max_iterations = max_iterations;
    c.seed = g.seed;
    c.binarize_threshold = binarize;
    c.min_class_size = min_class_size;
    c.stall_patience = stall_patience;
    return c;
  }
};

fs::path output_path(const Globals& g, const std::string& given, const std::string& fallback) {
  return given.empty() ? g.out_dir / fallback : fs::path(given);
}

template <typename Write>
void write_file(const fs::path& path, Write write) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw sze::Error("cannot write " + path.string());
  write(out);
}

sze::ExpansionMode parse_mode(const std::string& mode) {
  if (mode == "constant") return sze::ExpansionMode::constant;
  if (mode == "bernoulli") return sze::ExpansionMode::bernoulli;
  if (mode == "complete") return sze::ExpansionMode::complete;
  throw sze::PreconditionError("unknown expansion mode '" + mode + "'");
}

sze::ExpansionScope parse_scope(const std::string& scope) {
  if (scope == "edges") return sze::ExpansionScope::reduced_edges;
  if (scope == "all") return sze::ExpansionScope::all_pairs;
  throw sze::PreconditionError("unknown expansion scope '" + scope + "'");
}

// "none" or "inter:<w>"
std::optional<double> parse_densify(const std::string& text) {
  if (text == "none") return std::nullopt;
  if (text.rfind("inter:", 0) == 0) {
    std::size_t used = 0;
    const std::string number = text.substr(6);
    double w = 0.0;
    try {
      w = std::stod(number, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == number.size() && used > 0) return w;
  }
  throw sze::PreconditionError("--densify expects none or inter:<w>, got '" + text + "'");
}

std::vector<std::size_t> labels_from(const fs::path& partition_path) {
  return sze::load_partition(partition_path).class_of();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regular-partition graph compression and resistance diagnostics"};
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--seed", globals.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--epsilon", globals.epsilon, "Regularity parameter")->capture_default_str();
  app.add_option("--threads", globals.threads, "Worker threads (0: all cores)")->capture_default_str();
  app.add_option("--out-dir", globals.out_dir, "Directory for default output paths")->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Clique-chain ground truth");
  sze::GroundTruthSpec gt_spec;
  std::string gen_out;
  gen->add_option("--k", gt_spec.k, "Cliques")->capture_default_str();
  gen->add_option("--s", gt_spec.s, "Clique size")->capture_default_str();
  gen->add_option("--inter", gt_spec.inter_edges_per_link, "Edges between consecutive cliques")
      ->capture_default_str();
  gen->add_option("-o,--output", gen_out, "Graph file (default <out-dir>/gt.edges)");

  // perturb
  auto* perturb = app.add_subcommand("perturb", "Sparsify / densify a graph relative to a partition");
  std::string perturb_in, perturb_partition, perturb_out;
  double sparsify = 0.0, add_fraction = 0.0, add_weight = 1.0;
  std::size_t add_count = 0;
  std::optional<double> complete_weight;
  perturb->add_option("-i,--input", perturb_in)->required()->check(CLI::ExistingFile);
  perturb->add_option("-p,--partition", perturb_partition, "Planted partition defining the clusters")
      ->required()
      ->check(CLI::ExistingFile);
  perturb->add_option("--sparsify", sparsify, "Fraction of intra edges to remove")->capture_default_str();
  perturb->add_option("--add-inter", add_count, "Inter edges to add")->capture_default_str();
  perturb->add_option("--add-inter-fraction", add_fraction, "Inter edges to add, as a fraction of #Out")
      ->capture_default_str();
  perturb->add_option("--weight", add_weight, "Weight of added inter edges")->capture_default_str();
  perturb->add_option("--complete-inter", complete_weight, "Set every absent inter pair to this weight");
  perturb->add_option("-o,--output", perturb_out, "Graph file (default <out-dir>/perturbed.edges)");

  // partition
  auto* partition = app.add_subcommand("partition", "Find an epsilon-regular partition");
  std::string partition_in;
  PartitionOptions partition_options;
  partition->add_option("-i,--input", partition_in)->required()->check(CLI::ExistingFile);
  partition_options.add(partition);

  // reduce
  auto* reduce_cmd = app.add_subcommand("reduce", "Reduced graph of a partition");
  std::string reduce_in, reduce_partition, reduce_out;
  double d_threshold = 0.3, reduce_binarize = 0.5;
  reduce_cmd->add_option("-i,--input", reduce_in)->required()->check(CLI::ExistingFile);
  reduce_cmd->add_option("-p,--partition", reduce_partition)->required()->check(CLI::ExistingFile);
  reduce_cmd->add_option("--d-threshold", d_threshold)->capture_default_str();
  reduce_cmd->add_option("--binarize", reduce_binarize)->capture_default_str();
  reduce_cmd->add_option("-o,--output", reduce_out, "Default <out-dir>/reduced.txt");

  // expand
  auto* expand_cmd = app.add_subcommand("expand", "Key-lemma expansion of a reduced graph");
  std::string expand_in, expand_out, mode = "constant", scope = "edges";
  std::size_t expand_m = 0;
  bool fill_intra = false;
  expand_cmd->add_option("-i,--input", expand_in, "Reduced graph file")->required()->check(CLI::ExistingFile);
  expand_cmd->add_option("--m", expand_m, "Vertices per class (default: recorded class size)");
  expand_cmd->add_option("--mode", mode, "constant | bernoulli | complete")->capture_default_str();
  expand_cmd->add_option("--scope", scope, "edges (reduced-graph edges) | all (every pair)")
      ->capture_default_str();
  expand_cmd->add_flag("--fill-intra", fill_intra, "Fill classes at their internal density");
  expand_cmd->add_option("-o,--output", expand_out, "Default <out-dir>/reconstruction.edges");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "RelDev, spectral gap and von Luxburg bound of a graph");
  std::string metrics_in, metrics_out;
  sze::SamplingConfig sampling;
  metrics->add_option("-i,--input", metrics_in)->required()->check(CLI::ExistingFile);
  metrics->add_option("--full-limit", sampling.full_enumeration_limit, "Enumerate all pairs up to n")
      ->capture_default_str();
  metrics->add_option("--samples-per-vertex", sampling.samples_per_vertex)->capture_default_str();
  metrics->add_option("-o,--output", metrics_out, "Default <out-dir>/metrics.json");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Synthetic experiments 1-3");
  int which = 0;
  std::size_t levels = 10, seeds = 5;
  double completion = 0.2;
  PartitionOptions experiment_partition;
  double experiment_threshold = 0.3;
  std::string experiment_out;
  experiment->add_option("which", which, "1: constant density, 2: sparsify only, 3: selective density")
      ->required()
      ->check(CLI::IsMember({1, 2, 3}));
  experiment->add_option("--levels", levels, "Grid size; levels are i/levels for i < levels")
      ->capture_default_str();
  experiment->add_option("--seeds", seeds)->capture_default_str();
  experiment->add_option("--k", gt_spec.k)->capture_default_str();
  experiment->add_option("--s", gt_spec.s)->capture_default_str();
  experiment->add_option("--inter", gt_spec.inter_edges_per_link)->capture_default_str();
  experiment->add_option("--weight", completion, "Completion weight (experiment 2)")->capture_default_str();
  experiment->add_option("--d-threshold", experiment_threshold)->capture_default_str();
  experiment_partition.add(experiment);
  experiment->add_option("-o,--output", experiment_out, "Default <out-dir>/experiment<N>.csv");

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Points or graph -> SZE -> artifacts");
  std::string points_path, graph_path, densify = "none";
  bool labeled = false;
  sze::PipelineConfig pipeline_config;
  PartitionOptions pipeline_partition;
  auto* points_opt = pipeline->add_option("--points", points_path, "CSV of points")->check(CLI::ExistingFile);
  auto* graph_opt = pipeline->add_option("--graph", graph_path, "Graph file")->check(CLI::ExistingFile);
  points_opt->excludes(graph_opt);
  pipeline->add_flag("--labeled", labeled, "Last CSV column is a cluster label");
  pipeline->add_option("--sigma", pipeline_config.sigma, "Kernel width")->capture_default_str();
  pipeline->add_option("--densify", densify, "none | inter:<w>")->capture_default_str();
  pipeline->add_option("--clusters", pipeline_config.clusters, "k-means clusters when unlabeled")
      ->capture_default_str();
  pipeline->add_option("--d-threshold", pipeline_config.sze.d_threshold)->capture_default_str();
  pipeline_partition.add(pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_error;
  }

  try {
    sze::set_thread_limit(globals.threads);

    if (*gen) {
      const auto gt = sze::make_gt(gt_spec, globals.seed);
      const fs::path out = output_path(globals, gen_out, "gt.edges");
      write_file(out, [&](std::ostream& os) { sze::write_graph(os, gt.graph, sze::GraphFormat::edge_list); });
      const fs::path part = out.parent_path() / (out.stem().string() + "_partition.txt");
      write_file(part, [&](std::ostream& os) { sze::write_partition(os, gt.partition); });
      std::cout << "wrote " << out.string() << " and " << part.string() << '\n';
      return exit_ok;
    }

    if (*perturb) {
      sze::Graph g = sze::load_graph(perturb_in);
      const auto labels = labels_from(perturb_partition);
      if (labels.size() != g.size()) throw sze::PreconditionError("partition does not match the graph");
      if (sparsify > 0.0) g = sze::sparsify_intra(g, labels, sparsify, sze::mix_seed(globals.seed, 1));
      if (add_count > 0) g = sze::add_inter(g, labels, add_count, add_weight, sze::mix_seed(globals.seed, 2));
      if (add_fraction > 0.0) {
        g = sze::add_inter_fraction(g, labels, add_fraction, add_weight, sze::mix_seed(globals.seed, 3));
      }
      if (complete_weight) g = sze::complete_inter(g, labels, *complete_weight);
      const fs::path out = output_path(globals, perturb_out, "perturbed.edges");
      write_file(out, [&](std::ostream& os) { sze::write_graph(os, g, sze::format_for_path(out)); });
      const auto counts = sze::count_edges(g, labels);
      std::cout << "intra " << counts.intra << " inter " << counts.inter << " density "
                << sze::format_real(sze::global_density(g)) << '\n';
      return exit_ok;
    }

    if (*partition) {
      const sze::Graph g = sze::load_graph(partition_in);
      const auto result = sze::find_regular_partition(g, partition_options.config(globals));
      write_file(globals.out_dir / "partition.txt",
                 [&](std::ostream& os) { sze::write_partition(os, result.partition); });
      write_file(globals.out_dir / "trace.csv", [&](std::ostream& os) { sze::write_trace(os, result.trace); });
      std::cout << (result.converged ? "converged" : "not converged") << ": k " << result.partition.class_count()
                << " c " << result.partition.class_size() << " |C0| " << result.partition.exceptional.size()
                << " non-regular pairs " << result.irregular_count() << '\n';
      if (!result.converged) {
        std::cerr << "warning: " << result.diagnostic << '\n';
        return exit_not_converged;
      }
      return exit_ok;
    }

    if (*reduce_cmd) {
      const sze::Graph g = sze::load_graph(reduce_in);
      const auto p = sze::load_partition(reduce_partition);
      if (p.n != g.size()) throw sze::PreconditionError("partition does not match the graph");
      const sze::Graph checked = g.is_binary() ? g : sze::binarize(g, reduce_binarize);
      const auto statuses = sze::check_all_pairs(checked, p, globals.epsilon);
      const auto r = sze::reduce(g, p, statuses, d_threshold, globals.epsilon);
      const fs::path out = output_path(globals, reduce_out, "reduced.txt");
      write_file(out, [&](std::ostream& os) { sze::write_reduced(os, r); });
      const auto cm = sze::compression_metrics(g.size(), r.k);
      std::cout << "k " << r.k << " edges " << r.edge_count() << " node_ratio " << sze::format_real(cm.node_ratio)
                << " storage_ratio " << sze::format_real(cm.storage_ratio) << '\n';
      return exit_ok;
    }

    if (*expand_cmd) {
      const auto r = sze::load_reduced(expand_in);
      sze::ExpansionSpec spec;
      spec.m = expand_m ? expand_m : r.m;
      spec.mode = parse_mode(mode);
      spec.scope = parse_scope(scope);
      spec.seed = globals.seed;
      spec.fill_intra = fill_intra;
      const sze::Graph g = sze::expand(r, spec);
      const fs::path out = output_path(globals, expand_out, "reconstruction.edges");
      write_file(out, [&](std::ostream& os) { sze::write_graph(os, g, sze::format_for_path(out)); });
      std::cout << "n " << g.size() << " edges " << g.edge_count() << '\n';
      return exit_ok;
    }

    if (*metrics) {
      const sze::Graph g = sze::load_graph(metrics_in);
      sampling.seed = globals.seed;
      const auto report = sze::rel_dev_aggregate(g, sampling);
      const fs::path out = output_path(globals, metrics_out, "metrics.json");
      write_file(out, [&](std::ostream& os) { os << report.to_json(); });
      std::cout << report.to_json();
      return exit_ok;
    }

    if (*experiment) {
      if (levels == 0) throw sze::PreconditionError("--levels must be positive");
      sze::ExperimentConfig config;
      config.gt = gt_spec;
      config.levels.clear();
      for (std::size_t i = 0; i < levels; ++i) config.levels.push_back(static_cast<double>(i) / static_cast<double>(levels));
      config.seeds = seeds;
      config.base_seed = globals.seed;
      config.completion_weight = completion;
      config.sze.partition = experiment_partition.config(globals);
      config.sze.d_threshold = experiment_threshold;
      const auto rows = sze::run_experiment(which, config);
      const fs::path out = output_path(globals, experiment_out, "experiment" + std::to_string(which) + ".csv");
      write_file(out, [&](std::ostream& os) { sze::write_experiment_csv(os, rows); });
      std::cout << "wrote " << rows.size() << " rows to " << out.string() << '\n';
      return exit_ok;
    }

    if (*pipeline) {
      if (points_path.empty() && graph_path.empty()) throw sze::PreconditionError("pipeline needs --points or --graph");
      pipeline_config.densify_weight = parse_densify(densify);
      pipeline_config.sze.partition = pipeline_partition.config(globals);
      pipeline_config.sze.sampling.seed = globals.seed;
      sze::PipelineOutcome outcome;
      if (!points_path.empty()) {
        outcome = sze::pipeline_run(sze::load_points_csv(points_path, labeled), pipeline_config, globals.out_dir);
      } else {
        if (pipeline_config.densify_weight) {
          throw sze::PreconditionError("--densify on a graph input needs point data for the clustering");
        }
        outcome = sze::pipeline_run(sze::load_graph(graph_path), std::nullopt, pipeline_config, globals.out_dir);
      }
      std::cout << sze::PipelineSummary::csv_header() << '\n' << outcome.summary.to_csv_row() << '\n';
      return outcome.summary.converged ? exit_ok : exit_not_converged;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_error;
  }
  return exit_ok;
}
