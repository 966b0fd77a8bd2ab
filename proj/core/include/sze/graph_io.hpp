#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "sze/graph.hpp"

namespace sze {

enum class GraphFormat {
  /// `i j w` lines, 0-indexed; optional `# vertices n` header.
  edge_list,
  /// First line n, then n rows of n weights.
  dense,
};

/// `.dense` and `.mat` select the dense format; anything else is an edge list.
GraphFormat format_for_path(const std::filesystem::path& path);

/// Throws ParseError (with a line number) on malformed, asymmetric or
/// self-looped input.
Graph read_graph(std::istream& in, GraphFormat format);
void write_graph(std::ostream& out, const Graph& g, GraphFormat format);

Graph load_graph(const std::filesystem::path& path, GraphFormat format);
Graph load_graph(const std::filesystem::path& path);
void save_graph(const Graph& g, const std::filesystem::path& path, GraphFormat format);
void save_graph(const Graph& g, const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

}  // namespace sze
