#include "sze/graph_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <system_error>
#include <vector>

#include "sze/error.hpp"

namespace sze {
namespace {

bool is_blank_or_comment(const std::string& line) {
  for (char ch : line) {
    if (ch == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> fields;
  for (std::string field; in >> field;) fields.push_back(field);
  return fields;
}

std::size_t parse_index(const std::string& text, std::size_t line_no) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("expected a vertex index, got '" + text + "'", line_no);
  }
  return value;
}

double parse_weight(const std::string& text, std::size_t line_no) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw ParseError("expected a weight, got '" + text + "'", line_no);
  }
  if (consumed != text.size() || !std::isfinite(value)) {
    throw ParseError("expected a weight, got '" + text + "'", line_no);
  }
  if (value < 0.0 || value > 1.0) throw ParseError("weight outside [0, 1]", line_no);
  return value;
}

std::optional<std::size_t> vertex_header(const std::string& line) {
  const auto fields = split_fields(line);
  if (fields.size() == 3 && fields[0] == "#" && fields[1] == "vertices") {
    return parse_index(fields[2], 0);
  }
  return std::nullopt;
}

Graph read_edge_list(std::istream& in) {
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, std::size_t>> entries;
  std::optional<std::size_t> declared;
  std::size_t bound = 0;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (is_blank_or_comment(line)) {
      if (auto n = vertex_header(line)) declared = n;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 2 && fields.size() != 3) {
      throw ParseError("expected 'i j [w]'", line_no);
    }
    const auto i = parse_index(fields[0], line_no);
    const auto j = parse_index(fields[1], line_no);
    const double w = fields.size() == 3 ? parse_weight(fields[2], line_no) : 1.0;
    if (i == j) throw ParseError("self-loop at vertex " + std::to_string(i), line_no);
    if (declared && std::max(i, j) >= *declared) {
      throw ParseError("vertex index exceeds declared vertex count", line_no);
    }
    const auto key = std::minmax(i, j);
    auto [it, inserted] = entries.try_emplace({key.first, key.second}, w, line_no);
    if (!inserted && it->second.first != w) {
      throw ParseError("asymmetric weight for pair (" + std::to_string(key.first) + ", " +
                           std::to_string(key.second) + "), first seen on line " +
                           std::to_string(it->second.second),
                       line_no);
    }
    bound = std::max(bound, key.second + 1);
  }
  const std::size_t n = declared.value_or(bound);
  if (bound > n) throw ParseError("vertex index exceeds declared vertex count", 0);
  Graph g(n);
  for (const auto& [pair, value] : entries) g.set_weight(pair.first, pair.second, value.first);
  return g;
}

Graph read_dense(std::istream& in) {
  std::size_t line_no = 0;
  std::optional<std::size_t> n;
  Eigen::MatrixXd w;
  std::size_t row = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto fields = split_fields(line);
    if (!n) {
      if (fields.size() != 1) throw ParseError("expected the vertex count", line_no);
      n = parse_index(fields[0], line_no);
      w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(*n), static_cast<Eigen::Index>(*n));
      continue;
    }
    if (row >= *n) throw ParseError("more rows than the declared vertex count", line_no);
    if (fields.size() != *n) {
      throw ParseError("expected " + std::to_string(*n) + " weights, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (std::size_t col = 0; col < *n; ++col) {
      const double value = parse_weight(fields[col], line_no);
      if (col == row && value != 0.0) {
        throw ParseError("self-loop at vertex " + std::to_string(row), line_no);
      }
      if (col < row && value != w(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(row))) {
        throw ParseError("asymmetric weight at (" + std::to_string(row) + ", " +
                             std::to_string(col) + ")",
                         line_no);
      }
      w(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = value;
    }
    ++row;
  }
  if (!n) throw ParseError("missing vertex count", 0);
  if (row != *n) throw ParseError("expected " + std::to_string(*n) + " rows", line_no);
  return Graph(std::move(w));
}

}  // namespace

std::string format_real(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

GraphFormat format_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return ext == ".dense" || ext == ".mat" ? GraphFormat::dense : GraphFormat::edge_list;
}

Graph read_graph(std::istream& in, GraphFormat format) {
  return format == GraphFormat::dense ? read_dense(in) : read_edge_list(in);
}

void write_graph(std::ostream& out, const Graph& g, GraphFormat format) {
  const std::size_t n = g.size();
  if (format == GraphFormat::dense) {
    out << n << '\n';
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j > 0) out << ' ';
        out << format_real(g.weight(i, j));
      }
      out << '\n';
    }
    return;
  }
  out << "# vertices " << n << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = g.weight(i, j);
      if (w != 0.0) out << i << ' ' << j << ' ' << format_real(w) << '\n';
    }
  }
}

Graph load_graph(const std::filesystem::path& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file " + path.string());
  return read_graph(in, format);
}

Graph load_graph(const std::filesystem::path& path) { return load_graph(path, format_for_path(path)); }

void save_graph(const Graph& g, const std::filesystem::path& path, GraphFormat format) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write graph file " + path.string());
  write_graph(out, g, format);
  if (!out) throw Error("failed writing graph file " + path.string());
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  save_graph(g, path, format_for_path(path));
}

}  // namespace sze
