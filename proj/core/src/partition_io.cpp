#include "sze/partition_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "sze/error.hpp"

namespace sze {
namespace {

VertexSet parse_members(const std::string& text, std::size_t line) {
  std::istringstream row(text);
  std::vector<Vertex> members;
  long long v = 0;
  while (row >> v) {
    if (v < 0) throw ParseError("negative vertex index", line);
    members.push_back(static_cast<Vertex>(v));
  }
  if (!row.eof()) throw ParseError("expected vertex indices", line);
  try {
    return VertexSet(std::move(members));
  } catch (const PreconditionError&) {
    throw ParseError("duplicate vertex in class", line);
  }
}

}  // namespace

EquitablePartition read_partition(std::istream& in) {
  std::string text;
  std::size_t line = 1;
  if (!std::getline(in, text)) throw ParseError("missing `n k c` header", line);
  std::istringstream header(text);
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t c = 0;
  if (!(header >> n >> k >> c)) throw ParseError("malformed `n k c` header", line);

  EquitablePartition p;
  p.n = n;
  for (std::size_t j = 0; j < k; ++j) {
    ++line;
    if (!std::getline(in, text)) throw ParseError("missing class line", line);
    p.classes.push_back(parse_members(text, line));
    if (p.classes.back().size() != c) throw ParseError("class size differs from header", line);
  }
  ++line;
  if (std::getline(in, text)) p.exceptional = parse_members(text, line);
  try {
    p.validate();
  } catch (const PreconditionError& e) {
    throw ParseError(e.what(), 0);
  }
  return p;
}

void write_partition(std::ostream& out, const EquitablePartition& p) {
  out << p.n << ' ' << p.class_count() << ' ' << p.class_size() << '\n';
  auto row = [&](const VertexSet& set) {
    bool first = true;
    for (Vertex v : set) {
      out << (first ? "" : " ") << v;
      first = false;
    }
    out << '\n';
  };
  for (const auto& cls : p.classes) row(cls);
  row(p.exceptional);
}

EquitablePartition load_partition(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_partition(in);
}

void save_partition(const EquitablePartition& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_partition(out, p);
}

void write_trace(std::ostream& out, std::span<const IterationRecord> trace) {
  out << "iteration,k,irregular_count,c0_size\n";
  for (const auto& r : trace) {
    out << r.iteration << ',' << r.k << ',' << r.irregular_count << ',' << r.c0_size << '\n';
  }
}

}  // namespace sze
