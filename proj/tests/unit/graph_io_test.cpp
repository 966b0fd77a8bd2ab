#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "oracles.hpp"
#include "sze/error.hpp"
#include "sze/graph_io.hpp"

namespace sze {
namespace {

Graph read_text(const std::string& text, GraphFormat format = GraphFormat::edge_list) {
  std::istringstream in(text);
  return read_graph(in, format);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    read_text(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no ParseError for: " << text;
  return 0;
}

TEST(GraphIoTest, EdgeListBothDirections) {
  const Graph g = read_text("0 1 1.0\n1 0 1.0\n");
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.weight(0, 1), 1.0);
  EXPECT_EQ(g.weight(1, 0), 1.0);
}

TEST(GraphIoTest, EdgeListDefaultsAndHeader) {
  const Graph g = read_text("# vertices 5\n0 1\n\n2 3 0.25\n");
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.weight(0, 1), 1.0);
  EXPECT_EQ(g.weight(3, 2), 0.25);
  EXPECT_EQ(g.degree(4), 0.0);
}

TEST(GraphIoTest, RejectsBadInput) {
  EXPECT_EQ(parse_error_line("0 1 1.0\n0 0 1.0\n"), 2u);
  EXPECT_EQ(parse_error_line("0 1 1.0\n1 0 0.5\n"), 2u);
  EXPECT_EQ(parse_error_line("0 1 x\n"), 1u);
  EXPECT_EQ(parse_error_line("0 1 1.5\n"), 1u);
  EXPECT_EQ(parse_error_line("# vertices 2\n0 1\n1 2\n"), 3u);
  EXPECT_THROW(read_text("2\n0 1\n0 0\n", GraphFormat::dense), ParseError);
  EXPECT_THROW(read_text("2\n0 1\n1 0 3\n", GraphFormat::dense), ParseError);
}

TEST(GraphIoTest, RoundTripIsExact) {
  Rng rng(3);
  const Graph g = oracle::random_graph(23, 0.5, true, rng, 1e-7);
  for (GraphFormat format : {GraphFormat::edge_list, GraphFormat::dense}) {
    std::stringstream buffer;
    write_graph(buffer, g, format);
    EXPECT_EQ(read_graph(buffer, format), g);
  }
}

TEST(GraphIoTest, FileRoundTripKeepsIsolatedVertices) {
  Graph g(4);
  g.set_weight(0, 1, 1.0 / 3.0);
  const auto dir = std::filesystem::temp_directory_path() / "sze_graph_io_test";
  std::filesystem::create_directories(dir);
  for (const char* name : {"k.edges", "k.dense"}) {
    save_graph(g, dir / name);
    EXPECT_EQ(load_graph(dir / name), g) << name;
  }
  EXPECT_EQ(format_for_path("a.mat"), GraphFormat::dense);
  EXPECT_EQ(format_for_path("a.txt"), GraphFormat::edge_list);
  std::filesystem::remove_all(dir);
}

TEST(GraphIoTest, FormatRealIsShortestExact) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(1.0), "1");
  const double third = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_real(third)), third);
}

}  // namespace
}  // namespace sze
