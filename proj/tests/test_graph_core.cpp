#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "graphcage/csr_graph.hpp"
#include "graphcage/generate.hpp"
#include "graphcage/io.hpp"
#include "oracles.hpp"

using namespace graphcage;

namespace {

CsrGraph parse(const std::string& text, EdgeListOptions opts = {}) {
  std::istringstream in(text);
  return read_edge_list(in, opts);
}

std::vector<count_t> v64(std::initializer_list<count_t> xs) { return xs; }

}  // namespace

TEST(EdgeList, BuildsCsr) {
  auto g = parse("0 1\n1 2\n");
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(std::vector<edge_index>(g.row_offsets().begin(), g.row_offsets().end()), v64({0, 1, 2, 2}));
  EXPECT_FALSE(g.weighted());
}

TEST(EdgeList, AutoDetectsOneBased) {
  EXPECT_EQ(parse("1 2\n2 3\n"), parse("0 1\n1 2\n"));
  EXPECT_EQ(parse("1 2\n2 3\n", {IdBase::one}), parse("0 1\n1 2\n"));
  EXPECT_THROW(parse("0 1\n", {IdBase::one}), parse_error);
}

TEST(EdgeList, KeepsDuplicates) {
  auto g = parse("0 1\n0 1\n");
  EXPECT_EQ(g.num_edges(), 2u);
  // Multiplicity matches a naive adjacency builder.
  auto adj = oracle::adjacency(2, {{0, 1}, {0, 1}});
  EXPECT_EQ(g.out_degree(0), adj[0].size());
}

TEST(EdgeList, CommentsWeightsAndSymmetrize) {
  auto g = parse("# header\n% another\n2 0 0.5\n0 1 1.5\n");
  ASSERT_TRUE(g.weighted());
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_DOUBLE_EQ(g.neighbor_weights(2)[0], 0.5);

  auto s = parse("0 1\n1 2\n2 2\n", {IdBase::zero, true});
  EXPECT_EQ(s.num_edges(), 5u);  // self loop kept once
  EXPECT_EQ(std::vector<vertex_id>(s.neighbors(1).begin(), s.neighbors(1).end()), (std::vector<vertex_id>{0, 2}));
}

TEST(EdgeList, ErrorsCarryLineNumbers) {
  try {
    parse("0 1\n1 x\n");
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("0 1 2 3\n"), parse_error);
  EXPECT_THROW(parse("0 4294967296\n"), capacity_error);
  EXPECT_THROW(parse("0 99999999999999999999999\n"), capacity_error);
}

TEST(EdgeList, NumVerticesOverride) {
  auto g = parse("0 1\n", {IdBase::zero, false, 5});
  EXPECT_EQ(g.num_vertices(), 5u);
  EXPECT_THROW(parse("0 4\n", {IdBase::zero, false, 3}), std::invalid_argument);
  EXPECT_THROW(load_edge_list("/nonexistent/file.el"), io_error);
}

TEST(EdgeList, WriteReloadRoundTrip) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto g = make_rmat(8, 4, seed);
    std::stringstream ss;
    write_edge_list(ss, g);
    auto back = read_edge_list(ss, {IdBase::zero, false, g.num_vertices()});
    EXPECT_EQ(back, g);
  }
  // Weighted graphs keep full precision.
  auto w = parse("0 1 0.1\n1 2 0.30000000000000004\n2 0 1e-300\n");
  std::stringstream ss;
  write_edge_list(ss, w);
  EXPECT_EQ(read_edge_list(ss, {IdBase::zero}), w);
}

TEST(MatrixMarket, PatternGeneral) {
  std::istringstream in("%%MatrixMarket matrix coordinate pattern general\n% c\n2 2 1\n1 2\n");
  auto g = read_matrix_market(in);
  EXPECT_EQ(g.num_vertices(), 2u);
  ASSERT_EQ(g.num_edges(), 1u);
  EXPECT_EQ(g.neighbors(0)[0], 1u);
  EXPECT_FALSE(g.weighted());
}

TEST(MatrixMarket, SymmetricExpands) {
  std::istringstream in("%%MatrixMarket matrix coordinate pattern symmetric\n2 2 2\n1 2\n2 2\n");
  auto g = read_matrix_market(in);
  EXPECT_EQ(g.num_edges(), 3u);  // (0,1), (1,0), diagonal once
  EXPECT_EQ(g.neighbors(1)[0], 0u);
}

TEST(MatrixMarket, RealEntries) {
  std::istringstream in("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 0.5\n");
  auto g = read_matrix_market(in);
  ASSERT_TRUE(g.weighted());
  EXPECT_DOUBLE_EQ(g.edge_weights()[0], 0.5);
}

TEST(MatrixMarket, Errors) {
  std::istringstream bad_banner("%%MatrixMarket matrix array real general\n2 2\n");
  EXPECT_THROW(read_matrix_market(bad_banner), parse_error);
  std::istringstream count("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n");
  EXPECT_THROW(read_matrix_market(count), parse_error);
  std::istringstream range("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n3 1\n");
  EXPECT_THROW(read_matrix_market(range), parse_error);
}

TEST(Transpose, PathAndInvolution) {
  auto p = make_path(3);
  auto t = transpose(p);
  EXPECT_EQ(t.num_edges(), 2u);
  EXPECT_EQ(t.neighbors(1)[0], 0u);
  EXPECT_EQ(t.neighbors(2)[0], 1u);
  EXPECT_EQ(t.out_degree(0), 0u);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto g = make_rmat(9, 8, seed);
    EXPECT_EQ(transpose(transpose(g)), g);
  }
  auto w = parse("0 1 0.5\n0 1 0.25\n1 0 2\n");
  EXPECT_EQ(transpose(transpose(w)), w);
}

TEST(Transpose, InDegreesMatchOutDegreeHistogram) {
  auto g = make_rmat(10, 8, 7);
  auto t = transpose(g);
  // Independent in-degree count straight from the edge list.
  std::vector<count_t> indeg(g.num_vertices(), 0);
  for (const auto& e : oracle::edges_of(g)) ++indeg[e.v];
  EXPECT_EQ(t.out_degrees(), indeg);
  EXPECT_EQ(t.num_edges(), g.num_edges());
}

TEST(Generate, SmallShapes) {
  auto s = make_star(5);
  EXPECT_EQ(s.num_edges(), 4u);
  EXPECT_EQ(s.out_degree(0), 4u);
  EXPECT_EQ(std::vector<vertex_id>(s.neighbors(0).begin(), s.neighbors(0).end()),
            (std::vector<vertex_id>{1, 2, 3, 4}));

  auto c = make_cycle(3);
  EXPECT_EQ(c.neighbors(0)[0], 1u);
  EXPECT_EQ(c.neighbors(1)[0], 2u);
  EXPECT_EQ(c.neighbors(2)[0], 0u);

  EXPECT_EQ(make_complete(4).num_edges(), 12u);
}

TEST(Generate, RmatIsDeterministic) {
  auto a = make_rmat(4, 2, 1), b = make_rmat(4, 2, 1);
  EXPECT_EQ(a, b);
  std::stringstream sa, sb;
  write_edge_list(sa, a);
  write_edge_list(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.num_vertices(), 16u);
  EXPECT_EQ(a.num_edges(), 32u);
  EXPECT_NE(make_rmat(8, 4, 1), make_rmat(8, 4, 2));
  EXPECT_THROW(make_rmat(32, 1, 1), capacity_error);
}

TEST(Generate, RmatIsSkewed) {
  // Quadrant a = 0.57 favours low ids: vertex 0 should far exceed the mean.
  auto g = make_rmat(12, 8, 3);
  EXPECT_GT(g.out_degree(0), 8u * 10u);
}

TEST(CsrGraph, InvariantsHoldForGeneratedGraphs) {
  for (auto g : {make_rmat(10, 16, 1), make_path(50), make_cycle(7), make_star(9), make_complete(5), CsrGraph{}}) {
    EXPECT_FALSE(g.validate().has_value());
    auto deg = g.out_degrees();
    count_t sum = 0;
    for (auto d : deg) sum += d;
    EXPECT_EQ(sum, g.num_edges());
  }
  EXPECT_THROW(CsrGraph::from_arrays({0, 2, 1}, {0, 1}), std::invalid_argument);
  EXPECT_THROW(CsrGraph::from_arrays({0, 1}, {5}), std::invalid_argument);
  // Unsorted rows are canonicalized.
  auto g = CsrGraph::from_arrays({0, 3}, {0, 0, 0});
  EXPECT_EQ(g.num_edges(), 3u);
  auto h = CsrGraph::from_arrays({0, 2, 2}, {1, 0});
  EXPECT_EQ(h.neighbors(0)[0], 0u);
}
