#include <gtest/gtest.h>

#include <random>

#include "graphcage/generate.hpp"
#include "graphcage/traversal.hpp"
#include "oracles.hpp"

using namespace graphcage;

namespace {

const DirectionPolicy kPush{DirectionMode::force_push};
const DirectionPolicy kPull{DirectionMode::force_pull};

std::vector<std::uint32_t> as_u32(const std::vector<level_t>& d) { return {d.begin(), d.end()}; }

CsrGraph diamond() {
  std::vector<Edge> es{{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  return CsrGraph::from_edges(4, es, false);
}

// Textbook status-array pull BFS step on the unblocked transpose.
void textbook_pull_step(const CsrGraph& gt, std::vector<level_t>& depth, std::vector<double>& sigma, level_t level) {
  std::vector<std::pair<vertex_id, double>> found;
  for (vertex_id v = 0; v < gt.num_vertices(); ++v) {
    if (depth[v] != kUnvisited) continue;
    double s = 0.0;
    bool hit = false;
    for (vertex_id u : gt.neighbors(v))
      if (depth[u] == level) hit = true, s += sigma[u];
    if (hit) found.emplace_back(v, s);
  }
  for (auto [v, s] : found) depth[v] = level + 1, sigma[v] = s;
}

}  // namespace

TEST(Bfs, StarPathDiamond) {
  for (const auto& pol : {kPush, kPull}) {
    auto star = make_star(5);
    auto sbg = partition_tocab(transpose(star), Direction::pull, 2);
    auto d = bfs(star, &sbg, 0, pol);
    EXPECT_EQ(d, (std::vector<level_t>{0, 1, 1, 1, 1}));

    auto path = make_path(5);
    auto pbg = partition_tocab(transpose(path), Direction::pull, 2);
    EXPECT_EQ(bfs(path, &pbg, 0, pol), (std::vector<level_t>{0, 1, 2, 3, 4}));
    auto from2 = bfs(path, &pbg, 2, pol);
    EXPECT_EQ(from2[0], kUnvisited);
    EXPECT_EQ(from2[4], 2u);
  }
  auto g = diamond();
  auto bg = partition_tocab(transpose(g), Direction::pull, 2);
  for (const auto& pol : {kPush, kPull}) {
    TraversalState st(4, 0);
    forward_traverse(g, &bg, st, pol);
    EXPECT_EQ(st.depth, (std::vector<level_t>{0, 1, 1, 2}));
    EXPECT_EQ(st.sigma, (std::vector<double>{1, 1, 1, 2}));
  }
}

TEST(Bfs, MatchesSerialOracle) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto g = make_rmat(10, 4, seed);
    auto bg = partition_tocab(transpose(g), Direction::pull, 64);
    auto src = static_cast<vertex_id>(seed * 37 % g.num_vertices());
    auto ref = oracle::bfs(g.num_vertices(), oracle::edges_of(g), src);
    EXPECT_EQ(as_u32(bfs(g, nullptr, src, kPush)), ref);
    EXPECT_EQ(as_u32(bfs(g, &bg, src, kPull)), ref);
    EXPECT_EQ(as_u32(bfs(g, &bg, src, {DirectionMode::automatic, 64})), ref);
    ExecutionPolicy par{4, ChunkedRows{8}, false};
    EXPECT_EQ(as_u32(bfs(g, &bg, src, kPush, 16, par)), ref);
    EXPECT_EQ(as_u32(bfs(g, &bg, src, kPull, 16, par)), ref);
  }
}

TEST(BlockedPullStep, MatchesTextbookPull) {
  auto g = make_rmat(9, 8, 5);
  auto gt = transpose(g);
  for (count_t w : {1u, 8u, 100u, 1024u}) {
    auto bg = partition_tocab(gt, Direction::pull, w);
    TraversalState st(g.num_vertices(), 0);
    std::vector<level_t> depth = st.depth;
    std::vector<double> sigma = st.sigma;
    for (int lvl = 0; lvl < 6 && !st.queue.empty(); ++lvl) {
      textbook_pull_step(gt, depth, sigma, st.level);
      for (vertex_id v : st.queue) st.front[v] = 1;
      bc_forward_pull_blocked_step(bg, st, 7);
      for (vertex_id v : st.queue) st.front[v] = 0;
      st.queue.clear();
      for (vertex_id v = 0; v < g.num_vertices(); ++v)
        if (st.next[v]) st.queue.push_back(v), st.next[v] = 0;
      EXPECT_EQ(st.depth, depth) << w << " level " << lvl;
      EXPECT_EQ(st.sigma, sigma) << w << " level " << lvl;
    }
  }
}

TEST(BlockedPullStep, RejectsWrongBlocking) {
  auto g = make_path(4);
  TraversalState st(4, 0);
  EXPECT_THROW(bc_forward_pull_blocked_step(partition_tocab(g, Direction::push, 2), st), std::invalid_argument);
  EXPECT_THROW(bc_forward_pull_blocked_step(partition_cb(transpose(g), 2), st), std::invalid_argument);
  EXPECT_THROW(TraversalState(4, 4), std::invalid_argument);
  EXPECT_THROW(bfs(g, nullptr, 0, kPull), std::invalid_argument);
}

TEST(ChooseDirection, ThresholdRule) {
  auto star = make_star(9);  // vertex 0 has out-degree 8
  std::vector<vertex_id> hub{0}, leaf{1};
  DirectionPolicy p{DirectionMode::automatic, 32, 4};
  EXPECT_EQ(choose_direction(hub, p, star), StepDirection::push);  // 32 is not > 32
  p.cache_capacity_bytes = 31;
  EXPECT_EQ(choose_direction(hub, p, star), StepDirection::blocked_pull);
  EXPECT_EQ(choose_direction(leaf, p, star), StepDirection::push);
  EXPECT_EQ(choose_direction(leaf, kPull, star), StepDirection::blocked_pull);
  EXPECT_EQ(choose_direction(hub, kPush, star), StepDirection::push);
}

TEST(Betweenness, PathAndStar) {
  auto path = make_path(3);
  auto sources = sample_sources(3, 3, 1);
  auto r = betweenness(path, nullptr, sources, kPush);
  EXPECT_EQ(r.centrality, (std::vector<double>{0.0, 1.0, 0.0}));
  auto sym_path = symmetrize(path);
  auto rs = betweenness(sym_path, nullptr, sources, kPush);
  EXPECT_DOUBLE_EQ(rs.centrality[1], 2.0);

  auto star = symmetrize(make_star(5));
  auto bg = partition_tocab(transpose(star), Direction::pull, 2);
  auto all = sample_sources(5, 5, 1);
  for (const auto& pol : {kPush, kPull}) {
    auto c = betweenness(star, &bg, all, pol).centrality;
    EXPECT_DOUBLE_EQ(c[0], 12.0);
    for (int i = 1; i < 5; ++i) EXPECT_DOUBLE_EQ(c[i], 0.0);
  }
}

TEST(Betweenness, BruteForceSmallGraphs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    unsigned scale = 3 + trial % 4;
    auto g = make_rmat(scale, 2 + rng() % 4, rng());
    if (trial % 2) g = symmetrize(g);
    auto ap = oracle::all_pairs(g.num_vertices(), oracle::edges_of(g));
    auto sources = sample_sources(g.num_vertices(), g.num_vertices(), 0);
    std::vector<std::uint32_t> src32(sources.begin(), sources.end());
    auto ref = oracle::betweenness(ap, src32);
    auto bg = partition_tocab(transpose(g), Direction::pull, 4);
    for (const auto& pol : {kPush, kPull, DirectionPolicy{DirectionMode::automatic, 8}}) {
      auto got = betweenness(g, &bg, sources, pol);
      for (std::size_t v = 0; v < ref.size(); ++v) EXPECT_NEAR(got.centrality[v], ref[v], 1e-9) << trial << ' ' << v;
      EXPECT_LE(got.max_enqueues_per_level, 1u);
    }
    // σ agrees with the counted shortest paths.
    for (vertex_id s : sources) {
      TraversalState st(g.num_vertices(), s);
      forward_traverse(g, &bg, st, kPull, 3);
      for (std::size_t t = 0; t < g.num_vertices(); ++t) {
        EXPECT_EQ(st.depth[t] == kUnvisited ? oracle::kInf : st.depth[t], ap.dist[s][t]);
        EXPECT_EQ(st.sigma[t], ap.sigma[s][t]);
      }
    }
  }
}

TEST(Hybrid, InvariantToDirectionChoice) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto g = symmetrize(make_rmat(9, 8, seed));
    auto bg = partition_tocab(transpose(g), Direction::pull, 32);
    auto sources = sample_sources(g.num_vertices(), 8, seed);
    auto push = betweenness(g, &bg, sources, kPush);
    auto pull = betweenness(g, &bg, sources, kPull);
    DirectionPolicy mixed{DirectionMode::automatic, 200};
    auto hyb = betweenness(g, &bg, sources, mixed);
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
      EXPECT_NEAR(pull.centrality[v], push.centrality[v], 1e-9);
      EXPECT_NEAR(hyb.centrality[v], push.centrality[v], 1e-9);
    }
    EXPECT_LE(hyb.max_enqueues_per_level, 1u);

    // Start from a low-degree vertex with the threshold just above it: the
    // first step pushes, the wider middle levels pull.
    vertex_id low = 0;
    for (vertex_id v = 0; v < g.num_vertices(); ++v)
      if (g.out_degree(v) > 0 && (g.out_degree(low) == 0 || g.out_degree(v) < g.out_degree(low))) low = v;
    DirectionPolicy switching{DirectionMode::automatic, 4 * g.out_degree(low)};
    TraversalState st(g.num_vertices(), low);
    forward_traverse(g, &bg, st, switching);
    bool saw_push = false, saw_pull = false;
    for (auto d : st.directions) (d == StepDirection::push ? saw_push : saw_pull) = true;
    EXPECT_TRUE(saw_push);
    EXPECT_TRUE(saw_pull);
  }
}

TEST(Hybrid, ParallelPushClaimsOnce) {
  auto g = symmetrize(make_rmat(11, 16, 2));
  auto bg = partition_tocab(transpose(g), Direction::pull, 128);
  ExecutionPolicy par{4, ChunkedRows{4}, false};
  auto sources = sample_sources(g.num_vertices(), 4, 3);
  auto serial = betweenness(g, &bg, sources, kPush);
  auto parallel = betweenness(g, &bg, sources, kPush, 64, par);
  EXPECT_LE(parallel.max_enqueues_per_level, 1u);
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    EXPECT_NEAR(parallel.centrality[v], serial.centrality[v], 1e-9 * std::max(1.0, serial.centrality[v]));
}

TEST(SampleSources, DeterministicAndSorted) {
  auto a = sample_sources(1000, 10, 5), b = sample_sources(1000, 10, 5);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
  EXPECT_EQ(sample_sources(3, 10, 1).size(), 3u);
}
