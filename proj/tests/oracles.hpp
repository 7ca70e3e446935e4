#pragma once

// Reference implementations used only by tests. None of them call into the
// library's kernels; they work from plain edge lists or dense matrices.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <list>
#include <random>
#include <utility>
#include <vector>

#include "graphcage/access_trace.hpp"

namespace oracle {

struct E {
  std::uint32_t u, v;
  double w = 1.0;
};

// Edges of a graph, read back through the public CSR accessors only.
template <typename G>
std::vector<E> edges_of(const G& g) {
  std::vector<E> out;
  auto ro = g.row_offsets();
  auto ci = g.col_indices();
  for (std::size_t u = 0; u + 1 < ro.size(); ++u)
    for (auto e = ro[u]; e < ro[u + 1]; ++e)
      out.push_back({static_cast<std::uint32_t>(u), ci[e], g.weighted() ? g.edge_weights()[e] : 1.0});
  return out;
}

inline std::vector<std::vector<std::uint32_t>> adjacency(std::size_t n, const std::vector<E>& edges) {
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const E& e : edges) adj[e.u].push_back(e.v);
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

struct PrOut {
  std::vector<double> ranks;
  std::size_t iterations = 0;
};

// Straight edge-list PageRank: dangling vertices contribute nothing.
inline PrOut pagerank(std::size_t n, const std::vector<E>& edges, double d, double tol, std::size_t max_iters,
                      bool fixed = false) {
  std::vector<double> deg(n, 0.0);
  for (const E& e : edges) deg[e.u] += 1.0;
  PrOut out;
  out.ranks.assign(n, 1.0 / static_cast<double>(n));
  while (out.iterations < max_iters) {
    std::vector<double> sums(n, 0.0);
    for (const E& e : edges) sums[e.v] += out.ranks[e.u] / deg[e.u];
    double l1 = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double r = (1.0 - d) / static_cast<double>(n) + d * sums[v];
      l1 += std::abs(r - out.ranks[v]);
      out.ranks[v] = r;
    }
    ++out.iterations;
    if (!fixed && l1 < tol) break;
  }
  return out;
}

// Dense y = A x with A[i][j] accumulated from (i, j, w) triples.
inline std::vector<double> dense_matvec(std::size_t n, const std::vector<E>& entries, const std::vector<double>& x) {
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const E& e : entries) a[e.u][e.v] += e.w;
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) y[i] += a[i][j] * x[j];
  return y;
}

inline constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();

inline std::vector<std::uint32_t> bfs(std::size_t n, const std::vector<E>& edges, std::uint32_t src) {
  auto adj = adjacency(n, edges);
  std::vector<std::uint32_t> dist(n, kInf);
  std::deque<std::uint32_t> q{src};
  dist[src] = 0;
  while (!q.empty()) {
    auto u = q.front();
    q.pop_front();
    for (auto v : adj[u])
      if (dist[v] == kInf) dist[v] = dist[u] + 1, q.push_back(v);
  }
  return dist;
}

/**
 * All-pairs shortest-path counts on small graphs. dist from Floyd-Warshall;
 * sigma[s][t] counts shortest s->t walks edge by edge (parallel edges count
 * separately), built in order of increasing distance.
 */
struct AllPairs {
  std::size_t n;
  std::vector<std::vector<std::uint32_t>> dist;
  std::vector<std::vector<double>> sigma;
};

inline AllPairs all_pairs(std::size_t n, const std::vector<E>& edges) {
  AllPairs ap{n, std::vector<std::vector<std::uint32_t>>(n, std::vector<std::uint32_t>(n, kInf)),
              std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0))};
  for (std::size_t i = 0; i < n; ++i) ap.dist[i][i] = 0;
  for (const E& e : edges)
    if (e.u != e.v) ap.dist[e.u][e.v] = 1;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (ap.dist[i][m] != kInf && ap.dist[m][j] != kInf && ap.dist[i][m] + ap.dist[m][j] < ap.dist[i][j])
          ap.dist[i][j] = ap.dist[i][m] + ap.dist[m][j];
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ap.dist[s][a] < ap.dist[s][b]; });
    ap.sigma[s][s] = 1.0;
    for (std::size_t t : order) {
      if (t == s || ap.dist[s][t] == kInf) continue;
      double c = 0.0;
      for (const E& e : edges)
        if (e.v == t && ap.dist[s][e.u] != kInf && ap.dist[s][e.u] + 1 == ap.dist[s][t]) c += ap.sigma[s][e.u];
      ap.sigma[s][t] = c;
    }
  }
  return ap;
}

// Pair-dependency definition of betweenness over the given sources.
inline std::vector<double> betweenness(const AllPairs& ap, const std::vector<std::uint32_t>& sources) {
  std::vector<double> c(ap.n, 0.0);
  for (auto s : sources)
    for (std::size_t t = 0; t < ap.n; ++t) {
      if (t == s || ap.dist[s][t] == kInf) continue;
      for (std::size_t v = 0; v < ap.n; ++v) {
        if (v == s || v == t) continue;
        if (ap.dist[s][v] == kInf || ap.dist[v][t] == kInf) continue;
        if (ap.dist[s][v] + ap.dist[v][t] != ap.dist[s][t]) continue;
        c[v] += ap.sigma[s][v] * ap.sigma[v][t] / ap.sigma[s][t];
      }
    }
  return c;
}

/// Fully explicit LRU: one recency list per set, most recent at the front.
class ListLru {
 public:
  ListLru(std::uint64_t capacity, std::uint64_t line, std::uint64_t assoc)
      : line_(line), assoc_(assoc), sets_(capacity / line / assoc), lists_(sets_) {}

  bool access(std::uint64_t addr) {
    std::uint64_t ln = addr / line_;
    auto& l = lists_[ln % sets_];
    for (auto it = l.begin(); it != l.end(); ++it)
      if (*it == ln) {
        l.erase(it);
        l.push_front(ln);
        return true;
      }
    l.push_front(ln);
    if (l.size() > assoc_) l.pop_back();
    return false;
  }

 private:
  std::uint64_t line_, assoc_, sets_;
  std::vector<std::list<std::uint64_t>> lists_;
};

}  // namespace oracle
