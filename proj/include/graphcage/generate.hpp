#pragma once

#include <random>
#include <string>
#include <vector>

#include "graphcage/csr_graph.hpp"

namespace graphcage {

enum class GenKind { rmat, path, cycle, star, complete };

struct GraphGenSpec {
  GenKind kind = GenKind::rmat;
  // rmat: log2 of the vertex count. Other kinds use `size` as |V|.
  unsigned scale = 10;
  count_t size = 0;
  count_t edge_factor = 16;
  std::uint64_t seed = 1;
};

// Fixed R-MAT quadrant probabilities (a, b, c); d = 1 - a - b - c.
inline constexpr double kRmatA = 0.57, kRmatB = 0.19, kRmatC = 0.19;

namespace detail {
// 53-bit uniform in [0,1). std::uniform_real_distribution is not portable
// across standard libraries, this is.
inline double unit_real(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
}  // namespace detail

/// Deterministic generator: the same spec always yields the same graph.
inline CsrGraph generate(const GraphGenSpec& spec) {
  std::vector<Edge> edges;
  count_t n = spec.size;
  switch (spec.kind) {
    case GenKind::rmat: {
      if (spec.scale > 31) throw capacity_error("rmat scale " + std::to_string(spec.scale) + " exceeds 32-bit ids");
      n = count_t{1} << spec.scale;
      const count_t m = spec.edge_factor * n;
      edges.reserve(m);
      std::mt19937_64 rng(spec.seed);
      for (count_t i = 0; i < m; ++i) {
        vertex_id u = 0, v = 0;
        for (unsigned bit = 0; bit < spec.scale; ++bit) {
          double r = detail::unit_real(rng);
          u <<= 1, v <<= 1;
          if (r < kRmatA) {
          } else if (r < kRmatA + kRmatB) {
            v |= 1;
          } else if (r < kRmatA + kRmatB + kRmatC) {
            u |= 1;
          } else {
            u |= 1, v |= 1;
          }
        }
        edges.push_back({u, v});
      }
      break;
    }
    case GenKind::path:
      for (count_t v = 0; v + 1 < n; ++v) edges.push_back({vertex_id(v), vertex_id(v + 1)});
      break;
    case GenKind::cycle:
      for (count_t v = 0; v < n && n > 1; ++v) edges.push_back({vertex_id(v), vertex_id((v + 1) % n)});
      break;
    case GenKind::star:
      for (count_t v = 1; v < n; ++v) edges.push_back({0, vertex_id(v)});
      break;
    case GenKind::complete:
      for (count_t u = 0; u < n; ++u)
        for (count_t v = 0; v < n; ++v)
          if (u != v) edges.push_back({vertex_id(u), vertex_id(v)});
      break;
  }
  if (n > count_t{kMaxVertexId} + 1) throw capacity_error("graph size exceeds 32-bit ids");
  return CsrGraph::from_edges(n, edges, false);
}

inline CsrGraph make_rmat(unsigned scale, count_t edge_factor, std::uint64_t seed) {
  return generate({GenKind::rmat, scale, 0, edge_factor, seed});
}
inline CsrGraph make_path(count_t n) { return generate({GenKind::path, 0, n, 0, 0}); }
inline CsrGraph make_cycle(count_t n) { return generate({GenKind::cycle, 0, n, 0, 0}); }
inline CsrGraph make_star(count_t n) { return generate({GenKind::star, 0, n, 0, 0}); }
inline CsrGraph make_complete(count_t n) { return generate({GenKind::complete, 0, n, 0, 0}); }

}  // namespace graphcage
