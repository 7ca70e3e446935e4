#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "graphcage/kernels.hpp"

namespace graphcage {

struct PrParams {
  double damping = 0.85;
  double tolerance = 1e-4;  // on the L1 norm of the rank change
  count_t max_iters = 100;
  // Ignore the tolerance and run exactly max_iters iterations (tracing).
  bool fixed_iterations = false;

  void validate() const {
    if (!(damping > 0.0 && damping < 1.0)) throw std::invalid_argument("damping must lie in (0,1)");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  }
};

struct PrResult {
  std::vector<double> ranks;
  count_t iterations = 0;
  bool converged = false;
};

// contributions[u] = rank[u] / out_degree[u]; dangling vertices contribute 0.
template <typename Tracer = NullTracer>
void compute_contributions(std::span<const double> ranks, std::span<const count_t> out_degrees,
                           std::span<double> contributions, Tracer&& tr = Tracer{}) {
  if (ranks.size() != out_degrees.size() || contributions.size() != ranks.size())
    throw std::invalid_argument("array lengths differ");
  for (std::size_t u = 0; u < ranks.size(); ++u) {
    if constexpr (std::remove_cvref_t<Tracer>::enabled) tr(StreamClass::contributions, AccessKind::write, u);
    contributions[u] = out_degrees[u] ? ranks[u] / static_cast<double>(out_degrees[u]) : 0.0;
  }
}

inline std::vector<double> compute_contributions(std::span<const double> ranks, std::span<const count_t> out_degrees) {
  std::vector<double> c(ranks.size());
  compute_contributions(ranks, out_degrees, std::span<double>(c));
  return c;
}

namespace detail {

// Shared iteration skeleton: contributions, propagation, rank update. The
// propagation step fills `sums` from `contributions`.
template <typename Propagate, typename Tracer>
PrResult pagerank_loop(std::span<const count_t> out_degrees, const PrParams& params, Propagate&& propagate,
                       Tracer&& tr) {
  constexpr bool traced = std::remove_cvref_t<Tracer>::enabled;
  params.validate();
  const std::size_t n = out_degrees.size();
  PrResult res;
  res.ranks.assign(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  if (n == 0) {
    res.converged = true;
    return res;
  }
  std::vector<double> contributions(n), sums(n);
  const double base = (1.0 - params.damping) / static_cast<double>(n);
  while (res.iterations < params.max_iters) {
    if constexpr (traced) tr.phase(Phase::contributions);
    compute_contributions(res.ranks, out_degrees, contributions, tr);
    propagate(std::span<const double>(contributions), std::span<double>(sums));
    if constexpr (traced) tr.phase(Phase::update);
    double l1 = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if constexpr (traced) tr(StreamClass::sums, AccessKind::read, u);
      const double r = base + params.damping * sums[u];
      l1 += std::abs(r - res.ranks[u]);
      res.ranks[u] = r;
    }
    ++res.iterations;
    if (!params.fixed_iterations && l1 < params.tolerance) {
      res.converged = true;
      break;
    }
  }
  return res;
}

inline std::vector<count_t> column_counts(const CsrGraph& g) {
  std::vector<count_t> c(g.num_vertices(), 0);
  for (vertex_id v : g.col_indices()) ++c[v];
  return c;
}

}  // namespace detail

/**
 * Unblocked PageRank. Pull expects the transpose (rows = destinations), push
 * the forward graph. Ranks start at 1/|V|; iteration stops once the L1 rank
 * change drops below the tolerance or max_iters is reached.
 */
template <typename Tracer = NullTracer>
PrResult pr_baseline(const CsrGraph& g, Direction dir, const PrParams& params = {}, const ExecutionPolicy& pol = {},
                     Tracer&& tr = Tracer{}) {
  std::vector<count_t> degrees = dir == Direction::pull ? detail::column_counts(g) : g.out_degrees();
  return detail::pagerank_loop(
      degrees, params,
      [&](std::span<const double> c, std::span<double> sums) {
        if (dir == Direction::pull) {
          if constexpr (std::remove_cvref_t<Tracer>::enabled) tr.phase(Phase::process);
          gather_pull(g, c, sums, pol, tr);
        } else {
          scatter_push(g, c, sums, pol, tr);
        }
      },
      tr);
}

/// PageRank over a blocked graph (TOCAB pull, TOCAB push, or CB). `dir` must
/// match the blocking direction.
template <typename Tracer = NullTracer>
PrResult pr_blocked(const BlockedGraph& bg, Direction dir, const PrParams& params = {}, count_t k = kDefaultRangeWidth,
                    const ExecutionPolicy& pol = {}, Tracer&& tr = Tracer{}) {
  if (bg.direction() != dir)
    throw std::invalid_argument(std::string("blocked graph is ") + to_string(bg.direction()) + ", requested " +
                                to_string(dir));
  if (k == 0) throw std::invalid_argument("range width k must be >= 1");
  std::vector<count_t> degrees = bg.forward_out_degrees();
  std::vector<double> partial;
  return detail::pagerank_loop(
      degrees, params,
      [&](std::span<const double> c, std::span<double> sums) { propagate_blocked(bg, c, sums, partial, k, pol, tr); },
      tr);
}

}  // namespace graphcage
