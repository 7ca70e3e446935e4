#pragma once

// Value-propagation kernels shared by PageRank and SpMV.
//
// Every kernel computes y from x over some edge layout, optionally weighting
// each edge, and reports each vertex-value access to a tracer. With the
// default NullTracer the instrumentation compiles away.

#include <algorithm>
#include <atomic>
#include <span>
#include <stdexcept>
#include <vector>

#include "graphcage/access_trace.hpp"
#include "graphcage/blocked_graph.hpp"
#include "graphcage/schedule.hpp"

namespace graphcage {

// Index regions inside the csr_index and frontier classes, in elements.
namespace trace_region {
inline constexpr std::uint64_t row_offsets = 0;
inline constexpr std::uint64_t columns = std::uint64_t{1} << 34;
inline constexpr std::uint64_t id_map = std::uint64_t{1} << 35;
inline constexpr std::uint64_t front = 0;
inline constexpr std::uint64_t next = std::uint64_t{1} << 32;
inline constexpr std::uint64_t queue = std::uint64_t{2} << 32;
inline constexpr std::uint64_t local_next = std::uint64_t{3} << 32;
}  // namespace trace_region

inline constexpr count_t kDefaultRangeWidth = 1024;

namespace detail {

inline void atomic_add(double& target, double v) { std::atomic_ref<double>(target).fetch_add(v, std::memory_order_relaxed); }

template <typename Tracer>
inline void trace_edge(Tracer& tr, std::uint64_t edge_pos, bool weighted) {
  if constexpr (std::remove_cvref_t<Tracer>::enabled) {
    tr(StreamClass::csr_index, AccessKind::read, trace_region::columns + edge_pos);
    if (weighted) tr(StreamClass::edge_values, AccessKind::read, edge_pos);
  }
}

}  // namespace detail

/**
 * Unblocked pull: y[dst] = Σ w(src,dst)·x[src] over the rows of `gt`
 * (rows are destinations). Every y entry is stored once, including rows
 * without edges.
 */
template <typename Tracer = NullTracer>
void gather_pull(const CsrGraph& gt, std::span<const double> x, std::span<double> y, const ExecutionPolicy& pol = {},
                 Tracer&& tr = Tracer{}) {
  const bool weighted = gt.weighted();
  auto ro = gt.row_offsets();
  auto ci = gt.col_indices();
  auto wt = gt.edge_weights();
  auto row = [&](count_t dst) {
    if constexpr (std::remove_cvref_t<Tracer>::enabled) tr(StreamClass::csr_index, AccessKind::read, trace_region::row_offsets + dst);
    double sum = 0.0;
    for (edge_index e = ro[dst]; e < ro[dst + 1]; ++e) {
      detail::trace_edge(tr, e, weighted);
      if constexpr (std::remove_cvref_t<Tracer>::enabled) tr(StreamClass::contributions, AccessKind::read, ci[e]);
      sum += weighted ? wt[e] * x[ci[e]] : x[ci[e]];
    }
    if constexpr (std::remove_cvref_t<Tracer>::enabled) tr(StreamClass::sums, AccessKind::write, dst);
    y[dst] = sum;
  };
  if constexpr (std::remove_cvref_t<Tracer>::enabled) {
    for (count_t dst = 0; dst < gt.num_vertices(); ++dst) row(dst);
  } else {
    for_rows(pol, 0, gt.num_vertices(), row);
  }
}

/// Unblocked push: zeroes y, then y[dst] += w(src,dst)·x[src] for every edge
/// of the forward graph `g`.
template <typename Tracer = NullTracer>
void scatter_push(const CsrGraph& g, std::span<const double> x, std::span<double> y, const ExecutionPolicy& pol = {},
                  Tracer&& tr = Tracer{}) {
  constexpr bool traced = std::remove_cvref_t<Tracer>::enabled;
  const bool weighted = g.weighted();
  auto ro = g.row_offsets();
  auto ci = g.col_indices();
  auto wt = g.edge_weights();
  if constexpr (traced) {
    tr.phase(Phase::init);
    for (count_t v = 0; v < y.size(); ++v) tr(StreamClass::sums, AccessKind::write, v);
    tr.phase(Phase::process);
  }
  std::fill(y.begin(), y.end(), 0.0);

  if (traced || pol.serial()) {
    for (count_t src = 0; src < g.num_vertices(); ++src) {
      if constexpr (traced) {
        tr(StreamClass::csr_index, AccessKind::read, trace_region::row_offsets + src);
        tr(StreamClass::contributions, AccessKind::read, src);
      }
      const double c = x[src];
      for (edge_index e = ro[src]; e < ro[src + 1]; ++e) {
        detail::trace_edge(tr, e, weighted);
        if constexpr (traced) tr(StreamClass::sums, AccessKind::write, ci[e]);
        y[ci[e]] += weighted ? wt[e] * c : c;
      }
    }
    return;
  }

  if (auto* eb = std::get_if<EdgeBalanced>(&pol.schedule)) {
    // Equal edge ranges regardless of row boundaries; a long row is split
    // across workers.
    const count_t grain = std::max<count_t>(1, eb->grain);
    const auto pieces = static_cast<std::int64_t>(ceil_div(g.num_edges(), grain));
#pragma omp parallel for schedule(dynamic, 1) num_threads(pol.threads)
    for (std::int64_t p = 0; p < pieces; ++p) {
      edge_index lo = static_cast<edge_index>(p) * grain, hi = std::min<edge_index>(lo + grain, g.num_edges());
      auto src = static_cast<count_t>(std::upper_bound(ro.begin(), ro.end(), lo) - ro.begin() - 1);
      for (edge_index e = lo; e < hi; ++e) {
        while (ro[src + 1] <= e) ++src;
        detail::atomic_add(y[ci[e]], weighted ? wt[e] * x[src] : x[src]);
      }
    }
  } else {
    for_rows(pol, 0, g.num_vertices(), [&](count_t src) {
      const double c = x[src];
      for (edge_index e = ro[src]; e < ro[src + 1]; ++e) detail::atomic_add(y[ci[e]], weighted ? wt[e] * c : c);
    });
  }
}

/// Pull-side subgraph processing: partial[r] = Σ over row r's in-range
/// sources. `partial` is the block's slice of the partial-sums arena, so
/// stores go to consecutive local indices.
template <typename Tracer = NullTracer>
void process_block_pull(const SubgraphBlock& blk, std::span<const double> x, std::span<double> partial,
                        const ExecutionPolicy& pol = {}, Tracer&& tr = Tracer{}) {
  constexpr bool traced = std::remove_cvref_t<Tracer>::enabled;
  if (partial.size() != blk.n_local()) throw std::invalid_argument("partial_sums length != n_local");
  const bool weighted = !blk.edge_weights.empty();
  auto row = [&](count_t r) {
    if constexpr (traced) tr(StreamClass::csr_index, AccessKind::read, trace_region::row_offsets + blk.row_base + r);
    double sum = 0.0;
    for (edge_index e = blk.local_row_offsets[r]; e < blk.local_row_offsets[r + 1]; ++e) {
      const vertex_id src = blk.col_indices[e];
      if constexpr (traced) {
        detail::trace_edge(tr, e, weighted);
        tr(StreamClass::contributions, AccessKind::read, src);
      }
      sum += weighted ? blk.edge_weights[e] * x[src] : x[src];
    }
    if constexpr (traced) tr(StreamClass::partial_sums, AccessKind::write, blk.row_base + r);
    partial[r] = sum;
  };
  if constexpr (traced) {
    for (count_t r = 0; r < blk.n_local(); ++r) row(r);
  } else {
    for_rows(pol, 0, blk.n_local(), row);
  }
}

/**
 * Reduces per-block partial sums into y, one k-wide vertex range at a time.
 * For each range a local buffer collects the matching id_map segment of every
 * block (found by binary search on the sorted id_map), then the range is
 * stored to y once. Ranges are independent, so the result does not depend on
 * how they are distributed.
 */
template <typename Tracer = NullTracer>
void accumulate_ranges(const BlockedGraph& bg, std::span<const double> partial_arena, count_t k, std::span<double> y,
                       const ExecutionPolicy& pol = {}, Tracer&& tr = Tracer{}) {
  constexpr bool traced = std::remove_cvref_t<Tracer>::enabled;
  if (k == 0) throw std::invalid_argument("range width k must be >= 1");
  if (partial_arena.size() != bg.total_local_rows()) throw std::invalid_argument("partial_sums arena size mismatch");
  const count_t n = bg.num_vertices();
  const count_t ranges = ceil_div(n, k);
  std::vector<SubgraphBlock> blocks;
  blocks.reserve(bg.num_blocks());
  for (count_t b = 0; b < bg.num_blocks(); ++b) blocks.push_back(bg.block(b));

  auto do_range = [&](count_t j, std::vector<double>& buf) {
    const auto lo = static_cast<vertex_id>(j * k);
    const auto hi = static_cast<vertex_id>(std::min(n, (j + 1) * k));
    std::fill(buf.begin(), buf.begin() + (hi - lo), 0.0);
    for (const SubgraphBlock& blk : blocks) {
      auto first = std::lower_bound(blk.id_map.begin(), blk.id_map.end(), lo);
      auto last = std::lower_bound(first, blk.id_map.end(), hi);
      for (auto it = first; it != last; ++it) {
        const count_t r = static_cast<count_t>(it - blk.id_map.begin());
        if constexpr (traced) {
          tr(StreamClass::csr_index, AccessKind::read, trace_region::id_map + blk.row_base + r);
          tr(StreamClass::partial_sums, AccessKind::read, blk.row_base + r);
        }
        buf[*it - lo] += partial_arena[blk.row_base + r];
      }
    }
    for (vertex_id v = lo; v < hi; ++v) {
      if constexpr (traced) tr(StreamClass::sums, AccessKind::write, v);
      y[v] = buf[v - lo];
    }
  };

  if (traced || pol.serial()) {
    std::vector<double> buf(k);
    for (count_t j = 0; j < ranges; ++j) do_range(j, buf);
    return;
  }
#pragma omp parallel num_threads(pol.threads)
  {
    std::vector<double> buf(k);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(ranges); ++j) do_range(static_cast<count_t>(j), buf);
  }
}

/// Push-side subgraph processing: scatters x[id_map[r]] into y for each
/// destination of row r. Every store lands in the block's value range. y
/// must be zeroed by the caller before the first block.
template <typename Tracer = NullTracer>
void process_block_push(const SubgraphBlock& blk, std::span<const double> x, std::span<double> y,
                        Tracer&& tr = Tracer{}) {
  constexpr bool traced = std::remove_cvref_t<Tracer>::enabled;
  const bool weighted = !blk.edge_weights.empty();
  for (count_t r = 0; r < blk.n_local(); ++r) {
    const vertex_id src = blk.id_map[r];
    if constexpr (traced) {
      tr(StreamClass::csr_index, AccessKind::read, trace_region::id_map + blk.row_base + r);
      tr(StreamClass::contributions, AccessKind::read, src);
    }
    const double c = x[src];
    for (edge_index e = blk.local_row_offsets[r]; e < blk.local_row_offsets[r + 1]; ++e) {
      const vertex_id dst = blk.col_indices[e];
      if constexpr (traced) {
        detail::trace_edge(tr, e, weighted);
        tr(StreamClass::sums, AccessKind::write, dst);
      }
      y[dst] += weighted ? blk.edge_weights[e] * c : c;
    }
  }
}

/// Conventional column-blocked pull: each non-empty row does a
/// read-modify-write of the global y entry, once per block.
template <typename Tracer = NullTracer>
void process_block_cb(const SubgraphBlock& blk, std::span<const double> x, std::span<double> y,
                      const ExecutionPolicy& pol = {}, Tracer&& tr = Tracer{}) {
  constexpr bool traced = std::remove_cvref_t<Tracer>::enabled;
  const bool weighted = !blk.edge_weights.empty();
  auto row = [&](count_t r) {
    if constexpr (traced) tr(StreamClass::csr_index, AccessKind::read, trace_region::row_offsets + blk.row_base + r);
    const edge_index b = blk.local_row_offsets[r], e_end = blk.local_row_offsets[r + 1];
    if (b == e_end) return;
    double sum = 0.0;
    for (edge_index e = b; e < e_end; ++e) {
      const vertex_id src = blk.col_indices[e];
      if constexpr (traced) {
        detail::trace_edge(tr, e, weighted);
        tr(StreamClass::contributions, AccessKind::read, src);
      }
      sum += weighted ? blk.edge_weights[e] * x[src] : x[src];
    }
    const vertex_id dst = blk.id_map[r];
    if constexpr (traced) {
      tr(StreamClass::sums, AccessKind::read, dst);
      tr(StreamClass::sums, AccessKind::write, dst);
    }
    y[dst] += sum;
  };
  if constexpr (traced) {
    for (count_t r = 0; r < blk.n_local(); ++r) row(r);
  } else {
    for_rows(pol, 0, blk.n_local(), row);
  }
}

/**
 * One full blocked propagation y = A·x.
 *  - TOCAB pull: process every block into its partial-sums slice, then
 *    accumulate_ranges.
 *  - TOCAB push: zero y, then process_block_push per block. Blocks own
 *    disjoint value ranges, so they may run concurrently.
 *  - CB: zero y, then process_block_cb per block.
 * `partial_arena` is scratch of length total_local_rows (TOCAB pull only).
 */
template <typename Tracer = NullTracer>
void propagate_blocked(const BlockedGraph& bg, std::span<const double> x, std::span<double> y,
                       std::vector<double>& partial_arena, count_t k, const ExecutionPolicy& pol = {},
                       Tracer&& tr = Tracer{}) {
  constexpr bool traced = std::remove_cvref_t<Tracer>::enabled;
  if (x.size() != bg.num_vertices() || y.size() != bg.num_vertices())
    throw std::invalid_argument("vector length != |V|");
  if (bg.scheme() == BlockingScheme::tocab && bg.direction() == Direction::pull) {
    partial_arena.resize(bg.total_local_rows());
    if constexpr (traced) tr.phase(Phase::process);
    for (count_t b = 0; b < bg.num_blocks(); ++b) {
      SubgraphBlock blk = bg.block(b);
      process_block_pull(blk, x, std::span<double>(partial_arena).subspan(blk.row_base, blk.n_local()), pol, tr);
    }
    if constexpr (traced) tr.phase(Phase::accumulate);
    accumulate_ranges(bg, partial_arena, k, y, pol, tr);
    return;
  }

  if constexpr (traced) {
    tr.phase(Phase::init);
    for (count_t v = 0; v < y.size(); ++v) tr(StreamClass::sums, AccessKind::write, v);
    tr.phase(Phase::process);
  }
  std::fill(y.begin(), y.end(), 0.0);
  if (bg.scheme() == BlockingScheme::cb) {
    for (count_t b = 0; b < bg.num_blocks(); ++b) process_block_cb(bg.block(b), x, y, pol, tr);
    return;
  }
  if (traced || pol.serial()) {
    for (count_t b = 0; b < bg.num_blocks(); ++b) process_block_push(bg.block(b), x, y, tr);
    return;
  }
  const auto nb = static_cast<std::int64_t>(bg.num_blocks());
#pragma omp parallel for schedule(dynamic, 1) num_threads(pol.threads)
  for (std::int64_t b = 0; b < nb; ++b) process_block_push(bg.block(static_cast<count_t>(b)), x, y);
}

}  // namespace graphcage
