#pragma once

#include <algorithm>
#include <atomic>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "graphcage/kernels.hpp"

namespace graphcage {

using level_t = std::uint32_t;
inline constexpr level_t kUnvisited = std::numeric_limits<level_t>::max();

enum class DirectionMode { automatic, force_push, force_pull };
enum class StepDirection { push, blocked_pull };

inline constexpr count_t kDefaultCacheBytes = 2'883'584;  // 2.75 MB

struct DirectionPolicy {
  DirectionMode mode = DirectionMode::automatic;
  count_t cache_capacity_bytes = kDefaultCacheBytes;
  count_t value_bytes = 4;
};

/**
 * Level-synchronous traversal state.
 *
 * `queue` holds the current frontier in push phases; `front`/`next` are the
 * status-array form used by blocked pull phases. `local_next` and
 * `partial_sigma` are arenas indexed like a partial-sums arena (one slot per
 * local row of each block).
 */
struct TraversalState {
  vertex_id source = 0;
  level_t level = 0;
  bool track_sigma = true;
  std::vector<level_t> depth;
  std::vector<double> sigma;
  std::vector<std::uint8_t> front, next;
  std::vector<vertex_id> queue;
  std::vector<std::uint8_t> local_next;
  std::vector<double> partial_sigma;
  std::vector<double> delta;

  // Instrumentation: how often a vertex was added to the next frontier within
  // one level (must never exceed 1), and the direction taken per level.
  std::vector<std::uint32_t> enqueue_count;
  std::uint32_t max_enqueues_per_level = 0;
  std::vector<StepDirection> directions;

  TraversalState() = default;
  TraversalState(count_t n, vertex_id src, bool with_sigma = true) { reset(n, src, with_sigma); }

  void reset(count_t n, vertex_id src, bool with_sigma = true) {
    if (src >= n) throw std::invalid_argument("source vertex out of range");
    source = src;
    level = 0;
    track_sigma = with_sigma;
    depth.assign(n, kUnvisited);
    sigma.assign(with_sigma ? n : 0, 0.0);
    front.assign(n, 0);
    next.assign(n, 0);
    enqueue_count.assign(n, 0);
    max_enqueues_per_level = 0;
    directions.clear();
    depth[src] = 0;
    if (with_sigma) sigma[src] = 1.0;
    queue.assign(1, src);
  }

  count_t num_vertices() const noexcept { return depth.size(); }
};

namespace detail {

inline void note_enqueues(TraversalState& st, std::span<const vertex_id> added) {
  for (vertex_id v : added) st.max_enqueues_per_level = std::max(st.max_enqueues_per_level, ++st.enqueue_count[v]);
  for (vertex_id v : added) st.enqueue_count[v] = 0;
}

}  // namespace detail

/**
 * Data-driven push step over the forward graph. Each unvisited neighbour of
 * a frontier vertex is claimed once (compare-and-set on its depth) and
 * appended to the next queue; σ[dst] accumulates σ[src] from every
 * predecessor on the previous level. Replaces `queue` with the next frontier
 * and advances the level.
 */
template <typename Tracer = NullTracer>
void bc_forward_push_step(const CsrGraph& g, TraversalState& st, const ExecutionPolicy& pol = {},
                          Tracer&& tr = Tracer{}) {
  constexpr bool traced = std::remove_cvref_t<Tracer>::enabled;
  const level_t next_level = st.level + 1;
  auto ro = g.row_offsets();
  auto ci = g.col_indices();
  std::vector<vertex_id> out;

  if (traced || pol.serial()) {
    for (std::size_t qi = 0; qi < st.queue.size(); ++qi) {
      const vertex_id src = st.queue[qi];
      if constexpr (traced) {
        tr(StreamClass::frontier, AccessKind::read, trace_region::queue + qi);
        tr(StreamClass::csr_index, AccessKind::read, trace_region::row_offsets + src);
        if (st.track_sigma) tr(StreamClass::sigma_depth, AccessKind::read, src);
      }
      for (edge_index e = ro[src]; e < ro[src + 1]; ++e) {
        const vertex_id dst = ci[e];
        if constexpr (traced) {
          tr(StreamClass::csr_index, AccessKind::read, trace_region::columns + e);
          tr(StreamClass::sigma_depth, AccessKind::read, dst);
        }
        if (st.depth[dst] == kUnvisited) {
          st.depth[dst] = next_level;
          if constexpr (traced) {
            tr(StreamClass::sigma_depth, AccessKind::write, dst);
            tr(StreamClass::frontier, AccessKind::write, trace_region::queue + (std::uint64_t{1} << 31) + out.size());
          }
          out.push_back(dst);
        }
        if (st.track_sigma && st.depth[dst] == next_level) {
          if constexpr (traced) tr(StreamClass::sigma_depth, AccessKind::write, dst);
          st.sigma[dst] += st.sigma[src];
        }
      }
    }
  } else {
    const int workers = pol.workers();
    std::vector<std::vector<vertex_id>> local(static_cast<std::size_t>(workers));
    const auto qn = static_cast<std::int64_t>(st.queue.size());
#pragma omp parallel num_threads(workers)
    {
      auto& mine = local[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 16)
      for (std::int64_t qi = 0; qi < qn; ++qi) {
        const vertex_id src = st.queue[static_cast<std::size_t>(qi)];
        for (edge_index e = ro[src]; e < ro[src + 1]; ++e) {
          const vertex_id dst = ci[e];
          std::atomic_ref<level_t> d(st.depth[dst]);
          level_t expected = kUnvisited;
          if (d.load(std::memory_order_relaxed) == kUnvisited &&
              d.compare_exchange_strong(expected, next_level, std::memory_order_relaxed))
            mine.push_back(dst);
          if (st.track_sigma && d.load(std::memory_order_relaxed) == next_level)
            detail::atomic_add(st.sigma[dst], st.sigma[src]);
        }
      }
    }
    for (auto& l : local) out.insert(out.end(), l.begin(), l.end());
  }
  detail::note_enqueues(st, out);
  st.queue = std::move(out);
  st.level = next_level;
}

/**
 * Blocked pull step over a pull-blocked transpose. Requires `front` to mark
 * the current level. Each block scans its rows whose destination is still
 * unvisited, sets the row's local_next flag if any in-range source is in the
 * front, and sums those sources' σ into partial_sigma. A range-tiled
 * reduction then merges local flags and partial σ into next / depth / σ in
 * one pass. Advances the level; `queue` is left untouched.
 */
template <typename Tracer = NullTracer>
void bc_forward_pull_blocked_step(const BlockedGraph& bg, TraversalState& st, count_t k = kDefaultRangeWidth,
                                  const ExecutionPolicy& pol = {}, Tracer&& tr = Tracer{}) {
  constexpr bool traced = std::remove_cvref_t<Tracer>::enabled;
  if (bg.direction() != Direction::pull || bg.scheme() != BlockingScheme::tocab)
    throw std::invalid_argument("blocked pull step needs a TOCAB pull blocking");
  if (bg.num_vertices() != st.num_vertices()) throw std::invalid_argument("blocked graph size != state size");
  if (k == 0) throw std::invalid_argument("range width k must be >= 1");
  const level_t next_level = st.level + 1;
  st.local_next.resize(bg.total_local_rows());
  if (st.track_sigma) st.partial_sigma.resize(bg.total_local_rows());

  auto run_block = [&](const SubgraphBlock& blk) {
    for (count_t r = 0; r < blk.n_local(); ++r) {
      const vertex_id dst = blk.id_map[r];
      const count_t slot = blk.row_base + r;
      if constexpr (traced) {
        tr(StreamClass::csr_index, AccessKind::read, trace_region::id_map + slot);
        tr(StreamClass::sigma_depth, AccessKind::read, dst);
      }
      std::uint8_t hit = 0;
      double partial = 0.0;
      if (st.depth[dst] == kUnvisited) {
        for (edge_index e = blk.local_row_offsets[r]; e < blk.local_row_offsets[r + 1]; ++e) {
          const vertex_id src = blk.col_indices[e];
          if constexpr (traced) {
            tr(StreamClass::csr_index, AccessKind::read, trace_region::columns + e);
            tr(StreamClass::frontier, AccessKind::read, trace_region::front + src);
          }
          if (!st.front[src]) continue;
          hit = 1;
          if (!st.track_sigma) break;
          if constexpr (traced) tr(StreamClass::sigma_depth, AccessKind::read, src);
          partial += st.sigma[src];
        }
      }
      if constexpr (traced) {
        tr(StreamClass::frontier, AccessKind::write, trace_region::local_next + slot);
        if (st.track_sigma) tr(StreamClass::partial_sums, AccessKind::write, slot);
      }
      st.local_next[slot] = hit;
      if (st.track_sigma) st.partial_sigma[slot] = partial;
    }
  };

  if constexpr (traced) tr.phase(Phase::traverse);
  if (traced || pol.serial()) {
    for (count_t b = 0; b < bg.num_blocks(); ++b) run_block(bg.block(b));
  } else {
    const auto nb = static_cast<std::int64_t>(bg.num_blocks());
#pragma omp parallel for schedule(dynamic, 1) num_threads(pol.threads)
    for (std::int64_t b = 0; b < nb; ++b) run_block(bg.block(static_cast<count_t>(b)));
  }

  // Merge local next flags and partial σ per k-wide range.
  if constexpr (traced) tr.phase(Phase::accumulate);
  const count_t n = bg.num_vertices();
  std::vector<std::uint8_t> flag(k);
  std::vector<double> sig(k);
  std::vector<vertex_id> added;
  for (count_t j = 0; j < ceil_div(n, k); ++j) {
    const auto lo = static_cast<vertex_id>(j * k);
    const auto hi = static_cast<vertex_id>(std::min(n, (j + 1) * k));
    std::fill(flag.begin(), flag.begin() + (hi - lo), 0);
    if (st.track_sigma) std::fill(sig.begin(), sig.begin() + (hi - lo), 0.0);
    for (count_t b = 0; b < bg.num_blocks(); ++b) {
      SubgraphBlock blk = bg.block(b);
      auto first = std::lower_bound(blk.id_map.begin(), blk.id_map.end(), lo);
      auto last = std::lower_bound(first, blk.id_map.end(), hi);
      for (auto it = first; it != last; ++it) {
        const count_t slot = blk.row_base + static_cast<count_t>(it - blk.id_map.begin());
        if constexpr (traced) tr(StreamClass::frontier, AccessKind::read, trace_region::local_next + slot);
        if (!st.local_next[slot]) continue;
        flag[*it - lo] = 1;
        if (st.track_sigma) {
          if constexpr (traced) tr(StreamClass::partial_sums, AccessKind::read, slot);
          sig[*it - lo] += st.partial_sigma[slot];
        }
      }
    }
    for (vertex_id v = lo; v < hi; ++v) {
      if constexpr (traced) tr(StreamClass::frontier, AccessKind::write, trace_region::next + v);
      st.next[v] = flag[v - lo];
      if (!flag[v - lo]) continue;
      if constexpr (traced) tr(StreamClass::sigma_depth, AccessKind::write, v);
      st.depth[v] = next_level;
      if (st.track_sigma) st.sigma[v] = sig[v - lo];
      added.push_back(v);
    }
  }
  detail::note_enqueues(st, added);
  st.level = next_level;
}

/// Auto mode picks the blocked pull step exactly when the frontier's total
/// out-degree times value_bytes exceeds the cache capacity.
inline StepDirection choose_direction(std::span<const vertex_id> frontier, const DirectionPolicy& policy,
                                      const CsrGraph& g) {
  switch (policy.mode) {
    case DirectionMode::force_push:
      return StepDirection::push;
    case DirectionMode::force_pull:
      return StepDirection::blocked_pull;
    case DirectionMode::automatic:
      break;
  }
  count_t degree_sum = 0;
  for (vertex_id v : frontier) degree_sum += g.out_degree(v);
  return degree_sum * policy.value_bytes > policy.cache_capacity_bytes ? StepDirection::blocked_pull
                                                                       : StepDirection::push;
}

inline StepDirection choose_direction(const TraversalState& st, const DirectionPolicy& policy, const CsrGraph& g) {
  return choose_direction(st.queue, policy, g);
}

/**
 * Runs the forward phase from st.source to completion, switching between
 * push steps on `g` and blocked pull steps on `bg` (a TOCAB pull blocking of
 * g's transpose) level by level. `bg` may be null when the policy never
 * selects pull.
 */
template <typename Tracer = NullTracer>
void forward_traverse(const CsrGraph& g, const BlockedGraph* bg, TraversalState& st, const DirectionPolicy& policy,
                      count_t k = kDefaultRangeWidth, const ExecutionPolicy& pol = {}, Tracer&& tr = Tracer{}) {
  constexpr bool traced = std::remove_cvref_t<Tracer>::enabled;
  while (!st.queue.empty()) {
    const StepDirection dir = choose_direction(st, policy, g);
    st.directions.push_back(dir);
    if (dir == StepDirection::push) {
      if constexpr (traced) tr.phase(Phase::traverse);
      bc_forward_push_step(g, st, pol, tr);
      continue;
    }
    if (!bg) throw std::invalid_argument("pull step selected but no blocked graph supplied");
    // Queue -> status array for the pull step, then back.
    if constexpr (traced) tr.phase(Phase::traverse);
    for (std::size_t i = 0; i < st.queue.size(); ++i) {
      if constexpr (traced) {
        tr(StreamClass::frontier, AccessKind::read, trace_region::queue + i);
        tr(StreamClass::frontier, AccessKind::write, trace_region::front + st.queue[i]);
      }
      st.front[st.queue[i]] = 1;
    }
    bc_forward_pull_blocked_step(*bg, st, k, pol, tr);
    for (vertex_id v : st.queue) st.front[v] = 0;
    st.queue.clear();
    for (count_t v = 0; v < st.num_vertices(); ++v) {
      if (!st.next[v]) continue;
      st.queue.push_back(static_cast<vertex_id>(v));
      st.next[v] = 0;
    }
  }
}

/**
 * Brandes dependency accumulation over the forward graph, deepest level
 * first: delta[v] = Σ (σ[v]/σ[w])·(1 + delta[w]) over edges v→w with
 * depth[w] = depth[v] + 1. Adds delta[v] to centrality for every v except the
 * source.
 */
inline void bc_backward(const CsrGraph& g, TraversalState& st, std::span<double> centrality) {
  if (!st.track_sigma) throw std::invalid_argument("backward phase needs path counts");
  const count_t n = st.num_vertices();
  if (centrality.size() != n) throw std::invalid_argument("centrality length != |V|");
  level_t max_level = 0;
  for (level_t d : st.depth)
    if (d != kUnvisited) max_level = std::max(max_level, d);
  // Bucket vertices by level.
  std::vector<count_t> start(static_cast<std::size_t>(max_level) + 2, 0);
  for (level_t d : st.depth)
    if (d != kUnvisited) ++start[d + 1];
  for (std::size_t i = 1; i < start.size(); ++i) start[i] += start[i - 1];
  std::vector<vertex_id> by_level(start.back());
  std::vector<count_t> cursor(start.begin(), start.end() - 1);
  for (count_t v = 0; v < n; ++v)
    if (st.depth[v] != kUnvisited) by_level[cursor[st.depth[v]]++] = static_cast<vertex_id>(v);

  st.delta.assign(n, 0.0);
  for (level_t lvl = max_level; lvl-- > 0;) {
    for (count_t i = start[lvl]; i < start[lvl + 1]; ++i) {
      const vertex_id v = by_level[i];
      double acc = 0.0;
      for (vertex_id w : g.neighbors(v))
        if (st.depth[w] == lvl + 1) acc += st.sigma[v] / st.sigma[w] * (1.0 + st.delta[w]);
      st.delta[v] = acc;
    }
  }
  for (count_t v = 0; v < n; ++v)
    if (v != st.source) centrality[v] += st.delta[v];
}

struct BcResult {
  std::vector<double> centrality;
  std::uint32_t max_enqueues_per_level = 0;
};

/// Betweenness centrality summed over `sources` (ordered-pair dependencies,
/// endpoints excluded, unnormalized).
inline BcResult betweenness(const CsrGraph& g, const BlockedGraph* bg, std::span<const vertex_id> sources,
                            const DirectionPolicy& policy = {}, count_t k = kDefaultRangeWidth,
                            const ExecutionPolicy& pol = {}) {
  BcResult res;
  res.centrality.assign(g.num_vertices(), 0.0);
  TraversalState st;
  for (vertex_id s : sources) {
    st.reset(g.num_vertices(), s, true);
    forward_traverse(g, bg, st, policy, k, pol);
    bc_backward(g, st, res.centrality);
    res.max_enqueues_per_level = std::max(res.max_enqueues_per_level, st.max_enqueues_per_level);
  }
  return res;
}

/// Hop distances from `source`; unreachable vertices keep kUnvisited.
inline std::vector<level_t> bfs(const CsrGraph& g, const BlockedGraph* bg, vertex_id source,
                                const DirectionPolicy& policy = {}, count_t k = kDefaultRangeWidth,
                                const ExecutionPolicy& pol = {}) {
  TraversalState st(g.num_vertices(), source, false);
  forward_traverse(g, bg, st, policy, k, pol);
  return std::move(st.depth);
}

// k distinct sources drawn uniformly with a fixed seed (all vertices when
// k >= |V|), returned ascending.
inline std::vector<vertex_id> sample_sources(count_t num_vertices, count_t k, std::uint64_t seed) {
  std::vector<vertex_id> all(num_vertices);
  for (count_t v = 0; v < num_vertices; ++v) all[v] = static_cast<vertex_id>(v);
  if (k >= num_vertices) return all;
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates with explicit modulo draws keeps this portable.
  for (count_t i = 0; i < k; ++i) {
    count_t j = i + rng() % (num_vertices - i);
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace graphcage
