#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "graphcage/cache_model.hpp"
#include "graphcage/pagerank.hpp"
#include "graphcage/spmv.hpp"
#include "graphcage/traversal.hpp"

namespace graphcage {

enum class TraceKernel {
  pr_pull_baseline,
  pr_push_baseline,
  pr_cb,
  pr_tocab_pull,
  pr_tocab_push,
  spmv_pull_baseline,
  spmv_push_baseline,
  spmv_cb,
  spmv_tocab_pull,
  spmv_tocab_push,
  bc_push,
  bc_pull,
  bc_hybrid,
};

inline constexpr std::pair<TraceKernel, std::string_view> kTraceKernelNames[] = {
    {TraceKernel::pr_pull_baseline, "pr-pull-baseline"},
    {TraceKernel::pr_push_baseline, "pr-push-baseline"},
    {TraceKernel::pr_cb, "pr-cb"},
    {TraceKernel::pr_tocab_pull, "pr-tocab-pull"},
    {TraceKernel::pr_tocab_push, "pr-tocab-push"},
    {TraceKernel::spmv_pull_baseline, "spmv-pull-baseline"},
    {TraceKernel::spmv_push_baseline, "spmv-push-baseline"},
    {TraceKernel::spmv_cb, "spmv-cb"},
    {TraceKernel::spmv_tocab_pull, "spmv-tocab-pull"},
    {TraceKernel::spmv_tocab_push, "spmv-tocab-push"},
    {TraceKernel::bc_push, "bc-push"},
    {TraceKernel::bc_pull, "bc-pull"},
    {TraceKernel::bc_hybrid, "bc-hybrid"},
};

inline std::string_view to_string(TraceKernel k) {
  for (auto [kk, name] : kTraceKernelNames)
    if (kk == k) return name;
  return "?";
}

inline TraceKernel parse_trace_kernel(std::string_view s) {
  for (auto [kk, name] : kTraceKernelNames)
    if (name == s) return kk;
  throw std::invalid_argument("unsupported kernel label '" + std::string(s) + "'");
}

// Kernels whose trace depends on the block width.
inline bool uses_blocking(TraceKernel k) {
  switch (k) {
    case TraceKernel::pr_pull_baseline:
    case TraceKernel::pr_push_baseline:
    case TraceKernel::spmv_pull_baseline:
    case TraceKernel::spmv_push_baseline:
    case TraceKernel::bc_push:
      return false;
    default:
      return true;
  }
}

struct TraceOptions {
  count_t width = kDefaultBlockWidth;
  count_t k = kDefaultRangeWidth;
  count_t iterations = 1;
  double damping = 0.85;
  bool index_streams = false;  // include csr_index / edge_values
  vertex_id source = 0;
  DirectionPolicy policy{};  // bc-hybrid only
};

/**
 * Derived graphs needed by the traced kernels, built on first use. `g` is the
 * forward graph for PR and BC and the matrix (rows = output entries) for
 * SpMV.
 */
class TraceContext {
 public:
  explicit TraceContext(const CsrGraph& g) : g_(&g) {}

  const CsrGraph& graph() const noexcept { return *g_; }
  const CsrGraph& transposed() {
    if (!gt_) gt_ = transpose(*g_);
    return *gt_;
  }
  const BlockedGraph& blocking(std::string_view tag, Direction dir, BlockingScheme scheme, count_t width) {
    const std::string key = std::string(tag) + (scheme == BlockingScheme::cb ? ":cb:" : ":tocab:") +
                            std::to_string(width);
    auto it = blocks_.find(key);
    if (it != blocks_.end()) return it->second;
    // PR/BC pull and SpMV push partition the transpose; the others the input.
    const bool use_transpose = tag == "fwd-pull" || tag == "mat-push";
    const CsrGraph& src = use_transpose ? transposed() : *g_;
    BlockedGraph bg = scheme == BlockingScheme::cb ? partition_cb(src, width) : partition_tocab(src, dir, width);
    return blocks_.emplace(key, std::move(bg)).first->second;
  }

 private:
  const CsrGraph* g_;
  std::optional<CsrGraph> gt_;
  std::map<std::string, BlockedGraph> blocks_;
};

/// Runs `kernel` in canonical order and feeds every access to `sink`.
template <typename Sink>
void trace_kernel(TraceKernel kernel, TraceContext& ctx, const TraceOptions& opt, Sink& sink) {
  EventTracer<Sink> tr(sink, opt.index_streams);
  const CsrGraph& g = ctx.graph();
  PrParams pr{opt.damping, 1e-4, opt.iterations, true};
  const ExecutionPolicy serial{};
  auto ones = [&] { return std::vector<double>(g.num_vertices(), 1.0); };

  switch (kernel) {
    case TraceKernel::pr_pull_baseline:
      pr_baseline(ctx.transposed(), Direction::pull, pr, serial, tr);
      break;
    case TraceKernel::pr_push_baseline:
      pr_baseline(g, Direction::push, pr, serial, tr);
      break;
    case TraceKernel::pr_cb:
      pr_blocked(ctx.blocking("fwd-pull", Direction::pull, BlockingScheme::cb, opt.width), Direction::pull, pr, opt.k,
                 serial, tr);
      break;
    case TraceKernel::pr_tocab_pull:
      pr_blocked(ctx.blocking("fwd-pull", Direction::pull, BlockingScheme::tocab, opt.width), Direction::pull, pr,
                 opt.k, serial, tr);
      break;
    case TraceKernel::pr_tocab_push:
      pr_blocked(ctx.blocking("fwd-push", Direction::push, BlockingScheme::tocab, opt.width), Direction::push, pr,
                 opt.k, serial, tr);
      break;
    case TraceKernel::spmv_pull_baseline:
      for (count_t i = 0; i < opt.iterations; ++i) spmv(g, ones(), serial, tr);
      break;
    case TraceKernel::spmv_push_baseline: {
      std::vector<double> y(g.num_vertices());
      for (count_t i = 0; i < opt.iterations; ++i) scatter_push(ctx.transposed(), ones(), y, serial, tr);
      break;
    }
    case TraceKernel::spmv_cb:
      for (count_t i = 0; i < opt.iterations; ++i)
        spmv(ctx.blocking("mat-pull", Direction::pull, BlockingScheme::cb, opt.width), ones(), opt.k, serial, tr);
      break;
    case TraceKernel::spmv_tocab_pull:
      for (count_t i = 0; i < opt.iterations; ++i)
        spmv(ctx.blocking("mat-pull", Direction::pull, BlockingScheme::tocab, opt.width), ones(), opt.k, serial, tr);
      break;
    case TraceKernel::spmv_tocab_push:
      for (count_t i = 0; i < opt.iterations; ++i)
        spmv(ctx.blocking("mat-push", Direction::push, BlockingScheme::tocab, opt.width), ones(), opt.k, serial, tr);
      break;
    case TraceKernel::bc_push:
    case TraceKernel::bc_pull:
    case TraceKernel::bc_hybrid: {
      if (g.num_vertices() == 0) break;
      DirectionPolicy pol = opt.policy;
      pol.mode = kernel == TraceKernel::bc_push   ? DirectionMode::force_push
                 : kernel == TraceKernel::bc_pull ? DirectionMode::force_pull
                                                  : DirectionMode::automatic;
      const BlockedGraph* bg = kernel == TraceKernel::bc_push
                                   ? nullptr
                                   : &ctx.blocking("fwd-pull", Direction::pull, BlockingScheme::tocab, opt.width);
      TraversalState st(g.num_vertices(), opt.source, true);
      forward_traverse(g, bg, st, pol, opt.k, serial, tr);
      break;
    }
  }
}

inline AccessTrace trace_kernel(TraceKernel kernel, const CsrGraph& g, const TraceOptions& opt = {}) {
  TraceContext ctx(g);
  TraceCollector c;
  trace_kernel(kernel, ctx, opt, c);
  return std::move(c.events);
}

/// Streams the kernel's trace through a fresh simulator.
inline CacheMetrics simulate_kernel(TraceKernel kernel, TraceContext& ctx, const TraceOptions& opt,
                                    const CacheConfig& cfg) {
  CacheSimulator sim(cfg);
  sim.set_num_edges(ctx.graph().num_edges() * std::max<count_t>(1, opt.iterations));
  trace_kernel(kernel, ctx, opt, sim);
  return sim.metrics();
}

struct ModeMetrics {
  TraceKernel kernel;
  count_t width;  // 0 for unblocked kernels
  CacheMetrics metrics;
};

/// One simulation per (kernel, width); unblocked kernels run once.
inline std::vector<ModeMetrics> compare_modes(const CsrGraph& g, std::span<const TraceKernel> kernels,
                                              std::span<const count_t> widths, const CacheConfig& cfg,
                                              TraceOptions opt = {}) {
  if (widths.empty()) throw std::invalid_argument("compare_modes: widths list is empty");
  TraceContext ctx(g);
  std::vector<ModeMetrics> rows;
  for (TraceKernel kern : kernels) {
    if (!uses_blocking(kern)) {
      rows.push_back({kern, 0, simulate_kernel(kern, ctx, opt, cfg)});
      continue;
    }
    for (count_t w : widths) {
      opt.width = w;
      rows.push_back({kern, w, simulate_kernel(kern, ctx, opt, cfg)});
    }
  }
  return rows;
}

// Six significant digits, as everywhere in CSV output.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void write_metrics_csv_header(std::ostream& os) {
  os << "graph,kernel,mode,width,k,accesses,misses,miss_rate,misses_per_edge\n";
}

inline void write_metrics_csv_row(std::ostream& os, std::string_view graph, std::string_view kernel,
                                  std::string_view mode, count_t width, count_t k, const CacheMetrics& m) {
  ClassMetrics t = m.total();
  os << graph << ',' << kernel << ',' << mode << ',' << width << ',' << k << ',' << t.accesses << ',' << t.misses
     << ',' << format_real(t.miss_rate()) << ',' << format_real(m.misses_per_edge()) << '\n';
}

}  // namespace graphcage
