#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <span>
#include <stdexcept>
#include <vector>

#include "graphcage/csr_graph.hpp"

namespace graphcage {

// Conventional blocking keeps every vertex as a row in every block; TOCAB keeps
// only rows with at least one edge and maps them back through id_map.
enum class BlockingScheme : std::uint8_t { tocab = 0, cb = 1 };

inline constexpr count_t kDefaultBlockWidth = count_t{1} << 18;

/// Read-only view of one subgraph inside a BlockedGraph's arenas.
struct SubgraphBlock {
  count_t block_index = 0;
  vertex_id lo = 0;  // value_range [lo, hi)
  vertex_id hi = 0;
  std::span<const vertex_id> id_map;
  std::span<const edge_index> local_row_offsets;  // n_local + 1 entries, starting at 0
  std::span<const vertex_id> col_indices;
  std::span<const double> edge_weights;  // empty when unweighted
  // Position of this block's first local row in arenas indexed by local row
  // (partial_sums, local_next).
  count_t row_base = 0;

  count_t n_local() const noexcept { return id_map.size(); }
  count_t num_edges() const noexcept { return col_indices.size(); }
  count_t row_degree(count_t row) const noexcept { return local_row_offsets[row + 1] - local_row_offsets[row]; }
  double weight(edge_index e) const noexcept { return edge_weights.empty() ? 1.0 : edge_weights[e]; }
  bool contains(vertex_id v) const noexcept { return v >= lo && v < hi; }
};

/**
 * 1D statically blocked graph.
 *
 * Block b confines the column-side endpoint of its edges to
 * [b*width, min((b+1)*width, |V|)). For pull the input is the transpose, so
 * rows are destinations and columns are sources; for push the input is the
 * forward graph and rows are sources. All blocks share four arenas (id_map,
 * row offsets, columns, weights) addressed through a per-block offset table.
 */
class BlockedGraph {
 public:
  struct BlockExtent {
    count_t row_begin;     // into id_map arena
    count_t n_local;
    count_t offset_begin;  // into row-offset arena (n_local + 1 entries)
    count_t edge_begin;    // into column / weight arenas
    count_t n_edges;
    friend bool operator==(const BlockExtent&, const BlockExtent&) = default;
  };

  BlockedGraph() = default;

  Direction direction() const noexcept { return direction_; }
  BlockingScheme scheme() const noexcept { return scheme_; }
  count_t width() const noexcept { return width_; }
  count_t num_vertices() const noexcept { return num_vertices_; }
  count_t num_edges() const noexcept { return num_edges_; }
  count_t num_blocks() const noexcept { return extents_.size(); }
  bool weighted() const noexcept { return weighted_; }
  // Σ n_local over all blocks: the length of a partial_sums arena.
  count_t total_local_rows() const noexcept { return id_map_.size(); }

  SubgraphBlock block(count_t b) const {
    const BlockExtent& x = extents_.at(b);
    SubgraphBlock s;
    s.block_index = b;
    s.lo = static_cast<vertex_id>(b * width_);
    s.hi = static_cast<vertex_id>(std::min((b + 1) * width_, num_vertices_));
    s.id_map = std::span<const vertex_id>(id_map_).subspan(x.row_begin, x.n_local);
    s.local_row_offsets = std::span<const edge_index>(row_offsets_).subspan(x.offset_begin, x.n_local + 1);
    s.col_indices = std::span<const vertex_id>(cols_).subspan(x.edge_begin, x.n_edges);
    if (!weights_.empty()) s.edge_weights = std::span<const double>(weights_).subspan(x.edge_begin, x.n_edges);
    s.row_base = x.row_begin;
    return s;
  }

  std::span<const BlockExtent> extents() const noexcept { return extents_; }
  std::span<const vertex_id> id_map_arena() const noexcept { return id_map_; }
  std::span<const edge_index> row_offset_arena() const noexcept { return row_offsets_; }
  std::span<const vertex_id> col_arena() const noexcept { return cols_; }
  std::span<const double> weight_arena() const noexcept { return weights_; }

  // Out-degrees of the forward graph, recovered from the blocks. For pull this
  // counts column occurrences, for push it sums row lengths.
  std::vector<count_t> forward_out_degrees() const {
    std::vector<count_t> deg(num_vertices_, 0);
    for (count_t b = 0; b < num_blocks(); ++b) {
      SubgraphBlock s = block(b);
      if (direction_ == Direction::pull) {
        for (vertex_id c : s.col_indices) ++deg[c];
      } else {
        for (count_t r = 0; r < s.n_local(); ++r) deg[s.id_map[r]] += s.row_degree(r);
      }
    }
    return deg;
  }

  friend bool operator==(const BlockedGraph&, const BlockedGraph&) = default;

  friend class BlockedGraphBuilder;

 private:
  Direction direction_ = Direction::pull;
  BlockingScheme scheme_ = BlockingScheme::tocab;
  bool weighted_ = false;
  count_t width_ = 1;
  count_t num_vertices_ = 0;
  count_t num_edges_ = 0;
  std::vector<BlockExtent> extents_;
  std::vector<vertex_id> id_map_;
  std::vector<edge_index> row_offsets_;
  std::vector<vertex_id> cols_;
  std::vector<double> weights_;
};

/// Assembles a BlockedGraph block by block. Used by the partitioners and the
/// GCB reader; `finish` checks the structural invariants.
class BlockedGraphBuilder {
 public:
  BlockedGraphBuilder(Direction dir, BlockingScheme scheme, count_t width, count_t num_vertices, bool weighted) {
    if (width == 0) throw std::invalid_argument("block width must be >= 1");
    g_.direction_ = dir;
    g_.scheme_ = scheme;
    g_.width_ = width;
    g_.num_vertices_ = num_vertices;
    g_.weighted_ = weighted;
  }

  void reserve(count_t rows, count_t edges, count_t blocks) {
    g_.id_map_.reserve(rows);
    g_.row_offsets_.reserve(rows + blocks);
    g_.cols_.reserve(edges);
    if (g_.weighted_) g_.weights_.reserve(edges);
    g_.extents_.reserve(blocks);
  }

  void add_block(std::span<const vertex_id> id_map, std::span<const edge_index> local_offsets,
                 std::span<const vertex_id> cols, std::span<const double> weights) {
    BlockedGraph::BlockExtent x{g_.id_map_.size(), id_map.size(), g_.row_offsets_.size(), g_.cols_.size(),
                                cols.size()};
    g_.extents_.push_back(x);
    g_.id_map_.insert(g_.id_map_.end(), id_map.begin(), id_map.end());
    g_.row_offsets_.insert(g_.row_offsets_.end(), local_offsets.begin(), local_offsets.end());
    g_.cols_.insert(g_.cols_.end(), cols.begin(), cols.end());
    if (g_.weighted_) g_.weights_.insert(g_.weights_.end(), weights.begin(), weights.end());
  }

  BlockedGraph finish() {
    g_.num_edges_ = g_.cols_.size();
    if (auto err = check(g_)) throw format_error(*err);
    return std::move(g_);
  }

  static std::optional<std::string> check(const BlockedGraph& g) {
    if (g.num_blocks() != ceil_div(g.num_vertices(), g.width())) return "block count != ceil(|V|/width)";
    count_t edges = 0;
    for (count_t b = 0; b < g.num_blocks(); ++b) {
      const auto& x = g.extents_[b];
      if (x.offset_begin + x.n_local + 1 > g.row_offsets_.size() || x.row_begin + x.n_local > g.id_map_.size() ||
          x.edge_begin + x.n_edges > g.cols_.size())
        return "block " + std::to_string(b) + " extent outside arenas";
      SubgraphBlock s = g.block(b);
      if (s.local_row_offsets.front() != 0 || s.local_row_offsets.back() != s.num_edges())
        return "block " + std::to_string(b) + " row offsets do not span its edges";
      for (count_t r = 0; r < s.n_local(); ++r) {
        if (s.local_row_offsets[r + 1] < s.local_row_offsets[r]) return "block row offsets not monotone";
        if (r > 0 && s.id_map[r] <= s.id_map[r - 1]) return "id_map not strictly increasing";
        if (s.id_map[r] >= g.num_vertices()) return "id_map entry out of range";
        if (g.scheme() == BlockingScheme::tocab && s.row_degree(r) == 0) return "empty local row in TOCAB block";
      }
      for (vertex_id c : s.col_indices)
        if (!s.contains(c)) return "column outside block value range";
      edges += s.num_edges();
    }
    if (edges != g.cols_.size()) return "blocks do not cover the edge arena";
    if (g.weighted_ && g.weights_.size() != g.cols_.size()) return "weight arena length mismatch";
    return std::nullopt;
  }

  // Two passes over the sorted input rows. Each row's columns fall into
  // contiguous per-block runs, so no sorting is needed; pass 1 counts rows and
  // edges per block, pass 2 writes straight into the arenas.
  static BlockedGraph partition(const CsrGraph& g, Direction dir, count_t width, BlockingScheme scheme) {
    if (width == 0) throw std::invalid_argument("block width must be >= 1");
    const count_t n = g.num_vertices();
    const count_t nb = ceil_div(n, width);
    auto ro = g.row_offsets();
    auto ci = g.col_indices();
    auto wt = g.edge_weights();

    std::vector<count_t> rows_in(nb, 0), edges_in(nb, 0);
    for (count_t v = 0; v < n; ++v) {
      edge_index e = ro[v];
      while (e < ro[v + 1]) {
        count_t b = ci[e] / width;
        edge_index run_end = e;
        while (run_end < ro[v + 1] && ci[run_end] / width == b) ++run_end;
        ++rows_in[b];
        edges_in[b] += run_end - e;
        e = run_end;
      }
    }
    if (scheme == BlockingScheme::cb) std::fill(rows_in.begin(), rows_in.end(), n);

    BlockedGraphBuilder builder(dir, scheme, width, n, g.weighted());
    BlockedGraph& out = builder.g_;
    count_t total_rows = 0, total_edges = 0;
    for (count_t b = 0; b < nb; ++b) {
      out.extents_.push_back({total_rows, rows_in[b], total_rows + b, total_edges, edges_in[b]});
      total_rows += rows_in[b];
      total_edges += edges_in[b];
    }
    out.id_map_.resize(total_rows);
    out.row_offsets_.assign(total_rows + nb, 0);
    out.cols_.resize(total_edges);
    if (g.weighted()) out.weights_.resize(total_edges);

    std::vector<count_t> row_cursor(nb, 0), edge_cursor(nb, 0);
    for (count_t v = 0; v < n; ++v) {
      edge_index e = ro[v];
      // For CB every block gets a row for v; rows without edges stay empty.
      count_t next_block = 0;
      auto close_empty_rows_until = [&](count_t b_end) {
        if (scheme != BlockingScheme::cb) return;
        for (; next_block < b_end; ++next_block) {
          auto& x = out.extents_[next_block];
          count_t r = row_cursor[next_block]++;
          out.id_map_[x.row_begin + r] = static_cast<vertex_id>(v);
          out.row_offsets_[x.offset_begin + r + 1] = edge_cursor[next_block];
        }
      };
      while (e < ro[v + 1]) {
        count_t b = ci[e] / width;
        close_empty_rows_until(b);
        auto& x = out.extents_[b];
        count_t r = row_cursor[b]++;
        out.id_map_[x.row_begin + r] = static_cast<vertex_id>(v);
        while (e < ro[v + 1] && ci[e] / width == b) {
          count_t pos = x.edge_begin + edge_cursor[b]++;
          out.cols_[pos] = ci[e];
          if (g.weighted()) out.weights_[pos] = wt[e];
          ++e;
        }
        out.row_offsets_[x.offset_begin + r + 1] = edge_cursor[b];
        next_block = b + 1;
      }
      close_empty_rows_until(nb);
    }
    return builder.finish();
  }

 private:
  BlockedGraph g_;
};


/// TOCAB blocking. Pull expects the transpose (rows = destinations) and
/// blocks by source range; push expects the forward graph and blocks by
/// destination range. Rows with no edge in a block are dropped from it.
inline BlockedGraph partition_tocab(const CsrGraph& g, Direction dir, count_t width = kDefaultBlockWidth) {
  return BlockedGraphBuilder::partition(g, dir, width, BlockingScheme::tocab);
}

/// Conventional column blocking: same edge assignment as TOCAB pull, but each
/// block keeps all |V| rows (identity id_map).
inline BlockedGraph partition_cb(const CsrGraph& g, count_t width = kDefaultBlockWidth) {
  return BlockedGraphBuilder::partition(g, Direction::pull, width, BlockingScheme::cb);
}

struct BlockSummary {
  count_t n_local;
  count_t num_edges;
  double mean_local_degree;
};

struct BlockStats {
  std::vector<BlockSummary> blocks;
  // Local-degree histogram over all (block, row) pairs: 0-7, 8-15, 16-31, >=32.
  std::array<count_t, 4> degree_counts{};
  count_t total_rows = 0;

  double fraction(std::size_t bin) const {
    return total_rows == 0 ? 0.0 : static_cast<double>(degree_counts[bin]) / static_cast<double>(total_rows);
  }
};

inline constexpr std::array<const char*, 4> kDegreeBinLabels{"0-7", "8-15", "16-31", ">=32"};

inline std::size_t degree_bin(count_t d) { return d < 8 ? 0 : d < 16 ? 1 : d < 32 ? 2 : 3; }

inline BlockStats block_stats(const BlockedGraph& bg) {
  BlockStats st;
  for (count_t b = 0; b < bg.num_blocks(); ++b) {
    SubgraphBlock s = bg.block(b);
    for (count_t r = 0; r < s.n_local(); ++r) ++st.degree_counts[degree_bin(s.row_degree(r))];
    st.total_rows += s.n_local();
    double mean = s.n_local() ? static_cast<double>(s.num_edges()) / static_cast<double>(s.n_local()) : 0.0;
    st.blocks.push_back({s.n_local(), s.num_edges(), mean});
  }
  return st;
}

// Same histogram over the rows of an unblocked graph, for comparison.
inline std::array<double, 4> degree_histogram(const CsrGraph& g) {
  std::array<count_t, 4> counts{};
  for (count_t v = 0; v < g.num_vertices(); ++v) ++counts[degree_bin(g.out_degree(static_cast<vertex_id>(v)))];
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i)
    out[i] = g.num_vertices() ? static_cast<double>(counts[i]) / static_cast<double>(g.num_vertices()) : 0.0;
  return out;
}

}  // namespace graphcage
