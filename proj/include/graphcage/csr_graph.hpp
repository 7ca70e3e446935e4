#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphcage/types.hpp"

namespace graphcage {

struct Edge {
  vertex_id src;
  vertex_id dst;
  double weight = 1.0;
};

/**
 * Immutable compressed-sparse-row graph.
 *
 * Rows are canonical: column indices ascending within each row, duplicate
 * edges preserved (multigraph semantics). Edge weights are optional and, when
 * present, stay aligned with col_indices through every transformation.
 */
class CsrGraph {
 public:
  CsrGraph() : row_offsets_(1, 0) {}

  // Builds a canonical graph from an edge list. Edges with equal (src, dst)
  // keep their input order, which fixes the order of their weights.
  static CsrGraph from_edges(count_t num_vertices, std::span<const Edge> edges, bool weighted) {
    if (num_vertices > count_t{kMaxVertexId} + 1)
      throw capacity_error("vertex count exceeds 32-bit id width");
    CsrGraph g;
    g.row_offsets_.assign(num_vertices + 1, 0);
    for (const Edge& e : edges) {
      if (e.src >= num_vertices || e.dst >= num_vertices)
        throw std::invalid_argument("edge endpoint out of range");
      ++g.row_offsets_[e.src + 1];
    }
    std::partial_sum(g.row_offsets_.begin(), g.row_offsets_.end(), g.row_offsets_.begin());
    g.col_indices_.resize(edges.size());
    if (weighted) g.edge_weights_.emplace(edges.size());
    std::vector<edge_index> cursor(g.row_offsets_.begin(), g.row_offsets_.end() - 1);
    for (const Edge& e : edges) {
      edge_index pos = cursor[e.src]++;
      g.col_indices_[pos] = e.dst;
      if (weighted) (*g.edge_weights_)[pos] = e.weight;
    }
    g.canonicalize_rows();
    return g;
  }

  // Adopts raw CSR arrays; rows are re-sorted and the result validated.
  static CsrGraph from_arrays(std::vector<edge_index> row_offsets, std::vector<vertex_id> col_indices,
                              std::optional<std::vector<double>> edge_weights = std::nullopt) {
    CsrGraph g;
    g.row_offsets_ = std::move(row_offsets);
    g.col_indices_ = std::move(col_indices);
    g.edge_weights_ = std::move(edge_weights);
    if (g.row_offsets_.empty()) g.row_offsets_.push_back(0);
    if (auto err = g.check_offsets()) throw std::invalid_argument(*err);
    g.canonicalize_rows();
    if (auto err = g.validate()) throw std::invalid_argument(*err);
    return g;
  }

  count_t num_vertices() const noexcept { return row_offsets_.size() - 1; }
  count_t num_edges() const noexcept { return col_indices_.size(); }
  bool weighted() const noexcept { return edge_weights_.has_value(); }

  std::span<const edge_index> row_offsets() const noexcept { return row_offsets_; }
  std::span<const vertex_id> col_indices() const noexcept { return col_indices_; }
  std::span<const double> edge_weights() const noexcept {
    return edge_weights_ ? std::span<const double>(*edge_weights_) : std::span<const double>{};
  }

  count_t out_degree(vertex_id v) const noexcept { return row_offsets_[v + 1] - row_offsets_[v]; }

  std::vector<count_t> out_degrees() const {
    std::vector<count_t> deg(num_vertices());
    for (count_t v = 0; v < num_vertices(); ++v) deg[v] = row_offsets_[v + 1] - row_offsets_[v];
    return deg;
  }

  std::span<const vertex_id> neighbors(vertex_id v) const noexcept {
    return std::span<const vertex_id>(col_indices_).subspan(row_offsets_[v], out_degree(v));
  }

  std::span<const double> neighbor_weights(vertex_id v) const noexcept {
    if (!edge_weights_) return {};
    return std::span<const double>(*edge_weights_).subspan(row_offsets_[v], out_degree(v));
  }

  double weight(edge_index e) const noexcept { return edge_weights_ ? (*edge_weights_)[e] : 1.0; }

  // Returns an error message for the first violated invariant, if any.
  std::optional<std::string> validate() const {
    if (auto err = check_offsets()) return err;
    for (count_t v = 0; v < num_vertices(); ++v) {
      for (edge_index e = row_offsets_[v]; e < row_offsets_[v + 1]; ++e) {
        if (col_indices_[e] >= num_vertices()) return "column index out of range at edge " + std::to_string(e);
        if (e > row_offsets_[v] && col_indices_[e] < col_indices_[e - 1])
          return "row " + std::to_string(v) + " not sorted";
      }
    }
    return std::nullopt;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (count_t v = 0; v < num_vertices(); ++v)
      for (edge_index e = row_offsets_[v]; e < row_offsets_[v + 1]; ++e)
        out.push_back({static_cast<vertex_id>(v), col_indices_[e], weight(e)});
    return out;
  }

  friend bool operator==(const CsrGraph&, const CsrGraph&) = default;

 private:
  std::optional<std::string> check_offsets() const {
    if (row_offsets_.front() != 0) return "row_offsets[0] != 0";
    for (std::size_t i = 1; i < row_offsets_.size(); ++i)
      if (row_offsets_[i] < row_offsets_[i - 1]) return "row_offsets not monotone at " + std::to_string(i);
    if (row_offsets_.back() != col_indices_.size()) return "row_offsets[|V|] != |E|";
    if (edge_weights_ && edge_weights_->size() != col_indices_.size()) return "edge_weights length != |E|";
    return std::nullopt;
  }

  void canonicalize_rows() {
    std::vector<std::pair<vertex_id, double>> scratch;
    for (count_t v = 0; v < num_vertices(); ++v) {
      auto b = row_offsets_[v], e = row_offsets_[v + 1];
      if (std::is_sorted(col_indices_.begin() + b, col_indices_.begin() + e)) continue;
      if (!edge_weights_) {
        std::stable_sort(col_indices_.begin() + b, col_indices_.begin() + e);
        continue;
      }
      scratch.clear();
      for (auto i = b; i < e; ++i) scratch.emplace_back(col_indices_[i], (*edge_weights_)[i]);
      std::stable_sort(scratch.begin(), scratch.end(),
                       [](const auto& x, const auto& y) { return x.first < y.first; });
      for (auto i = b; i < e; ++i) std::tie(col_indices_[i], (*edge_weights_)[i]) = scratch[i - b];
    }
  }

  std::vector<edge_index> row_offsets_;
  std::vector<vertex_id> col_indices_;
  std::optional<std::vector<double>> edge_weights_;
};

// Reverses every edge. Rows of the result come out sorted because sources are
// visited in ascending order.
inline CsrGraph transpose(const CsrGraph& g) {
  const count_t n = g.num_vertices();
  std::vector<edge_index> offsets(n + 1, 0);
  for (vertex_id c : g.col_indices()) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<vertex_id> cols(g.num_edges());
  std::optional<std::vector<double>> weights;
  if (g.weighted()) weights.emplace(g.num_edges());
  std::vector<edge_index> cursor(offsets.begin(), offsets.end() - 1);
  auto ro = g.row_offsets();
  auto ci = g.col_indices();
  for (count_t u = 0; u < n; ++u) {
    for (edge_index e = ro[u]; e < ro[u + 1]; ++e) {
      edge_index pos = cursor[ci[e]]++;
      cols[pos] = static_cast<vertex_id>(u);
      if (weights) (*weights)[pos] = g.edge_weights()[e];
    }
  }
  return CsrGraph::from_arrays(std::move(offsets), std::move(cols), std::move(weights));
}

// Adds the reverse of every non-loop edge.
inline CsrGraph symmetrize(const CsrGraph& g) {
  std::vector<Edge> edges = g.edges();
  const std::size_t m = edges.size();
  for (std::size_t i = 0; i < m; ++i)
    if (edges[i].src != edges[i].dst) edges.push_back({edges[i].dst, edges[i].src, edges[i].weight});
  return CsrGraph::from_edges(g.num_vertices(), edges, g.weighted());
}

}  // namespace graphcage
