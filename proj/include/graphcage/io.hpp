#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "graphcage/csr_graph.hpp"

namespace graphcage {

enum class IdBase { zero, one, automatic };

struct EdgeListOptions {
  IdBase base = IdBase::automatic;
  bool symmetrize = false;
  // Overrides the vertex count when trailing isolated vertices exist.
  std::optional<count_t> num_vertices;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::uint64_t parse_id(std::string_view tok, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec == std::errc::result_out_of_range) throw capacity_error("vertex id overflows id width (line " + std::to_string(line) + ")");
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw parse_error("malformed vertex id '" + std::string(tok) + "'", line);
  return v;
}

inline double parse_real(std::string_view tok, std::size_t line) {
  double v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw parse_error("malformed weight '" + std::string(tok) + "'", line);
  return v;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

/// Reads whitespace-separated "u v [w]" lines. Lines starting with '#' or '%'
/// are comments. A third column makes the graph weighted; lines lacking it get
/// weight 1.
inline CsrGraph read_edge_list(std::istream& in, const EdgeListOptions& opts = {}) {
  struct Raw {
    std::uint64_t u, v;
    double w;
  };
  std::vector<Raw> raw;
  bool weighted = false;
  std::uint64_t min_id = UINT64_MAX, max_id = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = detail::trim(line);
    if (s.empty() || s.front() == '#' || s.front() == '%') continue;
    auto tok = detail::split_ws(s);
    if (tok.size() < 2 || tok.size() > 3) throw parse_error("expected 'u v [w]'", lineno);
    Raw r{detail::parse_id(tok[0], lineno), detail::parse_id(tok[1], lineno), 1.0};
    if (tok.size() == 3) {
      r.w = detail::parse_real(tok[2], lineno);
      weighted = true;
    }
    if (r.u > kMaxVertexId || r.v > kMaxVertexId)
      throw capacity_error("vertex id overflows 32-bit id width (line " + std::to_string(lineno) + ")");
    min_id = std::min({min_id, r.u, r.v});
    max_id = std::max({max_id, r.u, r.v});
    raw.push_back(r);
  }
  std::uint64_t shift = 0;
  if (opts.base == IdBase::one || (opts.base == IdBase::automatic && !raw.empty() && min_id >= 1)) shift = 1;
  if (opts.base == IdBase::one && !raw.empty() && min_id == 0) throw parse_error("vertex id 0 in one-based input", 0);

  count_t n = raw.empty() ? 0 : max_id - shift + 1;
  if (opts.num_vertices) {
    if (*opts.num_vertices < n) throw std::invalid_argument("--num-vertices smaller than max id + 1");
    n = *opts.num_vertices;
  }
  std::vector<Edge> edges;
  edges.reserve(raw.size() * (opts.symmetrize ? 2 : 1));
  for (const Raw& r : raw) {
    auto u = static_cast<vertex_id>(r.u - shift), v = static_cast<vertex_id>(r.v - shift);
    edges.push_back({u, v, r.w});
    if (opts.symmetrize && u != v) edges.push_back({v, u, r.w});
  }
  return CsrGraph::from_edges(n, edges, weighted);
}

inline CsrGraph load_edge_list(const std::string& path, const EdgeListOptions& opts = {}) {
  auto in = detail::open_input(path);
  return read_edge_list(in, opts);
}

/// Writes zero-based "u v" (or "u v w") lines that read_edge_list reloads into
/// an identical graph.
inline void write_edge_list(std::ostream& out, const CsrGraph& g) {
  char buf[32];
  auto ro = g.row_offsets();
  auto ci = g.col_indices();
  for (count_t u = 0; u < g.num_vertices(); ++u) {
    for (edge_index e = ro[u]; e < ro[u + 1]; ++e) {
      out << u << ' ' << ci[e];
      if (g.weighted()) {
        std::snprintf(buf, sizeof buf, "%.17g", g.edge_weights()[e]);
        out << ' ' << buf;
      }
      out << '\n';
    }
  }
}

/// MatrixMarket coordinate reader (general or symmetric; pattern, real or
/// integer). Entry (i, j) becomes edge i-1 -> j-1; symmetric off-diagonal
/// entries also yield j-1 -> i-1.
inline CsrGraph read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw parse_error("empty MatrixMarket input", 1);
  std::istringstream banner(line);
  std::string mm, object, format, field, symmetry;
  banner >> mm >> object >> format >> field >> symmetry;
  auto lower = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  object = lower(object), format = lower(format), field = lower(field), symmetry = lower(symmetry);
  if (mm != "%%MatrixMarket" || object != "matrix" || format != "coordinate")
    throw parse_error("bad MatrixMarket banner", 1);
  if (field != "pattern" && field != "real" && field != "integer")
    throw parse_error("unsupported MatrixMarket field '" + field + "'", 1);
  if (symmetry != "general" && symmetry != "symmetric")
    throw parse_error("unsupported MatrixMarket symmetry '" + symmetry + "'", 1);
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric";

  std::uint64_t rows = 0, cols = 0, nnz = 0;
  bool have_size = false;
  std::vector<Edge> edges;
  std::uint64_t seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = detail::trim(line);
    if (s.empty() || s.front() == '%') continue;
    auto tok = detail::split_ws(s);
    if (!have_size) {
      if (tok.size() != 3) throw parse_error("expected 'rows cols nnz'", lineno);
      rows = detail::parse_id(tok[0], lineno);
      cols = detail::parse_id(tok[1], lineno);
      nnz = detail::parse_id(tok[2], lineno);
      if (std::max(rows, cols) > count_t{kMaxVertexId} + 1) throw capacity_error("matrix dimension exceeds id width");
      have_size = true;
      edges.reserve(symmetric ? 2 * nnz : nnz);
      continue;
    }
    if (tok.size() != (pattern ? 2u : 3u)) throw parse_error("wrong number of entry fields", lineno);
    auto i = detail::parse_id(tok[0], lineno), j = detail::parse_id(tok[1], lineno);
    if (i < 1 || i > rows || j < 1 || j > cols) throw parse_error("entry index outside matrix dimensions", lineno);
    double w = pattern ? 1.0 : detail::parse_real(tok[2], lineno);
    edges.push_back({static_cast<vertex_id>(i - 1), static_cast<vertex_id>(j - 1), w});
    if (symmetric && i != j) edges.push_back({static_cast<vertex_id>(j - 1), static_cast<vertex_id>(i - 1), w});
    ++seen;
  }
  if (!have_size) throw parse_error("missing size line", lineno);
  if (seen != nnz)
    throw parse_error("entry count mismatch: header says " + std::to_string(nnz) + ", found " + std::to_string(seen), 0);
  return CsrGraph::from_edges(std::max(rows, cols), edges, !pattern);
}

inline CsrGraph load_matrix_market(const std::string& path) {
  auto in = detail::open_input(path);
  return read_matrix_market(in);
}

}  // namespace graphcage
