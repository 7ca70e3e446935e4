#pragma once

// GCB: little-endian container for a BlockedGraph.
//
//   "GCB1" | u8 direction | u8 flags | u16 reserved
//   u64 num_vertices | u64 num_edges | u64 width | u64 num_blocks
//   per block: u64 n_local | u64 n_edges | u32 id_map[n_local]
//              u64 local_row_offsets[n_local+1] | u32 col_indices[n_edges]
//              [f64 weights[n_edges]]
//   u32 CRC-32 of every preceding byte
//
// flags bit0: weights present; bit1: conventional (CB) row layout.

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "graphcage/blocked_graph.hpp"

namespace graphcage {

namespace gcb {

inline constexpr char kMagic[4] = {'G', 'C', 'B', '1'};
inline constexpr std::uint8_t kFlagWeights = 0x1;
inline constexpr std::uint8_t kFlagConventional = 0x2;

inline std::uint32_t crc32_of(const std::uint8_t* data, std::size_t n) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  while (n > 0) {
    auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = ::crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    if constexpr (std::is_floating_point_v<T>) {
      using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
      put(std::bit_cast<U>(v));
    } else {
      for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<std::uint8_t>(std::uint64_t(v) >> (8 * i)));
    }
  }
  template <typename T>
  void put_all(std::span<const T> xs) {
    for (T x : xs) put(x);
  }
  void put_bytes(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  std::vector<std::uint8_t>& bytes() noexcept { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  // `end` excludes the trailing checksum.
  Reader(const std::uint8_t* begin, const std::uint8_t* end) : p_(begin), end_(end) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    if constexpr (std::is_floating_point_v<T>) {
      using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
      return std::bit_cast<T>(get<U>());
    } else {
      std::uint64_t v = 0;
      for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t(p_[i]) << (8 * i);
      p_ += sizeof(T);
      return static_cast<T>(v);
    }
  }
  template <typename T>
  std::vector<T> get_array(std::uint64_t n) {
    if (n > remaining() / sizeof(T)) throw format_error("GCB file truncated");
    std::vector<T> out(n);
    for (auto& x : out) x = get<T>();
    return out;
  }
  std::size_t remaining() const noexcept { return static_cast<std::size_t>(end_ - p_); }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw format_error("GCB file truncated");
  }
  const std::uint8_t* p_;
  const std::uint8_t* end_;
};

}  // namespace gcb

inline std::vector<std::uint8_t> encode_gcb(const BlockedGraph& bg) {
  gcb::Writer w;
  w.put_bytes(gcb::kMagic, 4);
  w.put(static_cast<std::uint8_t>(bg.direction()));
  std::uint8_t flags = 0;
  if (bg.weighted()) flags |= gcb::kFlagWeights;
  if (bg.scheme() == BlockingScheme::cb) flags |= gcb::kFlagConventional;
  w.put(flags);
  w.put(std::uint16_t{0});
  w.put(std::uint64_t{bg.num_vertices()});
  w.put(std::uint64_t{bg.num_edges()});
  w.put(std::uint64_t{bg.width()});
  w.put(std::uint64_t{bg.num_blocks()});
  for (count_t b = 0; b < bg.num_blocks(); ++b) {
    SubgraphBlock s = bg.block(b);
    w.put(std::uint64_t{s.n_local()});
    w.put(std::uint64_t{s.num_edges()});
    w.put_all(s.id_map);
    w.put_all(s.local_row_offsets);
    w.put_all(s.col_indices);
    if (bg.weighted()) w.put_all(s.edge_weights);
  }
  auto& bytes = w.bytes();
  w.put(gcb::crc32_of(bytes.data(), bytes.size()));
  return std::move(bytes);
}

inline BlockedGraph decode_gcb(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), gcb::kMagic, 4) != 0) throw format_error("not a GCB file (bad magic)");
  constexpr std::size_t kHeader = 4 + 4 + 4 * 8;
  if (bytes.size() < kHeader + 4) throw format_error("GCB file truncated");
  gcb::Reader r(bytes.data() + 4, bytes.data() + bytes.size() - 4);
  auto dir = r.get<std::uint8_t>();
  auto flags = r.get<std::uint8_t>();
  r.get<std::uint16_t>();
  if (dir > 1) throw format_error("GCB direction byte invalid");
  auto nv = r.get<std::uint64_t>();
  auto ne = r.get<std::uint64_t>();
  auto width = r.get<std::uint64_t>();
  auto nb = r.get<std::uint64_t>();
  if (width == 0) throw format_error("GCB width is zero");
  if (nb != ceil_div(nv, width)) throw format_error("GCB block count inconsistent with |V| and width");
  const bool weighted = flags & gcb::kFlagWeights;
  const auto scheme = (flags & gcb::kFlagConventional) ? BlockingScheme::cb : BlockingScheme::tocab;

  BlockedGraphBuilder builder(static_cast<Direction>(dir), scheme, width, nv, weighted);
  for (std::uint64_t b = 0; b < nb; ++b) {
    auto n_local = r.get<std::uint64_t>();
    auto n_edges = r.get<std::uint64_t>();
    auto id_map = r.get_array<vertex_id>(n_local);
    auto offsets = r.get_array<edge_index>(n_local + 1);
    auto cols = r.get_array<vertex_id>(n_edges);
    std::vector<double> weights;
    if (weighted) weights = r.get_array<double>(n_edges);
    builder.add_block(id_map, offsets, cols, weights);
  }
  if (r.remaining() != 0) throw format_error("GCB file has trailing bytes");
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) stored |= std::uint32_t(bytes[bytes.size() - 4 + i]) << (8 * i);
  if (stored != gcb::crc32_of(bytes.data(), bytes.size() - 4)) throw format_error("GCB checksum mismatch");
  BlockedGraph out = builder.finish();
  if (out.num_edges() != ne) throw format_error("GCB edge count mismatch");
  return out;
}

inline void write_gcb(const BlockedGraph& bg, const std::string& path) {
  auto bytes = encode_gcb(bg);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error("write to '" + path + "' failed");
}

inline BlockedGraph read_gcb(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_gcb(bytes);
}

}  // namespace graphcage
