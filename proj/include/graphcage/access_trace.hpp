#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "graphcage/types.hpp"

namespace graphcage {

enum class StreamClass : std::uint8_t {
  contributions,
  sums,
  partial_sums,
  frontier,
  sigma_depth,
  csr_index,
  edge_values,
};
inline constexpr std::size_t kNumStreamClasses = 7;

inline constexpr std::array<std::string_view, kNumStreamClasses> kStreamClassNames{
    "contributions", "sums", "partial_sums", "frontier", "sigma_depth", "csr_index", "edge_values"};

inline std::string_view to_string(StreamClass c) { return kStreamClassNames[static_cast<std::size_t>(c)]; }

inline std::optional<StreamClass> parse_stream_class(std::string_view s) {
  for (std::size_t i = 0; i < kNumStreamClasses; ++i)
    if (kStreamClassNames[i] == s) return static_cast<StreamClass>(i);
  return std::nullopt;
}

// Vertex-value classes are the ones cache blocking targets.
inline constexpr bool is_vertex_value(StreamClass c) {
  return c != StreamClass::csr_index && c != StreamClass::edge_values;
}

enum class AccessKind : std::uint8_t { read, write };

// Kernel phase an access belongs to; lets tests attribute traffic.
enum class Phase : std::uint8_t { init, contributions, process, accumulate, update, traverse, backward };

struct AccessEvent {
  std::uint64_t index;
  StreamClass cls;
  AccessKind kind;
  Phase phase;
  std::uint8_t element_bytes;

  friend bool operator==(const AccessEvent&, const AccessEvent&) = default;
};

// Footprint of one element per class. Vertex values are traced as 4-byte
// reals; sigma_depth is an 8-byte {depth, sigma} record.
inline constexpr std::uint8_t element_bytes_of(StreamClass c) {
  switch (c) {
    case StreamClass::sigma_depth:
      return 8;
    default:
      return 4;
  }
}

// Each class lives in its own 1 TiB virtual region, so classes never alias.
inline constexpr std::uint64_t kClassRegionShift = 40;

inline constexpr std::uint64_t address_of(const AccessEvent& e) {
  return (std::uint64_t(static_cast<std::uint8_t>(e.cls) + 1) << kClassRegionShift) +
         e.index * std::uint64_t(e.element_bytes);
}

/// Tracer that discards everything; kernels instantiated with it compile the
/// instrumentation away.
struct NullTracer {
  static constexpr bool enabled = false;
  static constexpr bool index_streams = false;
  void phase(Phase) noexcept {}
  void operator()(StreamClass, AccessKind, std::uint64_t) noexcept {}
};

/**
 * Forwards each access to a sink callable taking an AccessEvent. When
 * `index_streams` is false, csr_index and edge_values accesses are dropped at
 * the source.
 */
template <typename Sink>
class EventTracer {
 public:
  static constexpr bool enabled = true;

  explicit EventTracer(Sink& sink, bool index_streams = false) : sink_(&sink), index_streams_(index_streams) {}

  void phase(Phase p) noexcept { phase_ = p; }
  Phase current_phase() const noexcept { return phase_; }
  bool index_streams() const noexcept { return index_streams_; }

  void operator()(StreamClass c, AccessKind k, std::uint64_t index) {
    if (!index_streams_ && !is_vertex_value(c)) return;
    (*sink_)(AccessEvent{index, c, k, phase_, element_bytes_of(c)});
  }

 private:
  Sink* sink_;
  bool index_streams_;
  Phase phase_ = Phase::init;
};

using AccessTrace = std::vector<AccessEvent>;

struct TraceCollector {
  AccessTrace events;
  void operator()(const AccessEvent& e) { events.push_back(e); }
};

// Debug dump: one "class index kind" line per event.
inline void dump_trace(std::ostream& os, const AccessTrace& trace) {
  for (const auto& e : trace)
    os << to_string(e.cls) << ' ' << e.index << ' ' << (e.kind == AccessKind::read ? 'R' : 'W') << '\n';
}

}  // namespace graphcage
