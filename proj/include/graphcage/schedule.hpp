#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <variant>

#include <omp.h>

#include "graphcage/types.hpp"

namespace graphcage {

// Work division strategies. Coarse (row-granular) division is what pull
// kernels use; edge-balanced division splits long rows and is only used where
// concurrent accumulation is already required (push).
struct SerialRows {};
struct ChunkedRows {
  count_t chunk = 64;
};
struct EdgeBalanced {
  count_t grain = 4096;
};
using ScheduleStrategy = std::variant<SerialRows, ChunkedRows, EdgeBalanced>;

struct ExecutionPolicy {
  int threads = 1;
  ScheduleStrategy schedule = SerialRows{};
  // Canonical order everywhere: blocks ascending, rows ascending, edges in
  // storage order. Overrides `threads` and `schedule`.
  bool deterministic = true;

  bool serial() const noexcept {
    return deterministic || threads <= 1 || std::holds_alternative<SerialRows>(schedule);
  }
  int workers() const noexcept { return serial() ? 1 : threads; }
};

inline std::string to_string(const ScheduleStrategy& s) {
  if (std::holds_alternative<SerialRows>(s)) return "serial-rows";
  if (auto* c = std::get_if<ChunkedRows>(&s)) return "chunked-rows(" + std::to_string(c->chunk) + ")";
  return "edge-balanced(" + std::to_string(std::get<EdgeBalanced>(s).grain) + ")";
}

// Rows [begin, end) in chunks handed out dynamically; body(row) must be
// independent across rows.
template <typename Body>
void for_rows(const ExecutionPolicy& pol, count_t begin, count_t end, Body&& body) {
  if (pol.serial()) {
    for (count_t r = begin; r < end; ++r) body(r);
    return;
  }
  count_t chunk = 64;
  if (auto* c = std::get_if<ChunkedRows>(&pol.schedule)) chunk = std::max<count_t>(1, c->chunk);
  const auto n = static_cast<std::int64_t>(end - begin);
#pragma omp parallel for schedule(dynamic, chunk) num_threads(pol.threads)
  for (std::int64_t i = 0; i < n; ++i) body(begin + static_cast<count_t>(i));
}

// Parses GRAPHCAGE_THREADS; returns `fallback` when unset or invalid.
inline int threads_from_env(int fallback = 1) {
  const char* s = std::getenv("GRAPHCAGE_THREADS");
  if (!s) return fallback;
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  return (end != s && *end == '\0' && v > 0) ? static_cast<int>(v) : fallback;
}

}  // namespace graphcage
