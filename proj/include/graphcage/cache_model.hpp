#pragma once

#include <array>
#include <bit>
#include <bitset>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphcage/access_trace.hpp"

namespace graphcage {

struct CacheConfig {
  count_t capacity_bytes = 2'883'584;  // 2.75 MB
  count_t line_bytes = 128;
  count_t associativity = 16;
  // Classes whose accesses go straight to memory.
  std::bitset<kNumStreamClasses> bypass;

  count_t num_lines() const noexcept { return capacity_bytes / line_bytes; }
  count_t num_sets() const noexcept { return num_lines() / associativity; }

  // Line size and associativity must be powers of two and the capacity a
  // whole number of sets. The set count itself need not be a power of two
  // (2.75 MB with 128 B lines and 16 ways has 1408 sets).
  void validate() const {
    if (!is_power_of_two(line_bytes)) throw std::invalid_argument("cache line size must be a power of two");
    if (!is_power_of_two(associativity)) throw std::invalid_argument("associativity must be a power of two");
    if (capacity_bytes == 0 || capacity_bytes % (line_bytes * associativity) != 0)
      throw std::invalid_argument("capacity must be a positive multiple of line_bytes * associativity");
  }

  static CacheConfig desk() { return {262'144, 128, 16, {}}; }
};

struct ClassMetrics {
  count_t accesses = 0;
  count_t misses = 0;
  count_t reads = 0;
  count_t writes = 0;
  // Dirty lines of this class written back on eviction.
  count_t writebacks = 0;

  double miss_rate() const noexcept { return accesses ? double(misses) / double(accesses) : 0.0; }
  count_t transactions() const noexcept { return misses + writebacks; }

  ClassMetrics& operator+=(const ClassMetrics& o) noexcept {
    accesses += o.accesses, misses += o.misses, reads += o.reads, writes += o.writes, writebacks += o.writebacks;
    return *this;
  }
};

/**
 * Simulation result. miss_rate counts only demand misses; misses_per_edge
 * counts memory transactions (misses, bypassed accesses and dirty
 * write-backs) per graph edge.
 */
struct CacheMetrics {
  std::array<ClassMetrics, kNumStreamClasses> per_class{};
  count_t num_edges = 0;

  const ClassMetrics& of(StreamClass c) const noexcept { return per_class[static_cast<std::size_t>(c)]; }

  ClassMetrics total() const noexcept {
    ClassMetrics t;
    for (const auto& c : per_class) t += c;
    return t;
  }
  ClassMetrics vertex_values() const noexcept {
    ClassMetrics t;
    for (std::size_t i = 0; i < kNumStreamClasses; ++i)
      if (is_vertex_value(static_cast<StreamClass>(i))) t += per_class[i];
    return t;
  }
  double miss_rate() const noexcept { return total().miss_rate(); }
  double vertex_miss_rate() const noexcept { return vertex_values().miss_rate(); }
  double misses_per_edge() const noexcept {
    return num_edges ? double(total().transactions()) / double(num_edges) : 0.0;
  }
};

/// Set-associative LRU cache, write-allocate and write-back. No final flush:
/// lines still dirty when the trace ends are not counted as write-backs.
class CacheSimulator {
 public:
  explicit CacheSimulator(const CacheConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    sets_ = cfg_.num_sets();
    ways_ = cfg_.associativity;
    line_shift_ = static_cast<unsigned>(std::countr_zero(cfg_.line_bytes));
    lines_.assign(sets_ * ways_, Line{});
  }

  // Returns true on a hit. Bypassed accesses always report a miss.
  bool access(const AccessEvent& e) {
    ClassMetrics& m = metrics_.per_class[static_cast<std::size_t>(e.cls)];
    ++m.accesses;
    (e.kind == AccessKind::read ? m.reads : m.writes) += 1;
    if (cfg_.bypass.test(static_cast<std::size_t>(e.cls))) {
      ++m.misses;
      return false;
    }
    const std::uint64_t line = address_of(e) >> line_shift_;
    const std::uint64_t set = line % sets_;
    Line* ways = &lines_[set * ways_];
    ++clock_;
    Line* victim = ways;
    for (count_t w = 0; w < ways_; ++w) {
      if (ways[w].valid && ways[w].tag == line) {
        ways[w].stamp = clock_;
        ways[w].dirty |= e.kind == AccessKind::write;
        return true;
      }
      if (!ways[w].valid) {
        if (victim->valid) victim = &ways[w];
      } else if (victim->valid && ways[w].stamp < victim->stamp) {
        victim = &ways[w];
      }
    }
    ++m.misses;
    if (victim->valid && victim->dirty) ++metrics_.per_class[victim->cls].writebacks;
    *victim = Line{line, clock_, static_cast<std::uint8_t>(e.cls), true, e.kind == AccessKind::write};
    return false;
  }

  void operator()(const AccessEvent& e) { access(e); }

  void set_num_edges(count_t m) noexcept { metrics_.num_edges = m; }
  const CacheMetrics& metrics() const noexcept { return metrics_; }
  const CacheConfig& config() const noexcept { return cfg_; }

 private:
  struct Line {
    std::uint64_t tag = 0;
    std::uint64_t stamp = 0;
    std::uint8_t cls = 0;
    bool valid = false;
    bool dirty = false;
  };

  CacheConfig cfg_;
  count_t sets_ = 0, ways_ = 0;
  unsigned line_shift_ = 0;
  std::uint64_t clock_ = 0;
  std::vector<Line> lines_;
  CacheMetrics metrics_;
};

inline CacheMetrics simulate(std::span<const AccessEvent> trace, const CacheConfig& cfg, count_t num_edges = 0) {
  CacheSimulator sim(cfg);
  sim.set_num_edges(num_edges);
  for (const auto& e : trace) sim.access(e);
  return sim.metrics();
}

}  // namespace graphcage
