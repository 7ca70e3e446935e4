#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace graphcage {

using vertex_id = std::uint32_t;
using edge_index = std::uint64_t;
using count_t = std::uint64_t;

inline constexpr vertex_id kMaxVertexId = std::numeric_limits<vertex_id>::max();

enum class Direction : std::uint8_t { pull = 0, push = 1 };

inline const char* to_string(Direction d) { return d == Direction::pull ? "pull" : "push"; }

// Malformed input text. Carries the 1-based line number when known (0 otherwise).
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t line)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Value does not fit the 32-bit vertex id width.
class capacity_error : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Binary file is corrupt, truncated or of the wrong kind.
class format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr count_t ceil_div(count_t a, count_t b) { return b == 0 ? 0 : (a + b - 1) / b; }

inline constexpr bool is_power_of_two(count_t x) { return x != 0 && (x & (x - 1)) == 0; }

}  // namespace graphcage
