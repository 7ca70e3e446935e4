#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "graphcage/kernels.hpp"

namespace graphcage {

// y = A·x where the rows of `a` are matrix rows (the pull layout). Unweighted
// graphs act as 0/1 matrices.
template <typename Tracer = NullTracer>
std::vector<double> spmv(const CsrGraph& a, std::span<const double> x, const ExecutionPolicy& pol = {},
                         Tracer&& tr = Tracer{}) {
  if (x.size() != a.num_vertices()) throw std::invalid_argument("spmv: x length != |V|");
  std::vector<double> y(a.num_vertices());
  if constexpr (std::remove_cvref_t<Tracer>::enabled) tr.phase(Phase::process);
  gather_pull(a, x, y, pol, tr);
  return y;
}

// Blocked y = A·x. A pull blocking comes from partitioning A itself; a push
// blocking from partitioning its transpose.
template <typename Tracer = NullTracer>
std::vector<double> spmv(const BlockedGraph& bg, std::span<const double> x, count_t k = kDefaultRangeWidth,
                         const ExecutionPolicy& pol = {}, Tracer&& tr = Tracer{}) {
  if (x.size() != bg.num_vertices()) throw std::invalid_argument("spmv: x length != |V|");
  std::vector<double> y(bg.num_vertices());
  std::vector<double> partial;
  propagate_blocked(bg, x, y, partial, k, pol, tr);
  return y;
}

}  // namespace graphcage
