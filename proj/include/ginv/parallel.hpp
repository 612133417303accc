#pragma once

// Data-parallel kernels used by the samplers and the grid oracle. Every kernel
// has a serial reference; the OpenMP variant returns bit-identical results
// because reductions break ties by the smallest index and outputs are stored
// by index.

#include <cstddef>
#include <limits>
#include <vector>

#include "ginv/types.hpp"

namespace ginv {

enum class Exec { serial, parallel };

struct Extremum {
  double value = std::numeric_limits<double>::infinity();
  std::ptrdiff_t index = -1;

  bool found() const noexcept { return index >= 0; }
};

namespace detail {

inline bool improves(double v, std::ptrdiff_t i, const Extremum& cur) {
  if (cur.index < 0) return true;
  return v < cur.value || (v == cur.value && i < cur.index);
}

}  // namespace detail

/// Minimum of fn(i) for i in [0, n); NaN values are skipped.
template <class Fn>
Extremum min_index_serial(std::size_t n, Fn&& fn) {
  Extremum best;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = fn(i);
    if (v != v) continue;
    if (detail::improves(v, static_cast<std::ptrdiff_t>(i), best)) best = {v, static_cast<std::ptrdiff_t>(i)};
  }
  return best;
}

template <class Fn>
Extremum min_index_parallel(std::size_t n, Fn&& fn) {
  Extremum best;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
  {
    Extremum local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const double v = fn(static_cast<std::size_t>(i));
      if (v != v) continue;
      if (detail::improves(v, i, local)) local = {v, i};
    }
#pragma omp critical(ginv_min_index)
    {
      if (local.found() && detail::improves(local.value, local.index, best)) best = local;
    }
  }
  return best;
}

template <class Fn>
Extremum min_index(std::size_t n, Fn&& fn, Exec exec) {
  return exec == Exec::serial ? min_index_serial(n, fn) : min_index_parallel(n, fn);
}

template <class Fn>
Extremum min_over(const std::vector<Vec>& points, Fn&& fn, Exec exec = Exec::parallel) {
  return min_index(points.size(), [&](std::size_t i) { return fn(points[i]); }, exec);
}

/// Maximum via the minimum of the negated values.
template <class Fn>
Extremum max_over(const std::vector<Vec>& points, Fn&& fn, Exec exec = Exec::parallel) {
  Extremum e = min_index(points.size(), [&](std::size_t i) { return -fn(points[i]); }, exec);
  e.value = -e.value;
  return e;
}

/// out[i] = fn(i) for i in [0, n).
template <class Out, class Fn>
std::vector<Out> map_index(std::size_t n, Fn&& fn, Exec exec = Exec::parallel) {
  std::vector<Out> out(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    return out;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
  return out;
}

template <class Out, class Fn>
std::vector<Out> map_points(const std::vector<Vec>& points, Fn&& fn, Exec exec = Exec::parallel) {
  return map_index<Out>(points.size(), [&](std::size_t i) { return fn(points[i]); }, exec);
}

}  // namespace ginv
