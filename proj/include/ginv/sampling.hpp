#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "ginv/map_model.hpp"
#include "ginv/parallel.hpp"

namespace ginv {

/// Seed of the sampling stream for one (run seed, map, check) cell, so
/// checks can run in any order or concurrently without changing samples.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view map_name, std::string_view cell);

class SampleStream {
public:
  explicit SampleStream(std::uint64_t seed) : rng_(seed) {}
  SampleStream(std::uint64_t seed, std::string_view map_name, std::string_view cell)
      : rng_(stream_seed(seed, map_name, cell)) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  Vec direction(int dim);
  /// Uniform in the Euclidean ball of the given radius.
  Vec in_ball(int dim, double radius);
  /// Uniform direction, radius uniform in (inner, outer].
  Vec in_shell(int dim, double inner, double outer);

private:
  std::mt19937_64 rng_;
};

struct ShellSampling {
  int shells = 32;
  int per_shell = 8;
  /// Adds +-r e_i on every shell sphere.
  bool axis_probes = true;
};

/// Shell-stratified sample of the ball |x| <= radius: the center, then for
/// each shell its axis probes followed by per_shell random points.
std::vector<Vec> sample_ball(int dim, double radius, const ShellSampling& s, SampleStream& stream);

/// Ball extremum with the doubling stability test: estimates with per_shell,
/// 2 per_shell and 4 per_shell random points per shell are nested; stable when
/// both doublings change the estimate by less than 5 %.
struct BallExtremum {
  double value = 0.0;
  Vec argument;
  bool stable = false;
  std::vector<double> doubling_estimates;
  std::size_t samples = 0;
};

template <class Fn>
BallExtremum ball_minimum(int dim, double radius, const ShellSampling& s, SampleStream& stream, Fn&& fn,
                          Exec exec = Exec::parallel);

}  // namespace ginv

#include <cmath>

namespace ginv {

template <class Fn>
BallExtremum ball_minimum(int dim, double radius, const ShellSampling& s, SampleStream& stream, Fn&& fn, Exec exec) {
  ShellSampling wide = s;
  wide.per_shell = 4 * s.per_shell;
  const std::vector<Vec> points = sample_ball(dim, radius, wide, stream);
  const std::vector<double> values = map_points<double>(points, fn, exec);

  const std::size_t axis = s.axis_probes ? static_cast<std::size_t>(2 * dim) : 0;
  const std::size_t per_shell_wide = axis + static_cast<std::size_t>(wide.per_shell);
  BallExtremum out;
  for (int factor : {1, 2, 4}) {
    const std::size_t keep = axis + static_cast<std::size_t>(factor * s.per_shell);
    Extremum best;
    auto consider = [&](std::size_t i) {
      const double v = values[i];
      if (v == v && detail::improves(v, static_cast<std::ptrdiff_t>(i), best)) best = {v, static_cast<std::ptrdiff_t>(i)};
    };
    consider(0);
    for (int shell = 0; shell < s.shells; ++shell) {
      const std::size_t offset = 1 + static_cast<std::size_t>(shell) * per_shell_wide;
      for (std::size_t j = 0; j < keep; ++j) consider(offset + j);
    }
    out.doubling_estimates.push_back(best.value);
    if (factor == 4 && best.found()) {
      out.value = best.value;
      out.argument = points[static_cast<std::size_t>(best.index)];
    }
  }
  auto close = [](double a, double b) {
    if (a == b) return true;
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::isfinite(scale) && std::abs(a - b) < 0.05 * scale;
  };
  out.stable = close(out.doubling_estimates[0], out.doubling_estimates[1]) &&
               close(out.doubling_estimates[1], out.doubling_estimates[2]);
  out.samples = points.size();
  return out;
}

}  // namespace ginv
