#include "ginv/sampling.hpp"

#include <cmath>

namespace ginv {

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::string_view map_name, std::string_view cell) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, map_name);
  h = fnv1a(h, "/");
  h = fnv1a(h, cell);
  return splitmix64(seed ^ splitmix64(h));
}

Vec SampleStream::direction(int dim) {
  if (dim == 1) return Vec::Constant(1, uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
  std::normal_distribution<double> normal;
  while (true) {
    Vec d(dim);
    for (int i = 0; i < dim; ++i) d[i] = normal(rng_);
    const double n = d.norm();
    if (n > 1e-12) return d / n;
  }
}

Vec SampleStream::in_ball(int dim, double radius) {
  const Vec d = direction(dim);
  const double r = radius * std::pow(uniform(0.0, 1.0), 1.0 / dim);
  return r * d;
}

Vec SampleStream::in_shell(int dim, double inner, double outer) {
  const Vec d = direction(dim);
  // uniform(a, b) samples [a, b); mirror it onto (inner, outer].
  return (outer - uniform(0.0, outer - inner)) * d;
}

std::vector<Vec> sample_ball(int dim, double radius, const ShellSampling& s, SampleStream& stream) {
  std::vector<Vec> points;
  const std::size_t axis = s.axis_probes ? static_cast<std::size_t>(2 * dim) : 0;
  points.reserve(1 + static_cast<std::size_t>(s.shells) * (axis + static_cast<std::size_t>(s.per_shell)));
  points.push_back(Vec::Zero(dim));
  for (int k = 1; k <= s.shells; ++k) {
    const double inner = radius * (k - 1) / s.shells;
    const double outer = radius * k / s.shells;
    if (s.axis_probes) {
      for (int i = 0; i < dim; ++i) {
        for (double sign : {1.0, -1.0}) {
          Vec p = Vec::Zero(dim);
          p[i] = sign * outer;
          points.push_back(p);
        }
      }
    }
    for (int j = 0; j < s.per_shell; ++j) points.push_back(stream.in_shell(dim, inner, outer));
  }
  return points;
}

}  // namespace ginv
