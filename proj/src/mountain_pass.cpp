#include "ginv/mountain_pass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace ginv {

MountainPassGeometry MountainPassGeometry::make(Vec base, Vec offset, double radius, double alpha) {
  if (!(radius > 0.0) || !(alpha > 0.0)) throw ConfigError("mountain-pass radius and alpha must be positive");
  if (offset.norm() < radius) throw ConfigError("second preimage lies inside the separating sphere");
  MountainPassGeometry g;
  g.base = std::move(base);
  g.offset = std::move(offset);
  g.radius = radius;
  g.alpha = alpha;
  g.rho = 0.5 * alpha * alpha * radius * radius;
  return g;
}

std::vector<Vec> sphere_directions(int dim, int count) {
  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs.push_back(Vec::Constant(1, -1.0));
    dirs.push_back(Vec::Constant(1, 1.0));
    return dirs;
  }
  dirs.reserve(static_cast<std::size_t>(count));
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * k / count;
      Vec d(2);
      d << std::cos(a), std::sin(a);
      dirs.push_back(d);
    }
    return dirs;
  }
  std::mt19937_64 rng(0x5eedULL + static_cast<unsigned>(dim));
  std::normal_distribution<double> normal;
  while (static_cast<int>(dirs.size()) < count) {
    Vec d(dim);
    for (int i = 0; i < dim; ++i) d[i] = normal(rng);
    if (d.norm() > 1e-12) dirs.push_back(d.normalized());
  }
  return dirs;
}

Openness estimate_openness(const MapUnderTest& map, const Vec& u) {
  const double sur = banach_constant(map, u);
  if (!(sur > 0.0)) throw NumericalError("map is not a local diffeomorphism at " + format_vec(u), u);
  const auto dirs = sphere_directions(map.dim, 32);
  Openness out{0.5 * sur, 0.0};
  double r = 1.0;
  for (int k = 0; k <= 20; ++k, r *= 0.5) {
    bool uniform = true;
    for (const Vec& d : dirs) {
      const Vec x = u + r * d;
      double s = 0.0;
      try {
        s = banach_constant(map, x);
      } catch (const NumericalError&) {
        s = 0.0;
      }
      if (!(s >= 0.75 * sur)) {
        uniform = false;
        break;
      }
    }
    if (uniform) {
      out.radius = r;
      return out;
    }
  }
  out.radius = std::ldexp(1.0, -20);
  return out;
}

SphereMargin sphere_margin(const TargetFunctional& F, const MountainPassGeometry& geom) {
  const int dim = F.map().dim;
  const auto dirs = sphere_directions(dim, 32 * dim);
  SphereMargin m;
  m.min_value = std::numeric_limits<double>::infinity();
  for (const Vec& d : dirs) {
    const Vec x = geom.base + geom.radius * d;
    m.min_value = std::min(m.min_value, F.value(x));
  }
  m.probes = static_cast<int>(dirs.size());
  m.margin = m.min_value - geom.rho;
  return m;
}

namespace {

struct Band {
  const TargetFunctional& F;
  const Weight& w;
  const Vec& base;

  double value(const Vec& rel) const {
    try {
      return F.value(Vec(base + rel));
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  }
};

std::size_t argmax_interior(const std::vector<double>& values) {
  std::size_t best = 1;
  for (std::size_t i = 2; i + 1 < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::vector<Vec> reparametrize(const std::vector<Vec>& nodes) {
  const std::size_t k = nodes.size();
  std::vector<double> s(k, 0.0);
  for (std::size_t i = 1; i < k; ++i) s[i] = s[i - 1] + (nodes[i] - nodes[i - 1]).norm();
  const double total = s.back();
  std::vector<Vec> out(k);
  out.front() = nodes.front();
  out.back() = nodes.back();
  if (!(total > 0.0)) return nodes;
  std::size_t seg = 0;
  for (std::size_t j = 1; j + 1 < k; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(k - 1);
    while (seg + 2 < k && s[seg + 1] < target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double t = len > 0.0 ? (target - s[seg]) / len : 0.0;
    out[j] = nodes[seg] + t * (nodes[seg + 1] - nodes[seg]);
  }
  return out;
}

double path_max(const std::vector<double>& values) { return *std::max_element(values.begin(), values.end()); }

}  // namespace

BandResult elastic_band(const TargetFunctional& F, const MountainPassGeometry& geom, int nodes, const Weight& w,
                        int iterations) {
  if (nodes < 16) throw ConfigError("elastic band needs at least 16 nodes");
  if (iterations < 1) throw ConfigError("elastic band needs at least one iteration");
  const Band band{F, w, geom.base};
  const Vec zero = Vec::Zero(F.map().dim);
  const double f0 = band.value(zero);
  const double fe = band.value(geom.offset);
  const double cap = geom.rho * (1.0 + 1e-9);
  if (!(f0 <= cap) || !(fe <= cap)) {
    throw PreconditionError("mountain-pass endpoints are not below rho", f0, fe, geom.rho);
  }

  BandResult out;
  auto& path = out.path.nodes;
  const auto k = static_cast<std::size_t>(nodes);
  path.resize(k);
  for (std::size_t i = 0; i < k; ++i) path[i] = geom.offset * (static_cast<double>(i) / static_cast<double>(k - 1));
  path.front() = zero;
  path.back() = geom.offset;
  std::vector<double> values(k);
  for (std::size_t i = 0; i < k; ++i) values[i] = band.value(path[i]);

  auto& wit = out.witness;
  auto record = [&](std::size_t m) {
    const Vec x = geom.base + path[m];
    wit.points.push_back(x);
    wit.f_values.push_back(values[m]);
    wit.weighted_criticalities.push_back(weighted_criticality(F, w, x));
  };

  double step = 1.0;
  const double c = 1e-4;
  for (int it = 0; it < iterations; ++it) {
    const std::size_t m = argmax_interior(values);
    record(m);
    const Vec x_abs = geom.base + path[m];
    const Vec g = F.gradient(x_abs);
    const double g2 = g.squaredNorm();
    if (!(g2 > 0.0)) break;

    // A node may move at most one mean spacing per iteration.
    double length = 0.0;
    for (std::size_t i = 1; i < k; ++i) length += (path[i] - path[i - 1]).norm();
    const double max_move = length / static_cast<double>(k - 1);
    double t = std::min(2.0 * step, max_move / std::sqrt(g2));
    bool accepted = false;
    Vec candidate;
    double cand_value = 0.0;
    while (t * std::sqrt(g2) > 1e-16 * (1.0 + x_abs.norm())) {
      candidate = path[m] - t * g;
      cand_value = band.value(candidate);
      if (cand_value <= values[m] - c * t * g2) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    step = t;
    path[m] = candidate;
    values[m] = cand_value;
    const double stepped_max = path_max(values);

    std::vector<Vec> reparam = reparametrize(path);
    std::vector<double> reparam_values(k);
    for (std::size_t i = 0; i < k; ++i) reparam_values[i] = band.value(reparam[i]);
    if (path_max(reparam_values) <= stepped_max) {
      path = std::move(reparam);
      values = std::move(reparam_values);
      ++out.reparametrizations;
    } else {
      ++out.rejected_reparametrizations;
    }
    out.level_history.push_back(path_max(values));
  }
  record(argmax_interior(values));

  wit.level = path_max(values);
  // Classify the argmax trail: drifting away from the segment, settled, or undecided.
  const Vec& last = wit.points.back();
  const double reach = 2.0 * (geom.offset.norm() + geom.radius);
  if ((last - geom.base).norm() > reach) {
    wit.classification = Classification::escaped_to_infinity;
  } else if (wit.points.size() > 8 &&
             (last - wit.points[wit.points.size() - 8]).norm() <= 1e-8 * (1.0 + last.norm())) {
    wit.classification = Classification::converged_to_critical_nonsolution;
  } else {
    wit.classification = Classification::budget_exhausted;
  }
  return out;
}

InjectivityVerdict injectivity_falsifier(const MapUnderTest& map, const Vec& y, const std::vector<Vec>& starts,
                                         const Weight& w, const InjectivityOptions& opts, Exec exec) {
  InjectivityVerdict v;
  v.solves = solve(map, y, w, starts, opts.descent, exec);
  for (const auto& run : v.solves.runs) {
    if (run.witness.classification == Classification::converged_to_solution) v.preimages.push_back(run.final_point);
  }
  const double separation = 10.0 * opts.descent.residual_tol;
  for (std::size_t i = 0; i < v.preimages.size() && !v.two_preimages_found; ++i) {
    for (std::size_t j = i + 1; j < v.preimages.size(); ++j) {
      if ((v.preimages[i] - v.preimages[j]).norm() <= separation) continue;
      const Vec u = v.preimages[i];
      const Vec e = v.preimages[j] - u;
      Openness open;
      try {
        open = estimate_openness(map, u);
      } catch (const NumericalError&) {
        continue;
      }
      double r = open.radius;
      while (r > e.norm()) r *= 0.5;
      v.two_preimages_found = true;
      v.preimages = {v.preimages[i], v.preimages[j]};
      v.geometry = MountainPassGeometry::make(u, e, r, open.alpha);
      const TargetFunctional F(map, y);
      v.margin = sphere_margin(F, *v.geometry);
      v.band = elastic_band(F, *v.geometry, opts.band_nodes, w, opts.band_iterations);
      break;
    }
  }
  return v;
}

}  // namespace ginv
