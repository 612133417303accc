#include "ginv/criteria_chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ginv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSigmaFloor = 1e-6;

double sigma_or_nan(const MapUnderTest& map, const Vec& x) {
  try {
    const double s = banach_constant(map, x);
    return std::isfinite(s) ? s : kNaN;
  } catch (const NumericalError&) {
    return kNaN;
  }
}

std::optional<Vec> image(const MapUnderTest& map, const Vec& x) {
  Vec v = map(x);
  if (!all_finite(v)) return std::nullopt;
  return v;
}

double residual_or_nan(const MapUnderTest& map, const Vec& x, const Vec& y) {
  const auto fx = image(map, x);
  return fx ? (*fx - y).norm() : kNaN;
}

double merit_or_nan(const MapUnderTest& map, const Vec& x, const Vec& y) {
  const double r = residual_or_nan(map, x, y);
  const double s = sigma_or_nan(map, x);
  return r * r + s * s;
}

/// Keeps the last `count` entries of a trajectory.
std::size_t tail_start(std::size_t size, std::size_t count) { return size > count ? size - count : 0; }

std::vector<Vec> random_starts(int dim, double radius, int count, SampleStream& stream) {
  std::vector<Vec> starts{Vec::Zero(dim)};
  for (int i = 0; i < count; ++i) starts.push_back(stream.in_ball(dim, radius));
  return starts;
}

bool close_rel(double a, double b, double rel) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= rel * scale;
}

}  // namespace

std::string_view to_string(Status s) {
  switch (s) {
    case Status::certified_sampled: return "certified_sampled";
    case Status::falsified: return "falsified";
    case Status::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::optional<Status> status_from_string(std::string_view s) {
  for (Status v : {Status::certified_sampled, Status::falsified, Status::inconclusive}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::optional<double> Verdict::metric(std::string_view name) const {
  for (const auto& [k, v] : metrics) {
    if (k == name) return v;
  }
  return std::nullopt;
}

double evaluate_probe(const MapUnderTest& map, const Probe& p) {
  auto need_u = [&]() -> const Vec& {
    if (!p.u) throw ConfigError("probe '" + p.quantity + "' needs u");
    return *p.u;
  };
  auto need_y = [&]() -> const Vec& {
    if (!p.y) throw ConfigError("probe '" + p.quantity + "' needs y");
    return *p.y;
  };
  if (p.quantity == "image_distance") return (map(p.x) - map(need_u())).norm();
  if (p.quantity == "domain_distance") return (p.x - need_u()).norm();
  if (p.quantity == "banach_constant") return banach_constant(map, p.x);
  if (p.quantity == "inverse_bound") return 1.0 / banach_constant(map, p.x);
  if (p.quantity == "image_norm") return map(p.x).norm();
  if (p.quantity == "residual_norm") return (map(p.x) - need_y()).norm();
  if (p.quantity == "merit") {
    const double r = (map(p.x) - need_y()).norm();
    const double s = banach_constant(map, p.x);
    return r * r + s * s;
  }
  throw ConfigError("unknown probe quantity '" + p.quantity + "'");
}

Probe make_probe(const MapUnderTest& map, std::string quantity, Vec x, std::optional<Vec> u, std::optional<Vec> y) {
  Probe p{std::move(quantity), std::move(x), std::move(u), std::move(y), 0.0};
  p.value = evaluate_probe(map, p);
  return p;
}

SigmaTrajectory sigma_descent(const MapUnderTest& map, const Vec& start, int iterations,
                              const std::function<bool(const Vec&)>& admissible, double floor) {
  SigmaTrajectory t;
  Vec x = start;
  double s = sigma_or_nan(map, x);
  if (!(s > 0.0)) return t;
  t.points.push_back(x);
  t.sigmas.push_back(s);
  double step = 0.1 * (1.0 + x.norm());
  const int n = map.dim;
  for (int it = 0; it < iterations && s > floor; ++it) {
    const double h = 1e-6 * (1.0 + x.norm());
    Vec g(n);
    for (int i = 0; i < n; ++i) {
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      g[i] = (std::log(sigma_or_nan(map, xp)) - std::log(sigma_or_nan(map, xm))) / (2.0 * h);
    }
    const double gn = g.norm();
    if (!std::isfinite(gn) || gn == 0.0) break;
    const Vec xn = x - (step / gn) * g;
    const double sn = sigma_or_nan(map, xn);
    if (sn < s && admissible(xn)) {
      x = xn;
      s = sn;
      t.points.push_back(x);
      t.sigmas.push_back(s);
      step *= 2.0;
    } else {
      step *= 0.5;
      if (step < 1e-12 * (1.0 + x.norm())) break;
    }
  }
  return t;
}

MeritTrajectory merit_descent(const MapUnderTest& map, const Vec& y, const Vec& start, int iterations,
                              double escape_norm) {
  MeritTrajectory t;
  Vec x = start;
  double m = merit_or_nan(map, x, y);
  if (!std::isfinite(m)) return t;
  t.points.push_back(x);
  t.merits.push_back(m);
  double step = 0.1 * (1.0 + x.norm());
  const int n = map.dim;
  for (int it = 0; it < iterations; ++it) {
    if (m < 1e-8 && x.norm() > escape_norm) break;
    const double h = 1e-6 * (1.0 + x.norm());
    Vec g(n);
    for (int i = 0; i < n; ++i) {
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      g[i] = (merit_or_nan(map, xp, y) - merit_or_nan(map, xm, y)) / (2.0 * h);
    }
    const double gn = g.norm();
    if (!std::isfinite(gn) || gn == 0.0) break;
    const Vec xn = x - (step / gn) * g;
    const double mn = merit_or_nan(map, xn, y);
    if (mn < m) {
      x = xn;
      m = mn;
      t.points.push_back(x);
      t.merits.push_back(m);
      step *= 2.0;
    } else {
      step *= 0.5;
      if (step < 1e-14 * (1.0 + x.norm())) break;
    }
  }
  return t;
}

Verdict check_isometry(const MapUnderTest& map, double radius, int pairs, std::uint64_t seed, Exec exec) {
  if (pairs < 2) throw ConfigError("isometry check needs at least 2 pairs");
  SampleStream stream(seed, map.name, condition_key(Condition::isometry));
  std::vector<Vec> xs, us;
  for (int i = 0; i < pairs; ++i) {
    xs.push_back(stream.in_ball(map.dim, radius));
    us.push_back(stream.in_ball(map.dim, radius));
  }
  const auto excess = map_index<double>(
      xs.size(),
      [&](std::size_t i) {
        const auto fx = image(map, xs[i]);
        const auto fu = image(map, us[i]);
        if (!fx || !fu) return kNaN;
        const double d = (xs[i] - us[i]).norm();
        return std::abs((*fx - *fu).norm() - d) - 1e-9 * (1.0 + d);
      },
      exec);

  Verdict v;
  double worst = -std::numeric_limits<double>::infinity();
  std::ptrdiff_t first = -1;
  for (std::size_t i = 0; i < excess.size(); ++i) {
    if (!(excess[i] == excess[i])) continue;
    worst = std::max(worst, excess[i]);
    if (excess[i] > 0.0 && first < 0) first = static_cast<std::ptrdiff_t>(i);
  }
  v.set_metric("pairs", pairs);
  v.set_metric("max_excess", worst);
  if (first >= 0) {
    const auto i = static_cast<std::size_t>(first);
    v.status = Status::falsified;
    v.detail = "distance not preserved";
    v.probes.push_back(make_probe(map, "image_distance", xs[i], us[i]));
    v.probes.push_back(make_probe(map, "domain_distance", xs[i], us[i]));
  } else {
    v.status = Status::certified_sampled;
  }
  return v;
}

Verdict check_expansive(const MapUnderTest& map, double radius, int pairs, std::uint64_t seed, Exec exec) {
  if (pairs < 2) throw ConfigError("expansive check needs at least 2 pairs");
  SampleStream stream(seed, map.name, condition_key(Condition::expansive));
  Verdict v;
  std::vector<double> minima;
  double r = radius;
  for (int k = 0; k <= 5; ++k, r *= 4.0) {
    std::vector<Vec> xs, us;
    for (int i = 0; i < pairs; ++i) {
      Vec x = stream.in_ball(map.dim, r);
      Vec u = stream.in_ball(map.dim, r);
      while ((x - u).norm() == 0.0) u = stream.in_ball(map.dim, r);
      xs.push_back(std::move(x));
      us.push_back(std::move(u));
    }
    const Extremum e = min_index(
        xs.size(),
        [&](std::size_t i) {
          const auto fx = image(map, xs[i]);
          const auto fu = image(map, us[i]);
          if (!fx || !fu) return kNaN;
          return (*fx - *fu).norm() / (xs[i] - us[i]).norm();
        },
        exec);
    if (!e.found()) break;
    minima.push_back(e.value);
    if (e.value < kSigmaFloor) {
      const auto i = static_cast<std::size_t>(e.index);
      v.status = Status::falsified;
      v.detail = "ratio below 1e-6 at radius " + std::to_string(r);
      v.probes.push_back(make_probe(map, "image_distance", xs[i], us[i]));
      v.probes.push_back(make_probe(map, "domain_distance", xs[i], us[i]));
      v.set_metric("alpha_estimate", e.value);
      v.set_metric("radius", r);
      return v;
    }
  }
  if (minima.empty()) {
    v.detail = "no finite pair";
    return v;
  }
  v.set_metric("alpha_estimate", *std::min_element(minima.begin(), minima.end()));
  v.set_metric("radius", radius * std::pow(4.0, static_cast<double>(minima.size() - 1)));
  if (minima.back() < 0.9 * minima.front()) {
    v.status = Status::inconclusive;
    v.detail = "ratio decreases as the radius grows";
  } else {
    v.status = Status::certified_sampled;
  }
  return v;
}

Verdict check_uniform_lower_bound(const MapUnderTest& map, double radius, int samples, std::uint64_t seed,
                                  Exec exec) {
  const ShellSampling sampling{32, std::max(1, samples / 32), true};
  const auto sigma = [&](const Vec& x) { return sigma_or_nan(map, x); };
  SampleStream full(seed, map.name, condition_key(Condition::uniform_bound));
  SampleStream half(seed, map.name, "3-half");
  const BallExtremum outer = ball_minimum(map.dim, radius, sampling, full, sigma, exec);
  const BallExtremum inner = ball_minimum(map.dim, 0.5 * radius, sampling, half, sigma, exec);

  Verdict v;
  if (outer.argument.size() == 0) {
    v.detail = "no finite sample";
    return v;
  }
  v.set_metric("alpha", outer.value);
  v.set_metric("alpha_half_ball", inner.value);
  if (outer.value < kSigmaFloor) {
    v.status = Status::falsified;
    v.detail = "Banach constant below 1e-6";
    v.probes.push_back(make_probe(map, "banach_constant", outer.argument));
  } else if (!outer.stable) {
    v.detail = "minimum not stable under sample doubling";
  } else if (outer.value < 0.9 * inner.value) {
    v.detail = "minimum decreases towards the boundary";
  } else {
    v.status = Status::certified_sampled;
  }
  return v;
}

IntegralResult check_integral_condition(const MapUnderTest& map, double r_max, int shells, int per_shell,
                                        std::uint64_t seed, Exec exec) {
  IntegralResult out{{}, hadamard_profile(map, r_max, shells, per_shell, seed, exec), std::nullopt};
  const HadamardProfile& p = out.profile;
  Verdict& v = out.verdict;
  const double full = p.varrho_at(r_max);
  const double half = p.varrho_at(0.5 * r_max);
  const double increase = half > 0.0 ? (full - half) / half : 0.0;
  v.set_metric("varrho", full);
  v.set_metric("varrho_half", half);
  v.set_metric("relative_increase", increase);
  v.set_metric("inf_estimate", p.rows.back().inf_estimate);
  if (increase < 1e-3) {
    v.status = Status::falsified;
    v.detail = "integral has converged over the last doubling";
    const auto& mid = p.rows[p.rows.size() / 2];
    v.probes.push_back(make_probe(map, "banach_constant", mid.argmin));
    v.probes.push_back(make_probe(map, "banach_constant", p.rows.back().argmin));
  } else if (increase >= 0.1) {
    v.status = Status::certified_sampled;
  } else {
    v.detail = "integral still growing but slowly";
  }
  try {
    out.derived_weight = derive_weight(map, p);
  } catch (const NumericalError&) {
    out.derived_weight.reset();
  }
  return out;
}

Verdict check_plastock(const MapUnderTest& map, const std::vector<double>& radii, int per_shell, std::uint64_t seed,
                       Exec exec) {
  if (radii.size() < 2) throw ConfigError("coercivity probe needs at least two radii");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1]) || !(radii[0] > 0.0)) throw ConfigError("radii must be positive and increasing");
  }
  Verdict v;
  Status bounded = Status::certified_sampled;
  Status coercive = Status::certified_sampled;
  const auto sigma = [&](const Vec& x) { return sigma_or_nan(map, x); };

  double sup_inverse = 0.0;
  for (std::size_t k = 0; k < radii.size() && bounded != Status::falsified; ++k) {
    SampleStream stream(seed, map.name, "4-ball-" + std::to_string(k));
    const BallExtremum e = ball_minimum(map.dim, radii[k], {16, std::max(1, per_shell), true}, stream, sigma, exec);
    if (e.argument.size() == 0) {
      bounded = Status::inconclusive;
      continue;
    }
    if (!(e.value > 0.0)) {
      bounded = Status::falsified;
      v.probes.push_back(make_probe(map, "banach_constant", e.argument));
      v.detail = "singular Jacobian inside the ball";
      break;
    }
    sup_inverse = std::max(sup_inverse, 1.0 / e.value);
    if (!e.stable) bounded = Status::inconclusive;
  }
  v.set_metric("sup_inverse_norm", sup_inverse);

  std::vector<Vec> dirs = sphere_directions(map.dim, 32 * map.dim);
  if (map.dim > 2) {
    for (int i = 0; i < map.dim; ++i) {
      for (double s : {1.0, -1.0}) {
        Vec d = Vec::Zero(map.dim);
        d[i] = s;
        dirs.push_back(d);
      }
    }
  }
  double prev_min = kNaN;
  Vec prev_arg;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const Extremum e = min_over(
        dirs,
        [&](const Vec& d) {
          const auto fx = image(map, Vec(radii[k] * d));
          return fx ? fx->norm() : kNaN;
        },
        exec);
    if (!e.found()) {
      coercive = Status::inconclusive;
      break;
    }
    const Vec arg = radii[k] * dirs[static_cast<std::size_t>(e.index)];
    v.set_metric("min_image_norm_" + std::to_string(k), e.value);
    if (k > 0 && e.value < 1.05 * prev_min) {
      coercive = Status::falsified;
      v.probes.push_back(make_probe(map, "image_norm", prev_arg));
      v.probes.push_back(make_probe(map, "image_norm", arg));
      v.detail = "min |f| on spheres plateaus between radius " + std::to_string(radii[k - 1]) + " and " +
                 std::to_string(radii[k]);
      break;
    }
    prev_min = e.value;
    prev_arg = arg;
  }
  v.parts = {{"boundedness", bounded}, {"coercivity", coercive}};
  if (bounded == Status::falsified || coercive == Status::falsified) {
    v.status = Status::falsified;
  } else if (bounded == Status::certified_sampled && coercive == Status::certified_sampled) {
    v.status = Status::certified_sampled;
  } else {
    v.status = Status::inconclusive;
  }
  return v;
}

Verdict check_katriel(const MapUnderTest& map, const Vec& y, const std::vector<double>& levels, int per_level,
                      const SearchBudget& budget, std::uint64_t seed, Exec exec) {
  if (levels.empty()) throw ConfigError("no sublevel radii given");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i] > levels[i - 1])) throw ConfigError("sublevel radii must be increasing");
  }
  if (y.size() != map.dim) throw ConfigError("target dimension does not match the map");
  SampleStream stream(seed, map.name, condition_key(Condition::katriel));

  // Candidate pool: solver trajectories first, then rejection samples in growing balls.
  std::vector<Vec> pool;
  const auto starts = random_starts(map.dim, budget.radius, budget.starts, stream);
  const SolveReport rep = solve(map, y, Weight::zero(), starts, budget.descent, exec);
  for (const auto& run : rep.runs) {
    pool.insert(pool.end(), run.witness.points.begin(), run.witness.points.end());
    pool.push_back(run.final_point);
  }
  const std::size_t cached = pool.size();
  std::vector<bool> first_half(cached, true);
  for (int k = 0; k < 4; ++k) {
    const double r = budget.radius * std::ldexp(1.0, k);
    for (int j = 0; j < 2 * per_level; ++j) {
      pool.push_back(stream.in_ball(map.dim, r));
      first_half.push_back(j < per_level);
    }
  }
  struct Eval {
    double residual, sigma;
  };
  const auto evals =
      map_points<Eval>(pool, [&](const Vec& x) { return Eval{residual_or_nan(map, x, y), sigma_or_nan(map, x)}; }, exec);

  Verdict v;
  bool all_certified = true;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const double level = levels[l];
    double inf_half = std::numeric_limits<double>::infinity();
    double inf_full = inf_half;
    std::ptrdiff_t arg = -1;
    std::vector<std::size_t> admissible;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!(evals[i].residual < level) || !(evals[i].sigma == evals[i].sigma)) continue;
      admissible.push_back(i);
      if (first_half[i]) inf_half = std::min(inf_half, evals[i].sigma);
      if (evals[i].sigma < inf_full) {
        inf_full = evals[i].sigma;
        arg = static_cast<std::ptrdiff_t>(i);
      }
    }
    const std::string tag = "level_" + std::to_string(l);
    if (admissible.empty()) {
      v.set_metric(tag + "_inf", kNaN);
      all_certified = false;
      continue;
    }
    // Directed search from the three admissible points of smallest Banach constant.
    std::stable_sort(admissible.begin(), admissible.end(),
                     [&](std::size_t a, std::size_t b) { return evals[a].sigma < evals[b].sigma; });
    const auto inside = [&](const Vec& x) { return residual_or_nan(map, x, y) < level; };
    SigmaTrajectory best;
    for (std::size_t s = 0; s < std::min<std::size_t>(3, admissible.size()); ++s) {
      SigmaTrajectory t = sigma_descent(map, pool[admissible[s]], budget.iterations, inside);
      if (!t.sigmas.empty() && (best.sigmas.empty() || t.sigmas.back() < best.sigmas.back())) best = std::move(t);
    }
    const double directed = best.sigmas.empty() ? inf_full : best.sigmas.back();
    const double est_half = std::min(inf_half, directed);
    const double est_full = std::min(inf_full, directed);
    v.set_metric(tag + "_inf", est_full);
    if (est_full < kSigmaFloor) {
      v.status = Status::falsified;
      v.detail = "Banach constant tends to 0 inside the sublevel set |f(x) - y| < " + std::to_string(level);
      if (directed <= inf_full && best.points.size() > 1) {
        for (std::size_t i = tail_start(best.points.size(), 8); i < best.points.size(); ++i) {
          v.probes.push_back(make_probe(map, "residual_norm", best.points[i], std::nullopt, y));
          v.probes.push_back(make_probe(map, "banach_constant", best.points[i]));
        }
      } else {
        const Vec& x = pool[static_cast<std::size_t>(arg)];
        v.probes.push_back(make_probe(map, "residual_norm", x, std::nullopt, y));
        v.probes.push_back(make_probe(map, "banach_constant", x));
      }
      v.set_metric("level", level);
      return v;
    }
    if (!close_rel(est_half, est_full, 0.05)) all_certified = false;
  }
  v.status = all_certified ? Status::certified_sampled : Status::inconclusive;
  if (!all_certified) v.detail = "some level is empty or unstable";
  return v;
}

Verdict check_rabier(const MapUnderTest& map, const std::optional<Vec>& y, const SearchBudget& budget,
                     std::uint64_t seed, Exec exec) {
  SampleStream stream(seed, map.name, condition_key(Condition::rabier));
  const auto starts = random_starts(map.dim, budget.radius, budget.starts, stream);
  std::vector<Vec> targets;
  if (y) {
    if (y->size() != map.dim) throw ConfigError("target dimension does not match the map");
    targets.push_back(*y);
  } else {
    targets.push_back(Vec::Zero(map.dim));
    const auto anywhere = [](const Vec&) { return true; };
    const auto trails = map_points<SigmaTrajectory>(
        starts, [&](const Vec& s) { return sigma_descent(map, s, budget.iterations, anywhere); }, exec);
    for (const auto& t : trails) {
      if (t.points.size() < 2 || !(t.sigmas.back() < kSigmaFloor)) continue;
      const auto last = image(map, t.points.back());
      const auto prev = image(map, t.points[t.points.size() - 2]);
      if (!last || !prev || (*last - *prev).norm() > 1e-3 * (1.0 + last->norm())) continue;
      const bool seen = std::any_of(targets.begin(), targets.end(),
                                    [&](const Vec& q) { return (q - *last).norm() <= 1e-6 * (1.0 + q.norm()); });
      if (!seen) targets.push_back(*last);
    }
  }

  Verdict v;
  const double escape = budget.descent.escape_norm;
  double smallest = std::numeric_limits<double>::infinity();
  for (const Vec& target : targets) {
    const auto trails = map_points<MeritTrajectory>(
        starts, [&](const Vec& s) { return merit_descent(map, target, s, budget.iterations, escape); }, exec);
    for (std::size_t k = 0; k < trails.size(); ++k) {
      const auto& t = trails[k];
      if (t.merits.empty()) continue;
      smallest = std::min(smallest, t.merits.back());
      const Vec& end = t.points.back();
      if (t.merits.back() < 1e-8 && end.norm() > escape && end.norm() > starts[k].norm()) {
        v.status = Status::falsified;
        v.detail = "f(x_n) -> y while Sur df(x_n) -> 0 along an unbounded trajectory";
        for (std::size_t i = tail_start(t.points.size(), 12); i < t.points.size(); ++i) {
          v.probes.push_back(make_probe(map, "merit", t.points[i], std::nullopt, target));
          v.probes.push_back(make_probe(map, "banach_constant", t.points[i]));
        }
        v.set_metric("final_merit", t.merits.back());
        v.set_metric("final_norm", end.norm());
        v.set_metric("targets", static_cast<double>(targets.size()));
        return v;
      }
    }
  }
  v.set_metric("smallest_merit", smallest);
  v.set_metric("targets", static_cast<double>(targets.size()));
  if (smallest >= kSigmaFloor) {
    v.status = Status::certified_sampled;
  } else {
    v.detail = "merit approaches 0 without an unbounded trajectory";
  }
  return v;
}

std::vector<Vec> default_target_grid(int dim) {
  std::vector<Vec> grid;
  if (dim == 1) {
    for (int i = 0; i <= 10; ++i) grid.push_back(Vec::Constant(1, -3.0 + 0.6 * i));
  } else if (dim == 2) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        Vec y(2);
        y << -3.0 + 1.5 * i, -3.0 + 1.5 * j;
        grid.push_back(y);
      }
    }
  } else {
    grid.push_back(Vec::Zero(dim));
    for (int i = 0; i < dim; ++i) {
      for (double s : {3.0, -3.0}) {
        Vec y = Vec::Zero(dim);
        y[i] = s;
        grid.push_back(y);
      }
    }
  }
  return grid;
}

Verdict check_star(const MapUnderTest& map, const Weight& w, const std::vector<Vec>& y_grid, const StarOptions& opts,
                   std::uint64_t seed, Exec exec) {
  if (y_grid.empty()) throw ConfigError("weighted PS check needs at least one target");
  SampleStream stream(seed, map.name, condition_key(Condition::star));
  const auto starts = random_starts(map.dim, opts.search.radius, opts.search.starts, stream);
  const DescentConfig& cfg = opts.search.descent;
  constexpr double kZeroLevel = 1e-8;

  std::optional<SequenceEvidence> dagger, ddagger;
  bool all_converged = true;
  bool distinct_solutions = false;
  int runs = 0, converged = 0;
  for (const Vec& y : y_grid) {
    if (y.size() != map.dim) throw ConfigError("target dimension does not match the map");
    const SolveReport rep = solve(map, y, w, starts, cfg, exec);
    std::vector<Vec> solutions;
    for (const auto& run : rep.runs) {
      ++runs;
      const auto& wit = run.witness;
      if (wit.classification == Classification::converged_to_solution) {
        ++converged;
        solutions.push_back(run.final_point);
        continue;
      }
      all_converged = false;
      const bool escaped = wit.classification == Classification::escaped_to_infinity;
      const bool stalled = wit.classification == Classification::budget_exhausted &&
                           !wit.weighted_criticalities.empty() && wit.weighted_criticalities.back() <= 1e-4;
      if (wit.level > kZeroLevel && (escaped || stalled)) {
        const bool upgrade = dagger && escaped && dagger->witness.classification != Classification::escaped_to_infinity;
        if (!dagger || upgrade) dagger = SequenceEvidence{"dagger", y, w, wit};
      } else if (escaped && !ddagger) {
        ddagger = SequenceEvidence{"ddagger", y, w, wit};
      }
    }
    // Two distinct preimages: the mountain-pass sequence is a dagger witness.
    for (std::size_t i = 0; i < solutions.size() && !dagger; ++i) {
      for (std::size_t j = i + 1; j < solutions.size() && !dagger; ++j) {
        const Vec e = solutions[j] - solutions[i];
        if (e.norm() <= 10.0 * cfg.residual_tol) continue;
        distinct_solutions = true;
        try {
          const Openness open = estimate_openness(map, solutions[i]);
          double r = open.radius;
          while (r > e.norm()) r *= 0.5;
          const auto geom = MountainPassGeometry::make(solutions[i], e, r, open.alpha);
          const TargetFunctional F(map, y);
          BandResult band = elastic_band(F, geom, opts.band_nodes, w, opts.band_iterations);
          if (band.witness.level >= geom.rho * (1.0 - 1e-9)) {
            dagger = SequenceEvidence{"mountain_pass", y, w, std::move(band.witness)};
          }
        } catch (const NumericalError&) {
        } catch (const PreconditionError&) {
        }
      }
    }
  }

  Verdict v;
  const Status dag = dagger ? Status::falsified
                            : (all_converged && !distinct_solutions ? Status::certified_sampled : Status::inconclusive);
  const Status ddag = ddagger ? Status::falsified : (all_converged ? Status::certified_sampled : Status::inconclusive);
  v.parts = {{"dagger", dag}, {"ddagger", ddag}};
  if (dag == Status::falsified || ddag == Status::falsified) {
    v.status = Status::falsified;
  } else if (dag == Status::certified_sampled && ddag == Status::certified_sampled) {
    v.status = Status::certified_sampled;
  } else {
    v.status = Status::inconclusive;
  }
  if (dagger) {
    v.sequence = std::move(dagger);
    v.detail = "minimizing sequence at a positive level without a convergent subsequence";
  } else if (ddagger) {
    v.sequence = std::move(ddagger);
    v.detail = "minimizing sequence at level 0 escapes to infinity";
  } else if (v.status == Status::inconclusive) {
    v.detail = "some runs neither converged nor produced a witness";
  }
  v.set_metric("targets", static_cast<double>(y_grid.size()));
  v.set_metric("runs", runs);
  v.set_metric("converged_runs", converged);
  return v;
}

CriteriaReport evaluate_criteria(const MapUnderTest& map, const CriteriaOptions& opts) {
  CriteriaReport rep;
  rep.map_name = opts.map_spec.empty() ? map.name : opts.map_spec;
  const double R = opts.radius > 0.0 ? opts.radius : map.domain_radius;
  rep.radius = R;
  rep.samples = opts.samples;
  rep.seed = opts.seed;
  auto wanted = [&](Condition c) {
    return std::find(opts.criteria.begin(), opts.criteria.end(), c) != opts.criteria.end();
  };

  SearchBudget budget;
  budget.radius = R;
  budget.starts = opts.starts;
  budget.iterations = opts.search_iterations;
  budget.descent.residual_tol = opts.residual_tol;
  budget.descent.escape_norm = opts.escape_norm > 0.0 ? opts.escape_norm : 2.0 * R;

  const bool need_profile =
      wanted(Condition::integral) || (wanted(Condition::star) && opts.weight == WeightChoice::derived);
  if (need_profile) {
    const double r_max = opts.profile_radius > 0.0 ? opts.profile_radius : 2.0 * R;
    IntegralResult ir =
        check_integral_condition(map, r_max, opts.profile_shells, opts.profile_per_shell, opts.seed, opts.exec);
    if (wanted(Condition::integral)) rep[Condition::integral] = std::move(ir.verdict);
    rep.profile = std::move(ir.profile);
    rep.derived_weight = std::move(ir.derived_weight);
  }

  if (wanted(Condition::isometry)) rep[Condition::isometry] = check_isometry(map, R, opts.samples, opts.seed, opts.exec);
  if (wanted(Condition::expansive)) {
    rep[Condition::expansive] = check_expansive(map, R, opts.samples, opts.seed, opts.exec);
  }
  if (wanted(Condition::uniform_bound)) {
    rep[Condition::uniform_bound] = check_uniform_lower_bound(map, R, opts.samples, opts.seed, opts.exec);
  }
  if (wanted(Condition::plastock)) {
    const std::vector<double> radii{R / 8, R / 4, R / 2, R, 2 * R};
    rep[Condition::plastock] = check_plastock(map, radii, opts.plastock_per_shell, opts.seed, opts.exec);
  }
  if (wanted(Condition::katriel)) {
    const Vec y = opts.target.value_or(Vec::Zero(map.dim));
    rep[Condition::katriel] =
        check_katriel(map, y, opts.katriel_levels, opts.katriel_per_level, budget, opts.seed, opts.exec);
  }
  if (wanted(Condition::star)) {
    Weight w = Weight::zero();
    switch (opts.weight) {
      case WeightChoice::zero: w = Weight::zero(); break;
      case WeightChoice::cerami: w = Weight::cerami(); break;
      case WeightChoice::custom:
        if (!opts.custom_weight) throw ConfigError("custom weight requested but none given");
        w = *opts.custom_weight;
        break;
      case WeightChoice::derived:
        if (rep.derived_weight && rep.derived_weight->divergence().state != DivergenceStatus::State::falsified) {
          w = *rep.derived_weight;
        } else {
          w = Weight::cerami();
        }
        break;
    }
    StarOptions so;
    so.search = budget;
    so.band_nodes = opts.band_nodes;
    so.band_iterations = opts.band_iterations;
    std::vector<Vec> grid = opts.star_targets.empty() ? default_target_grid(map.dim) : opts.star_targets;
    rep[Condition::star] = check_star(map, w, grid, so, opts.seed, opts.exec);
    rep.star_weight = std::move(w);
  }
  if (wanted(Condition::rabier)) rep[Condition::rabier] = check_rabier(map, opts.target, budget, opts.seed, opts.exec);

  for (std::size_t i = 0; i < kChainOrder.size(); ++i) {
    const auto& up = rep.verdicts[i];
    if (!up || up->status != Status::falsified || !up->has_witness()) continue;
    for (std::size_t j = i + 1; j < kChainOrder.size(); ++j) {
      const auto& down = rep.verdicts[j];
      if (down && down->status == Status::certified_sampled) rep.review_notes.push_back({kChainOrder[i], kChainOrder[j]});
    }
  }
  return rep;
}

std::vector<Anomaly> audit_implications(const std::vector<CriteriaReport>& reports) {
  std::vector<Anomaly> out;
  static constexpr std::array<Condition, 4> kEquivalent{Condition::plastock, Condition::katriel, Condition::star,
                                                        Condition::rabier};
  for (const auto& rep : reports) {
    for (std::size_t i = 0; i < kChainOrder.size(); ++i) {
      const auto& up = rep.verdicts[i];
      if (!up || up->status != Status::certified_sampled) continue;
      for (std::size_t j = i + 1; j < kChainOrder.size(); ++j) {
        const auto& down = rep.verdicts[j];
        if (down && down->status == Status::falsified) out.push_back({rep.map_name, kChainOrder[i], kChainOrder[j], "chain"});
      }
    }
    for (Condition a : kEquivalent) {
      const auto& va = rep[a];
      if (!va || va->status != Status::certified_sampled) continue;
      for (Condition b : kEquivalent) {
        const auto& vb = rep[b];
        if (!vb || vb->status != Status::falsified) continue;
        // Pairs already reported as chain anomalies are not repeated.
        if (chain_index(a) < chain_index(b)) continue;
        out.push_back({rep.map_name, a, b, "equivalence"});
      }
    }
  }
  return out;
}

}  // namespace ginv
