#include "ginv/hadamard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ginv {

double HadamardProfile::inf_at(double r) const {
  if (r <= 0.0) return rows.front().inf_estimate;
  if (r >= rows.back().rho) return rows.back().inf_estimate;
  const auto it = std::upper_bound(rows.begin(), rows.end(), r, [](double v, const ProfileRow& row) { return v < row.rho; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (r - lo.rho) / (hi.rho - lo.rho);
  return lo.inf_estimate + t * (hi.inf_estimate - lo.inf_estimate);
}

double HadamardProfile::varrho_at(double r) const {
  if (r <= 0.0) return 0.0;
  if (r >= rows.back().rho) return rows.back().varrho + (r - rows.back().rho) * rows.back().inf_estimate;
  const auto it = std::upper_bound(rows.begin(), rows.end(), r, [](double v, const ProfileRow& row) { return v < row.rho; });
  const auto& lo = *(it - 1);
  return lo.varrho + 0.5 * (r - lo.rho) * (lo.inf_estimate + inf_at(r));
}

HadamardProfile hadamard_profile(const MapUnderTest& map, double r_max, int shells, int per_shell, std::uint64_t seed,
                                 Exec exec) {
  if (shells < 8) throw ConfigError("hadamard profile needs at least 8 shells");
  if (per_shell < 0) throw ConfigError("per_shell must be non-negative");
  if (!(r_max > 0.0)) throw ConfigError("profile radius must be positive");

  SampleStream stream(seed, map.name, "profile");
  const std::vector<Vec> points = sample_ball(map.dim, r_max, {shells, per_shell, true}, stream);
  const std::vector<double> sigma = map_points<double>(
      points,
      [&](const Vec& x) {
        try {
          return banach_constant(map, x);
        } catch (const NumericalError&) {
          return std::numeric_limits<double>::quiet_NaN();
        }
      },
      exec);

  HadamardProfile p;
  p.samples = points.size();
  const std::size_t block = static_cast<std::size_t>(2 * map.dim + per_shell);
  ProfileRow row;
  row.rho = 0.0;
  row.inf_estimate = sigma[0];
  row.argmin = points[0];
  if (!(row.inf_estimate == row.inf_estimate)) throw NumericalError("map is not finite at the origin", points[0]);
  p.rows.push_back(row);
  for (int k = 1; k <= shells; ++k) {
    ProfileRow next = p.rows.back();
    next.rho = r_max * k / shells;
    const std::size_t offset = 1 + static_cast<std::size_t>(k - 1) * block;
    for (std::size_t j = 0; j < block; ++j) {
      const double s = sigma[offset + j];
      if (s < next.inf_estimate) {
        next.inf_estimate = s;
        next.argmin = points[offset + j];
      }
    }
    const ProfileRow& prev = p.rows.back();
    next.varrho = prev.varrho + 0.5 * (next.rho - prev.rho) * (prev.inf_estimate + next.inf_estimate);
    p.rows.push_back(std::move(next));
  }
  return p;
}

Weight derive_weight(const MapUnderTest& map, const HadamardProfile& profile) {
  const double alpha = banach_constant(map, Vec::Zero(map.dim));
  std::vector<double> rho, h;
  rho.reserve(profile.rows.size());
  h.reserve(profile.rows.size());
  for (std::size_t i = 0; i < profile.rows.size(); ++i) {
    const auto& row = profile.rows[i];
    if (!(row.inf_estimate > 0.0)) {
      throw NumericalError("Banach constant estimate reaches 0 on shell " + std::to_string(i) + " (rho = " +
                               std::to_string(row.rho) + "); weight undefined",
                           row.argmin);
    }
    rho.push_back(row.rho);
    // Rounding can push alpha / inf slightly below 1 at the origin.
    h.push_back(std::max(0.0, alpha / row.inf_estimate - 1.0));
  }
  Weight w = Weight::tabulated(WeightKind::derived_from_map, std::move(rho), std::move(h),
                               {DivergenceStatus::State::not_falsified, profile.r_max()});
  w.set_divergence(check_integral_divergence(w, profile.r_max()).status);
  return w;
}

Weight derive_weight(const MapUnderTest& map, double r_max, int shells, int per_shell, std::uint64_t seed, Exec exec) {
  return derive_weight(map, hadamard_profile(map, r_max, shells, per_shell, seed, exec));
}

double weight_integral(const Weight& w, double r) {
  if (!(r > 0.0)) return 0.0;
  constexpr int steps = 4096;
  const double dr = r / steps;
  double sum = 0.0;
  double prev = 1.0 / (1.0 + w(0.0));
  for (int i = 1; i <= steps; ++i) {
    const double cur = 1.0 / (1.0 + w(dr * i));
    sum += 0.5 * dr * (prev + cur);
    prev = cur;
  }
  return sum;
}

DivergenceCheck check_integral_divergence(const Weight& w, double r_max) {
  if (!(r_max > 0.0)) throw ConfigError("divergence radius must be positive");
  DivergenceCheck out;
  out.integral = weight_integral(w, r_max);
  out.half_integral = weight_integral(w, 0.5 * r_max);
  const double increase = (out.integral - out.half_integral) / out.half_integral;
  out.status.radius = r_max;
  out.status.state = increase < 1e-3 ? DivergenceStatus::State::falsified : DivergenceStatus::State::not_falsified;
  return out;
}

}  // namespace ginv
