#pragma once

#include <cstdint>
#include <vector>

#include "ginv/sampling.hpp"
#include "ginv/variational_core.hpp"

namespace ginv {

struct ProfileRow {
  double rho = 0.0;
  /// Running minimum of the Banach constant over the sampled ball |x| <= rho.
  double inf_estimate = 0.0;
  /// Trapezoid integral of inf_estimate from 0 to rho.
  double varrho = 0.0;
  /// Sample point where the running minimum was attained.
  Vec argmin;
};

struct HadamardProfile {
  std::vector<ProfileRow> rows;
  std::size_t samples = 0;

  double r_max() const { return rows.back().rho; }
  /// Piecewise-linear inf_estimate; constant beyond r_max.
  double inf_at(double r) const;
  /// Integral of the interpolated inf_estimate; linear extension beyond r_max.
  double varrho_at(double r) const;
};

/// Shells at rho_i = r_max i / shells; each shell samples its 2n axis probes
/// plus per_shell random points of the band (rho_{i-1}, rho_i].
HadamardProfile hadamard_profile(const MapUnderTest& map, double r_max, int shells, int per_shell,
                                 std::uint64_t seed = 42, Exec exec = Exec::parallel);

/// h = alpha / inf_estimate - 1 on the profile grid, alpha = Sur df(0).
/// Throws NumericalError naming the shell where inf_estimate reaches 0.
Weight derive_weight(const MapUnderTest& map, const HadamardProfile& profile);
Weight derive_weight(const MapUnderTest& map, double r_max, int shells, int per_shell, std::uint64_t seed = 42,
                     Exec exec = Exec::parallel);

struct DivergenceCheck {
  DivergenceStatus status;
  double integral = 0.0;
  double half_integral = 0.0;
};

/// I(r) = int_0^r d rho / (1 + h(rho)) by the trapezoid rule. Falsified when
/// I(r_max) exceeds I(r_max / 2) by less than 1e-3 relative.
DivergenceCheck check_integral_divergence(const Weight& w, double r_max);

/// Trapezoid integral of 1 / (1 + h) over [0, r].
double weight_integral(const Weight& w, double r);

}  // namespace ginv
