#pragma once

#include <string_view>
#include <vector>

#include "ginv/map_model.hpp"

namespace ginv {

/// F_y(x) = 1/2 |f(x) - y|^2 for a fixed target y.
class TargetFunctional {
public:
  TargetFunctional(MapUnderTest map, Vec target);

  const MapUnderTest& map() const noexcept { return map_; }
  const Vec& target() const noexcept { return target_; }

  /// f(x) - y. Throws NumericalError if f(x) is not finite.
  Vec residual(const Vec& x) const;
  double value(const Vec& x) const;
  /// df(x)^T (f(x) - y).
  Vec gradient(const Vec& x) const;

private:
  MapUnderTest map_;
  Vec target_;
};

enum class WeightKind { zero, cerami, derived_from_map, custom };
std::string_view to_string(WeightKind k);

struct DivergenceStatus {
  enum class State { proved, not_falsified, falsified };
  State state = State::not_falsified;
  /// Radius up to which the integral was examined (meaningless for proved).
  double radius = 0.0;
};
std::string_view to_string(DivergenceStatus::State s);

/// Non-decreasing h : [0, inf) -> [0, inf) used to weight the criticality
/// measure. Tabulated weights interpolate linearly and are constant beyond
/// the last grid radius.
class Weight {
public:
  static Weight zero();
  static Weight cerami();
  /// rho must be increasing and start at 0; h must be non-negative.
  static Weight tabulated(WeightKind kind, std::vector<double> rho, std::vector<double> h, DivergenceStatus status);

  double operator()(double rho) const;

  WeightKind kind() const noexcept { return kind_; }
  const DivergenceStatus& divergence() const noexcept { return status_; }
  void set_divergence(DivergenceStatus s) { status_ = s; }
  const std::vector<double>& grid_rho() const noexcept { return rho_; }
  const std::vector<double>& grid_h() const noexcept { return h_; }

  /// h(0) >= 0 and h non-decreasing over the given increasing grid.
  bool monotone_on(const std::vector<double>& grid) const;

private:
  Weight() = default;
  WeightKind kind_ = WeightKind::zero;
  DivergenceStatus status_{};
  std::vector<double> rho_;
  std::vector<double> h_;
};

double value(const TargetFunctional& F, const Vec& x);

/// |df(x)^T (f(x) - y)|, the criticality measure of the C^1 functional F_y.
double criticality(const TargetFunctional& F, const Vec& x);

/// criticality(F, x) * (1 + h(|x|)).
double weighted_criticality(const TargetFunctional& F, const Weight& w, const Vec& x);

/// Smallest singular value of a square matrix. Full SVD up to 64 columns,
/// inverse power iteration on J^T J beyond. Returns 0 for singular input.
double smallest_singular_value(const Mat& m);
double largest_singular_value(const Mat& m);

struct BanachConstant {
  double value = 0.0;
  /// Set when the Jacobian is singular: the map is not a local diffeomorphism at x.
  bool degenerate = false;
};

/// Banach constant Sur df(x) = smallest singular value of the Jacobian.
BanachConstant banach_constant_at(const MapUnderTest& map, const Vec& x);
inline double banach_constant(const MapUnderTest& map, const Vec& x) { return banach_constant_at(map, x).value; }

/// Criticality of the Euclidean norm at z: 1 away from the origin, 0 at it.
double norm_criticality(const Vec& z);

/// criticality(F, x) - Sur df(x) * |f(x) - y|; non-negative up to rounding.
double lower_bound_residual(const TargetFunctional& F, const Vec& x);

}  // namespace ginv
