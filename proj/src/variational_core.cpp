#include "ginv/variational_core.hpp"

#include <algorithm>
#include <cmath>

namespace ginv {

TargetFunctional::TargetFunctional(MapUnderTest map, Vec target) : map_(std::move(map)), target_(std::move(target)) {
  if (target_.size() != map_.dim) {
    throw ConfigError("target dimension " + std::to_string(target_.size()) + " does not match map dimension " +
                      std::to_string(map_.dim));
  }
}

Vec TargetFunctional::residual(const Vec& x) const {
  Vec r = map_(x) - target_;
  if (!all_finite(r)) throw NumericalError("map evaluation failed at " + format_vec(x), x);
  return r;
}

double TargetFunctional::value(const Vec& x) const { return 0.5 * residual(x).squaredNorm(); }

Vec TargetFunctional::gradient(const Vec& x) const {
  const Vec r = residual(x);
  const Mat j = map_.jacobian(x);
  if (!all_finite(j)) throw NumericalError("non-finite Jacobian at " + format_vec(x), x);
  Vec g = j.transpose() * r;
  if (!all_finite(g)) throw NumericalError("non-finite gradient at " + format_vec(x), x);
  return g;
}

std::string_view to_string(WeightKind k) {
  switch (k) {
    case WeightKind::zero: return "zero";
    case WeightKind::cerami: return "cerami";
    case WeightKind::derived_from_map: return "derived_from_map";
    case WeightKind::custom: return "custom";
  }
  return "custom";
}

std::string_view to_string(DivergenceStatus::State s) {
  switch (s) {
    case DivergenceStatus::State::proved: return "proved";
    case DivergenceStatus::State::not_falsified: return "not_falsified";
    case DivergenceStatus::State::falsified: return "falsified";
  }
  return "not_falsified";
}

Weight Weight::zero() {
  Weight w;
  w.kind_ = WeightKind::zero;
  w.status_ = {DivergenceStatus::State::proved, 0.0};
  return w;
}

Weight Weight::cerami() {
  Weight w;
  w.kind_ = WeightKind::cerami;
  w.status_ = {DivergenceStatus::State::proved, 0.0};
  return w;
}

Weight Weight::tabulated(WeightKind kind, std::vector<double> rho, std::vector<double> h, DivergenceStatus status) {
  if (kind == WeightKind::zero || kind == WeightKind::cerami) {
    throw ConfigError("zero and cerami weights are not tabulated");
  }
  if (rho.empty() || rho.size() != h.size()) throw ConfigError("weight grid must be non-empty with matching columns");
  if (rho.front() != 0.0) throw ConfigError("weight grid must start at rho = 0");
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!std::isfinite(rho[i]) || !std::isfinite(h[i])) throw ConfigError("weight grid entries must be finite");
    if (h[i] < 0.0) throw ConfigError("weight values must be non-negative");
    if (i > 0 && !(rho[i] > rho[i - 1])) throw ConfigError("weight grid radii must be increasing");
  }
  Weight w;
  w.kind_ = kind;
  w.status_ = status;
  w.rho_ = std::move(rho);
  w.h_ = std::move(h);
  return w;
}

double Weight::operator()(double rho) const {
  switch (kind_) {
    case WeightKind::zero: return 0.0;
    case WeightKind::cerami: return rho;
    default: break;
  }
  if (rho <= rho_.front()) return h_.front();
  if (rho >= rho_.back()) return h_.back();
  const auto it = std::upper_bound(rho_.begin(), rho_.end(), rho);
  const std::size_t hi = static_cast<std::size_t>(it - rho_.begin());
  const std::size_t lo = hi - 1;
  const double t = (rho - rho_[lo]) / (rho_[hi] - rho_[lo]);
  return h_[lo] + t * (h_[hi] - h_[lo]);
}

bool Weight::monotone_on(const std::vector<double>& grid) const {
  double prev = -1.0;
  for (double r : grid) {
    const double v = (*this)(r);
    if (!(v >= 0.0) || v < prev) return false;
    prev = v;
  }
  return true;
}

double value(const TargetFunctional& F, const Vec& x) { return F.value(x); }

double criticality(const TargetFunctional& F, const Vec& x) { return F.gradient(x).norm(); }

double weighted_criticality(const TargetFunctional& F, const Weight& w, const Vec& x) {
  return criticality(F, x) * (1.0 + w(x.norm()));
}

namespace {

constexpr Eigen::Index kSvdLimit = 64;

double inverse_power_sigma_min(const Mat& m) {
  Eigen::FullPivLU<Mat> rank_probe(m);
  if (!rank_probe.isInvertible()) return 0.0;
  const Eigen::PartialPivLU<Mat> lu(m);
  const Eigen::PartialPivLU<Mat> lu_t(Mat(m.transpose()));
  Vec v = Vec::Ones(m.cols()).normalized();
  double previous = 0.0;
  for (int it = 0; it < 1000; ++it) {
    const Vec w = lu_t.solve(v);
    Vec z = lu.solve(w);
    const double growth = z.norm();
    if (!(growth > 0.0) || !std::isfinite(growth)) return 0.0;
    v = z / growth;
    if (it > 2 && std::abs(growth - previous) <= 1e-15 * growth) break;
    previous = growth;
  }
  return (m * v).norm();
}

}  // namespace

double smallest_singular_value(const Mat& m) {
  if (m.rows() != m.cols()) throw ConfigError("smallest_singular_value expects a square matrix");
  if (!all_finite(m)) return std::numeric_limits<double>::quiet_NaN();
  if (m.cols() <= kSvdLimit) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
  }
  return inverse_power_sigma_min(m);
}

double largest_singular_value(const Mat& m) {
  if (!all_finite(m)) return std::numeric_limits<double>::quiet_NaN();
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

BanachConstant banach_constant_at(const MapUnderTest& map, const Vec& x) {
  const Mat j = map.jacobian(x);
  if (!all_finite(j)) throw NumericalError("non-finite Jacobian at " + format_vec(x), x);
  const double s = smallest_singular_value(j);
  return {s, !(s > 0.0)};
}

double norm_criticality(const Vec& z) { return (z.array() != 0.0).any() ? 1.0 : 0.0; }

double lower_bound_residual(const TargetFunctional& F, const Vec& x) {
  const Vec r = F.residual(x);
  return criticality(F, x) - banach_constant(F.map(), x) * r.norm();
}

}  // namespace ginv
