#pragma once

// Reference computations kept apart from the library: closed forms, finite
// differences and a full-band string method.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline double central_gradient_norm(const std::function<double(const Vec&)>& F, const Vec& x, double h) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (F(xp) - F(xm)) / (2.0 * h);
  }
  return g.norm();
}

/// Smallest singular value of a 1x1 or 2x2 matrix from the eigenvalues of J^T J.
inline double sigma_min_closed_form(const Mat& j) {
  if (j.rows() == 1) return std::abs(j(0, 0));
  const Mat m = j.transpose() * j;
  const double tr = m(0, 0) + m(1, 1);
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return std::sqrt(std::max(0.0, tr / 2.0 - disc));
}

inline double bisect(const std::function<double(double)>& g, double a, double b) {
  double ga = g(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if ((gm < 0) == (ga < 0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// F = 1/2 |exp(x1) (cos x2, sin x2) - y|^2 and its gradient.
inline double complex_exp_F(const Vec& x, const Vec& y) {
  const double e = std::exp(x[0]);
  const double a = e * std::cos(x[1]) - y[0];
  const double b = e * std::sin(x[1]) - y[1];
  return 0.5 * (a * a + b * b);
}

inline Vec complex_exp_grad(const Vec& x, const Vec& y) {
  const double e = std::exp(x[0]);
  const double c = std::cos(x[1]), s = std::sin(x[1]);
  const double a = e * c - y[0], b = e * s - y[1];
  Vec g(2);
  g << a * e * c + b * e * s, -a * e * s + b * e * c;
  return g;
}

/// Full-band string method: every interior node takes an explicit gradient
/// step, then the band is redistributed at equal arclength. Returns the final
/// path maximum of F.
inline double string_method_level(const std::function<double(const Vec&)>& F,
                                  const std::function<Vec(const Vec&)>& grad, const Vec& a, const Vec& b, int nodes,
                                  int iterations, double dt) {
  std::vector<Vec> path(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) path[static_cast<std::size_t>(i)] = a + (b - a) * (double(i) / (nodes - 1));
  std::vector<double> s(path.size());
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
      Vec g = grad(path[i]);
      const double gn = g.norm();
      if (gn > 1.0) g /= gn;
      path[i] -= dt * g;
    }
    s[0] = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) s[i] = s[i - 1] + (path[i] - path[i - 1]).norm();
    std::vector<Vec> next(path.size());
    next.front() = path.front();
    next.back() = path.back();
    std::size_t seg = 0;
    for (std::size_t j = 1; j + 1 < path.size(); ++j) {
      const double target = s.back() * double(j) / double(path.size() - 1);
      while (seg + 2 < path.size() && s[seg + 1] < target) ++seg;
      const double len = s[seg + 1] - s[seg];
      const double t = len > 0 ? (target - s[seg]) / len : 0.0;
      next[j] = path[seg] + t * (path[seg + 1] - path[seg]);
    }
    path = std::move(next);
  }
  double level = 0.0;
  for (const Vec& p : path) level = std::max(level, F(p));
  return level;
}

inline std::vector<Vec> uniform_box(int dim, double half_width, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half_width, half_width);
  std::vector<Vec> out;
  for (int k = 0; k < count; ++k) {
    Vec x(dim);
    for (int i = 0; i < dim; ++i) x[i] = u(rng);
    out.push_back(x);
  }
  return out;
}

}  // namespace oracle
