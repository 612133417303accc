#pragma once

#include <functional>
#include <optional>

#include "ginv/map_model.hpp"
#include "ginv/parallel.hpp"

namespace ginv {

struct Collision {
  Vec a, b;
  Vec fa, fb;
};

struct GridScanOptions {
  /// Fixed collision tolerance; 0 selects 3 |df(x)| h sqrt(n) per grid point.
  double image_tol = 0.0;
  /// Targets form a grid of target_points per axis on [-w, w]^n.
  double target_half_width = 2.0;
  int target_points = 21;
  Exec exec = Exec::parallel;
};

struct GridVerdict {
  double radius = 0.0;
  int resolution = 0;
  int dim = 0;
  bool injective_on_box = true;
  std::optional<Collision> collision;
  double covered_targets = 0.0;
  double min_f_norm_on_boundary = 0.0;
  /// Largest per-point collision tolerance used.
  double max_image_tol = 0.0;
};

/// Brute-force scan of [-R, R]^n for n <= 2. A collision is a pair more than
/// two cells apart whose images agree within both points' tolerances and
/// whose image distance is below half the smaller Banach constant times the
/// domain distance.
GridVerdict grid_scan(const MapUnderTest& map, double radius, int resolution, const GridScanOptions& opts = {});

/// Bisection for a sign change of g on [a, b]; returns t with |g(t)| <= tol.
double bisect_root_1d(const std::function<double(double)>& g, double a, double b, double tol);

}  // namespace ginv
