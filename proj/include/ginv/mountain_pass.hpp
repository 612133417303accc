#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "ginv/descent_solver.hpp"

namespace ginv {

/// Barrier geometry around a preimage u: a sphere of radius r on which
/// F_y >= rho = alpha^2 r^2 / 2, and a second zero of F_y at u + offset.
struct MountainPassGeometry {
  Vec base;
  Vec offset;
  double radius = 0.0;
  double alpha = 0.0;
  double rho = 0.0;

  /// Fills rho from alpha and radius; throws ConfigError if |offset| < radius.
  static MountainPassGeometry make(Vec base, Vec offset, double radius, double alpha);
};

struct Openness {
  double alpha = 0.0;
  double radius = 0.0;
};

/// alpha = Sur df(u) / 2 and the largest dyadic radius in {1, 1/2, ..., 2^-20}
/// on whose sphere (32 probes) the Banach constant stays >= 3/4 Sur df(u).
/// Throws NumericalError when df(u) is singular.
Openness estimate_openness(const MapUnderTest& map, const Vec& u);

/// Unit directions used to probe spheres: +-1 for n = 1, equally spaced
/// angles for n = 2, seeded pseudo-random directions otherwise.
std::vector<Vec> sphere_directions(int dim, int count);

struct SphereMargin {
  double min_value = 0.0;
  /// min_value - rho; the barrier holds on the probes when this is >= 0.
  double margin = 0.0;
  int probes = 0;
};

/// Samples F_y at 32 n points of the sphere |x - u| = r.
SphereMargin sphere_margin(const TargetFunctional& F, const MountainPassGeometry& geom);

/// Discrete path from u to u + offset (stored relative to u).
struct PathState {
  std::vector<Vec> nodes;
  std::size_t size() const noexcept { return nodes.size(); }
};

/// Rejected band set-up; carries the measured endpoint values.
class PreconditionError : public std::invalid_argument {
public:
  PreconditionError(const std::string& what, double f_start, double f_end, double rho)
      : std::invalid_argument(what), f_start(f_start), f_end(f_end), rho(rho) {}
  double f_start, f_end, rho;
};

struct BandResult {
  /// Argmax node per iteration (absolute coordinates).
  CriticalSequenceWitness witness;
  /// Path maximum after every iteration; non-increasing.
  std::vector<double> level_history;
  PathState path;
  int reparametrizations = 0;
  int rejected_reparametrizations = 0;
};

/// Lowers the path maximum of F_y between u and u + offset: a gradient step
/// on the argmax node followed by chord-length reparametrization, endpoints
/// fixed. Throws PreconditionError if an endpoint is above rho, ConfigError if K < 16.
BandResult elastic_band(const TargetFunctional& F, const MountainPassGeometry& geom, int nodes, const Weight& w,
                        int iterations);

struct InjectivityOptions {
  DescentConfig descent{};
  int band_nodes = 64;
  int band_iterations = 20000;
};

struct InjectivityVerdict {
  bool two_preimages_found = false;
  SolveReport solves;
  std::vector<Vec> preimages;
  std::optional<MountainPassGeometry> geometry;
  std::optional<SphereMargin> margin;
  std::optional<BandResult> band;
};

/// Looks for two distinct preimages of y; if found, builds the barrier at the
/// first and runs the elastic band between them.
InjectivityVerdict injectivity_falsifier(const MapUnderTest& map, const Vec& y, const std::vector<Vec>& starts,
                                         const Weight& w, const InjectivityOptions& opts = {},
                                         Exec exec = Exec::parallel);

}  // namespace ginv
