#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ginv/types.hpp"

namespace ginv {

/// A C^1 map R^n -> R^n with an analytic Jacobian. Evaluation must be a pure
/// function of its input so it can be called from several threads at once.
struct MapUnderTest {
  std::string name;
  int dim = 1;
  std::function<Vec(const Vec&)> eval;
  std::function<Mat(const Vec&)> jacobian;
  /// Half-width R of the default sampling box [-R, R]^n.
  double domain_radius = 10.0;
  /// Registered as a local diffeomorphism (nonsingular Jacobian everywhere).
  bool local_diffeomorphism = true;

  Vec operator()(const Vec& x) const { return eval(x); }
};

enum class Tri { yes, no, unknown };

std::string_view to_string(Tri t);

/// Conditions of the global-inversion chain, listed in implication order:
/// isometry => expansive => uniform lower bound => integral condition =>
/// Plastock => Katriel => weighted PS => Rabier.
enum class Condition { isometry, expansive, uniform_bound, integral, plastock, katriel, star, rabier };

inline constexpr std::array<Condition, 8> kChainOrder{
    Condition::isometry, Condition::expansive, Condition::uniform_bound, Condition::integral,
    Condition::plastock, Condition::katriel,   Condition::star,          Condition::rabier};

/// Report key of a condition: "1", "2", "3", "starstar", "4", "5", "star", "6".
std::string_view condition_key(Condition c);
std::optional<Condition> condition_from_key(std::string_view key);
inline std::size_t chain_index(Condition c) { return static_cast<std::size_t>(c); }

struct Truth {
  Tri injective = Tri::unknown;
  Tri surjective = Tri::unknown;
  Tri norm_coercive = Tri::unknown;
  std::array<Tri, 8> conditions{Tri::unknown, Tri::unknown, Tri::unknown, Tri::unknown,
                                Tri::unknown, Tri::unknown, Tri::unknown, Tri::unknown};

  Tri& operator[](Condition c) { return conditions[chain_index(c)]; }
  Tri operator[](Condition c) const { return conditions[chain_index(c)]; }
};

/// First (upstream, downstream) pair with upstream = yes and downstream = no.
std::optional<std::pair<Condition, Condition>> truth_inconsistency(const Truth& t);

struct GalleryEntry {
  MapUnderTest map;
  Truth truth;
  std::string rationale;
};

/// The shipped gallery: identity, diagonal, shifted-sine, cubic-drift,
/// arctan, saturating, complex-exp.
const std::vector<GalleryEntry>& register_gallery();

const GalleryEntry* find_gallery_entry(std::string_view name);

/// Builds a map from "name" or "name:key=value,key=value" (coefficient overrides).
/// Throws ConfigError for unknown names or parameters.
MapUnderTest make_map(std::string_view spec);

MapUnderTest make_identity(int dim = 2);
MapUnderTest make_diagonal(std::vector<double> diagonal);
MapUnderTest make_shifted_sine(double slope = 2.0);
MapUnderTest make_cubic_drift(double cubic = 1.0);
MapUnderTest make_arctan();
MapUnderTest make_saturating();
MapUnderTest make_complex_exp();

/// x -> f(u + x); used to move a base point to the origin.
MapUnderTest translate(const MapUnderTest& map, const Vec& u);

struct JacobianDeviation {
  double max_deviation = 0.0;
  Vec worst_point;
};

/// Max over points and entries of |analytic - central difference| / (1 + |analytic|).
/// Throws NumericalError at the first probe point where the map is not finite.
JacobianDeviation jacobian_check(const MapUnderTest& map, const std::vector<Vec>& points, double step);

}  // namespace ginv
