#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ginv/descent_solver.hpp"
#include "ginv/hadamard.hpp"
#include "ginv/mountain_pass.hpp"

namespace ginv {

enum class Status { certified_sampled, falsified, inconclusive };
std::string_view to_string(Status s);
std::optional<Status> status_from_string(std::string_view s);

/// One replayable measurement. Quantities:
///   image_distance  |f(x) - f(u)|        domain_distance |x - u|
///   banach_constant Sur df(x)            inverse_bound   1 / Sur df(x)
///   image_norm      |f(x)|               residual_norm   |f(x) - y|
///   merit           |f(x) - y|^2 + Sur df(x)^2
struct Probe {
  std::string quantity;
  Vec x;
  std::optional<Vec> u;
  std::optional<Vec> y;
  double value = 0.0;
};

/// Recomputes a probe; throws ConfigError for an unknown quantity.
double evaluate_probe(const MapUnderTest& map, const Probe& p);
Probe make_probe(const MapUnderTest& map, std::string quantity, Vec x, std::optional<Vec> u = std::nullopt,
                 std::optional<Vec> y = std::nullopt);

/// Minimizing sequence for F_y together with the data needed to replay it.
struct SequenceEvidence {
  std::string label;
  Vec target;
  Weight weight = Weight::zero();
  CriticalSequenceWitness witness;
};

struct Verdict {
  Status status = Status::inconclusive;
  std::vector<Probe> probes;
  std::optional<SequenceEvidence> sequence;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;
  /// Sub-verdicts, e.g. dagger / ddagger for the weighted PS condition.
  std::vector<std::pair<std::string, Status>> parts;

  bool has_witness() const { return !probes.empty() || sequence.has_value(); }
  std::optional<double> metric(std::string_view name) const;
  void set_metric(std::string name, double v) { metrics.emplace_back(std::move(name), v); }
};

/// Sigma-descent on log Sur df with an acceptance constraint; the trajectory
/// holds accepted points only, so Sur df strictly decreases along it.
struct SigmaTrajectory {
  std::vector<Vec> points;
  std::vector<double> sigmas;
};
SigmaTrajectory sigma_descent(const MapUnderTest& map, const Vec& start, int iterations,
                              const std::function<bool(const Vec&)>& admissible, double floor = 1e-8);

/// Normalized descent on |f(x) - y|^2 + Sur df(x)^2. Stops once the merit is
/// below 1e-8 beyond escape_norm, or when steps underflow.
struct MeritTrajectory {
  std::vector<Vec> points;
  std::vector<double> merits;
};
MeritTrajectory merit_descent(const MapUnderTest& map, const Vec& y, const Vec& start, int iterations,
                              double escape_norm);

Verdict check_isometry(const MapUnderTest& map, double radius, int pairs, std::uint64_t seed = 42,
                       Exec exec = Exec::parallel);
/// Pairs in balls of radius R 4^k, k = 0..5; metric "alpha_estimate".
Verdict check_expansive(const MapUnderTest& map, double radius, int pairs, std::uint64_t seed = 42,
                        Exec exec = Exec::parallel);
/// Metric "alpha".
Verdict check_uniform_lower_bound(const MapUnderTest& map, double radius, int samples, std::uint64_t seed = 42,
                                  Exec exec = Exec::parallel);

struct IntegralResult {
  Verdict verdict;
  HadamardProfile profile;
  /// Absent when the Banach constant estimate reaches 0.
  std::optional<Weight> derived_weight;
};
IntegralResult check_integral_condition(const MapUnderTest& map, double r_max, int shells, int per_shell,
                                        std::uint64_t seed = 42, Exec exec = Exec::parallel);

Verdict check_plastock(const MapUnderTest& map, const std::vector<double>& radii, int per_shell,
                       std::uint64_t seed = 42, Exec exec = Exec::parallel);

struct SearchBudget {
  double radius = 10.0;
  int starts = 4;
  int iterations = 4000;
  /// Escape is suspected beyond 2 radius unless set otherwise.
  DescentConfig descent = [] {
    DescentConfig d;
    d.escape_norm = 20.0;
    return d;
  }();
};

Verdict check_katriel(const MapUnderTest& map, const Vec& y, const std::vector<double>& levels, int per_level,
                      const SearchBudget& budget, std::uint64_t seed = 42, Exec exec = Exec::parallel);

/// Without y, targets are 0 plus the accumulation images found by unconstrained sigma-descent.
Verdict check_rabier(const MapUnderTest& map, const std::optional<Vec>& y, const SearchBudget& budget,
                     std::uint64_t seed = 42, Exec exec = Exec::parallel);

struct StarOptions {
  SearchBudget search{};
  int band_nodes = 64;
  int band_iterations = 5000;
};

/// Default target grid: 11 points of [-3, 3] for n = 1, a 5 x 5 grid of [-3, 3]^2 for n = 2,
/// the 2n + 1 points 0, +-3 e_i otherwise.
std::vector<Vec> default_target_grid(int dim);

Verdict check_star(const MapUnderTest& map, const Weight& w, const std::vector<Vec>& y_grid, const StarOptions& opts,
                   std::uint64_t seed = 42, Exec exec = Exec::parallel);

enum class WeightChoice { derived, zero, cerami, custom };

struct CriteriaOptions {
  /// Map identifier written to the report; defaults to the map name.
  std::string map_spec;
  /// 0 means the map's domain radius.
  double radius = 0.0;
  int samples = 256;
  std::uint64_t seed = 42;
  /// 0 means 2 R.
  double profile_radius = 0.0;
  int profile_shells = 64;
  int profile_per_shell = 16;
  int plastock_per_shell = 8;
  std::vector<double> katriel_levels{0.25, 0.5, 1.0, 2.0, 4.0};
  int katriel_per_level = 256;
  /// Target for conditions 5 and 6; 5 uses 0 and 6 searches for targets when absent.
  std::optional<Vec> target;
  /// Target grid of the weighted PS check; default_target_grid when empty.
  std::vector<Vec> star_targets;
  WeightChoice weight = WeightChoice::derived;
  std::optional<Weight> custom_weight;
  int starts = 4;
  int search_iterations = 4000;
  double residual_tol = 1e-10;
  /// 0 means 2 R.
  double escape_norm = 0.0;
  int band_nodes = 64;
  int band_iterations = 5000;
  std::vector<Condition> criteria{kChainOrder.begin(), kChainOrder.end()};
  Exec exec = Exec::parallel;
};

struct ReviewNote {
  Condition falsified;
  Condition certified;
};

struct CriteriaReport {
  std::string map_name;
  std::array<std::optional<Verdict>, 8> verdicts{};
  double radius = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::optional<HadamardProfile> profile;
  std::optional<Weight> derived_weight;
  /// Weight actually used by the weighted PS check.
  std::optional<Weight> star_weight;
  /// Falsified upstream next to an independently certified downstream condition.
  std::vector<ReviewNote> review_notes;

  const std::optional<Verdict>& operator[](Condition c) const { return verdicts[chain_index(c)]; }
  std::optional<Verdict>& operator[](Condition c) { return verdicts[chain_index(c)]; }
};

CriteriaReport evaluate_criteria(const MapUnderTest& map, const CriteriaOptions& opts = {});

struct Anomaly {
  std::string map;
  Condition upstream;
  Condition downstream;
  /// "chain" or "equivalence".
  std::string kind;
};

/// Chain anomalies: upstream certified_sampled with a falsified downstream
/// condition. Equivalence anomalies: one of {4, 5, star, 6} falsified while
/// another is certified.
std::vector<Anomaly> audit_implications(const std::vector<CriteriaReport>& reports);

}  // namespace ginv
