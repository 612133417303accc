#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ginv/parallel.hpp"
#include "ginv/variational_core.hpp"

namespace ginv {

enum class Classification { converged_to_solution, converged_to_critical_nonsolution, escaped_to_infinity, budget_exhausted };

std::string_view to_string(Classification c);
std::optional<Classification> classification_from_string(std::string_view s);

/// Default criticality schedule eps_n = 10^(-n/2), n = 1..count.
std::vector<double> default_criticality_targets(int count = 30);

struct DescentConfig {
  Vec start;
  /// Solved once |f(x) - y| <= residual_tol.
  double residual_tol = 1e-10;
  /// Strictly decreasing positive checkpoint thresholds for the weighted criticality.
  std::vector<double> criticality_targets = default_criticality_targets();
  int max_iters = 20000;
  /// Escape is suspected beyond this norm.
  double escape_norm = 1e3;
  /// Allowed spread of F_y across the checkpoints that witness an escape.
  double f_bound_window = 1e-3;
  /// Armijo sufficient-decrease constant.
  double armijo_c = 1e-4;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// Checkpointed minimizing sequence. Entry 0 is the starting point; every
/// later entry is the first iterate whose weighted criticality dropped
/// below the next threshold of the schedule.
struct CriticalSequenceWitness {
  std::vector<Vec> points;
  std::vector<double> f_values;
  std::vector<double> weighted_criticalities;
  /// Limit estimate of F_y along the sequence.
  double level = 0.0;
  Classification classification = Classification::budget_exhausted;

  std::size_t size() const noexcept { return points.size(); }
};

struct MinimizeResult {
  CriticalSequenceWitness witness;
  Vec final_point;
  double final_value = 0.0;
  double final_weighted_criticality = 0.0;
  int iterations = 0;
  std::string diagnostic;
};

/// Gradient descent with Armijo backtracking on F_y. Stops on a solution, an
/// escape pattern, an exhausted schedule, or the iteration budget.
MinimizeResult minimize(const TargetFunctional& F, const Weight& w, const DescentConfig& cfg);

struct SolveReport {
  std::optional<Vec> solution;
  std::size_t solved_start = 0;
  std::vector<MinimizeResult> runs;
  /// Some run converged to a critical point that is not a solution; for a
  /// local diffeomorphism that would force Sur df = 0 there.
  bool contradicts_local_diffeomorphism = false;

  bool all_escaped() const;
};

/// Runs minimize from each start (possibly in parallel) and returns the first
/// solution in start order. cfg.start is ignored.
SolveReport solve(const MapUnderTest& map, const Vec& y, const Weight& w, const std::vector<Vec>& starts,
                  const DescentConfig& cfg = {}, Exec exec = Exec::parallel);

/// Numerical form of the lower-semicontinuity argument: when the recorded
/// points converge, the criticality at the last point cannot exceed the
/// smallest recorded weighted criticality by more than tol.
bool limit_point_consistent(const TargetFunctional& F, const CriticalSequenceWitness& witness, double tol);

}  // namespace ginv
