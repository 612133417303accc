#include "ginv/descent_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ginv {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::converged_to_solution: return "converged_to_solution";
    case Classification::converged_to_critical_nonsolution: return "converged_to_critical_nonsolution";
    case Classification::escaped_to_infinity: return "escaped_to_infinity";
    case Classification::budget_exhausted: return "budget_exhausted";
  }
  return "budget_exhausted";
}

std::optional<Classification> classification_from_string(std::string_view s) {
  for (auto c : {Classification::converged_to_solution, Classification::converged_to_critical_nonsolution,
                 Classification::escaped_to_infinity, Classification::budget_exhausted}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::vector<double> default_criticality_targets(int count) {
  std::vector<double> eps;
  eps.reserve(static_cast<std::size_t>(count));
  for (int n = 1; n <= count; ++n) eps.push_back(std::pow(10.0, -0.5 * n));
  return eps;
}

void DescentConfig::validate() const {
  if (!(residual_tol > 0.0)) throw ConfigError("residual_tol must be positive");
  if (criticality_targets.empty()) throw ConfigError("criticality_targets must be non-empty");
  for (std::size_t i = 0; i < criticality_targets.size(); ++i) {
    if (!(criticality_targets[i] > 0.0)) throw ConfigError("criticality targets must be positive");
    if (i > 0 && !(criticality_targets[i] < criticality_targets[i - 1])) {
      throw ConfigError("criticality targets must be strictly decreasing");
    }
  }
  if (max_iters < 1) throw ConfigError("max_iters must be positive");
  if (criticality_targets.size() > static_cast<std::size_t>(max_iters)) {
    throw ConfigError("criticality schedule longer than max_iters");
  }
  if (!(escape_norm > 0.0)) throw ConfigError("escape_norm must be positive");
  if (!(f_bound_window > 0.0)) throw ConfigError("f_bound_window must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("armijo_c must lie in (0, 1)");
}

namespace {

struct Iterate {
  Vec x;
  double f = 0.0;
  Vec g;
  double wc = 0.0;
  double residual = 0.0;
};

Iterate evaluate(const TargetFunctional& F, const Weight& w, Vec x) {
  Iterate it;
  const Vec r = F.residual(x);
  it.residual = r.norm();
  it.f = 0.5 * r.squaredNorm();
  it.g = F.gradient(x);
  it.wc = it.g.norm() * (1.0 + w(x.norm()));
  it.x = std::move(x);
  return it;
}

class Recorder {
public:
  Recorder(CriticalSequenceWitness& w, const DescentConfig& cfg) : w_(w), cfg_(cfg) {}

  void record(const Iterate& it, bool checkpoint) {
    w_.points.push_back(it.x);
    w_.f_values.push_back(it.f);
    w_.weighted_criticalities.push_back(it.wc);
    checkpoint_flags_.push_back(checkpoint);
  }

  /// Last three checkpoints lie beyond escape_norm with strictly growing
  /// norms and F_y spread below f_bound_window.
  bool escape_pattern() const {
    const std::size_t n = w_.points.size();
    if (n < 3) return false;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double prev_norm = -1.0;
    for (std::size_t i = n - 3; i < n; ++i) {
      if (!checkpoint_flags_[i]) return false;
      const double nrm = w_.points[i].norm();
      if (!(nrm > cfg_.escape_norm) || !(nrm > prev_norm)) return false;
      prev_norm = nrm;
      lo = std::min(lo, w_.f_values[i]);
      hi = std::max(hi, w_.f_values[i]);
    }
    return hi - lo < cfg_.f_bound_window;
  }

  /// Successive recorded points have stopped moving.
  bool settled() const {
    const std::size_t n = w_.points.size();
    if (n < 2) return false;
    const Vec& a = w_.points[n - 1];
    const Vec& b = w_.points[n - 2];
    return (a - b).norm() <= 1e-8 * (1.0 + a.norm());
  }

private:
  CriticalSequenceWitness& w_;
  const DescentConfig& cfg_;
  std::vector<bool> checkpoint_flags_;
};

}  // namespace

MinimizeResult minimize(const TargetFunctional& F, const Weight& w, const DescentConfig& cfg) {
  cfg.validate();
  if (cfg.start.size() != F.map().dim) throw ConfigError("start dimension does not match map dimension");

  MinimizeResult out;
  CriticalSequenceWitness& wit = out.witness;
  Recorder rec(wit, cfg);

  Iterate cur = evaluate(F, w, cfg.start);
  std::size_t next_target = 0;
  const auto& eps = cfg.criticality_targets;
  auto advance = [&](const Iterate& it) {
    bool hit = false;
    while (next_target < eps.size() && it.wc <= eps[next_target]) {
      ++next_target;
      hit = true;
    }
    return hit;
  };
  advance(cur);
  rec.record(cur, false);

  std::optional<Classification> verdict;
  double step = 1.0;
  int iter = 0;
  const double gnorm_floor = std::numeric_limits<double>::min();

  for (; iter < cfg.max_iters; ++iter) {
    if (cur.residual <= cfg.residual_tol) {
      verdict = Classification::converged_to_solution;
      break;
    }
    if (next_target >= eps.size()) {
      out.diagnostic = "criticality schedule exhausted";
      break;
    }
    const double g2 = cur.g.squaredNorm();
    if (!(g2 > gnorm_floor)) {
      out.diagnostic = "gradient vanished";
      break;
    }

    // Armijo backtracking from a doubled warm-start step.
    double t = std::min(2.0 * step, 1e300);
    bool accepted = false;
    Iterate trial;
    while (true) {
      if (t * std::sqrt(g2) <= 1e-16 * (1.0 + cur.x.norm())) break;
      Vec x_new = cur.x - t * cur.g;
      if (all_finite(x_new)) {
        try {
          trial = evaluate(F, w, std::move(x_new));
          if (trial.f <= cur.f - cfg.armijo_c * t * g2) {
            accepted = true;
            break;
          }
        } catch (const NumericalError&) {
          // shrink and retry
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      out.diagnostic = "line search step underflow";
      break;
    }
    step = t;
    cur = std::move(trial);

    if (advance(cur)) {
      rec.record(cur, true);
      if (rec.escape_pattern()) {
        verdict = Classification::escaped_to_infinity;
        ++iter;
        break;
      }
    }
  }

  if (!verdict) {
    if (cur.residual <= cfg.residual_tol) {
      verdict = Classification::converged_to_solution;
    } else if (rec.escape_pattern()) {
      verdict = Classification::escaped_to_infinity;
    } else if ((next_target >= eps.size() || out.diagnostic == "gradient vanished") && rec.settled()) {
      verdict = Classification::converged_to_critical_nonsolution;
    } else {
      verdict = Classification::budget_exhausted;
      if (out.diagnostic.empty()) out.diagnostic = "iteration budget exhausted";
    }
  }

  wit.classification = *verdict;
  wit.level = cur.f;
  out.final_point = cur.x;
  out.final_value = cur.f;
  out.final_weighted_criticality = cur.wc;
  out.iterations = iter;
  return out;
}

bool SolveReport::all_escaped() const {
  return !runs.empty() && std::all_of(runs.begin(), runs.end(), [](const MinimizeResult& r) {
    return r.witness.classification == Classification::escaped_to_infinity;
  });
}

SolveReport solve(const MapUnderTest& map, const Vec& y, const Weight& w, const std::vector<Vec>& starts,
                  const DescentConfig& cfg, Exec exec) {
  if (starts.empty()) throw ConfigError("solve needs at least one start");
  const TargetFunctional F(map, y);
  for (const Vec& s : starts) {
    if (s.size() != map.dim) throw ConfigError("start dimension does not match map dimension");
  }

  SolveReport report;
  report.runs.resize(starts.size());
  std::vector<std::string> errors(starts.size());
  const auto n = static_cast<std::ptrdiff_t>(starts.size());
  auto run_one = [&](std::ptrdiff_t i) {
    DescentConfig c = cfg;
    c.start = starts[static_cast<std::size_t>(i)];
    try {
      report.runs[static_cast<std::size_t>(i)] = minimize(F, w, c);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  };
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) run_one(i);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) run_one(i);
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw NumericalError(errors[i], starts[i]);
  }

  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const auto cls = report.runs[i].witness.classification;
    if (cls == Classification::converged_to_critical_nonsolution) report.contradicts_local_diffeomorphism = true;
    if (cls == Classification::converged_to_solution && !report.solution) {
      report.solution = report.runs[i].final_point;
      report.solved_start = i;
    }
  }
  return report;
}

bool limit_point_consistent(const TargetFunctional& F, const CriticalSequenceWitness& witness, double tol) {
  const std::size_t n = witness.points.size();
  if (n < 2) return true;
  const Vec& last = witness.points[n - 1];
  if ((last - witness.points[n - 2]).norm() > tol * (1.0 + last.norm())) return true;
  const double smallest = *std::min_element(witness.weighted_criticalities.begin(), witness.weighted_criticalities.end());
  return criticality(F, last) <= smallest + tol;
}

}  // namespace ginv
