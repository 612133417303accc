// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// argv[1]: directory for the reports written here (default: acceptance_reports)
// argv[2]: optional directory of previously shipped reports to replay as well

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "ginv/cli.hpp"
#include "ginv/criteria_chain.hpp"
#include "ginv/hadamard.hpp"
#include "ginv/mountain_pass.hpp"
#include "ginv/test_oracle.hpp"
#include "oracles.hpp"

using namespace ginv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Outcome gradient_consistency() {
  double worst = 0.0;
  std::string worst_map;
  for (const auto& e : register_gallery()) {
    const auto xs = oracle::uniform_box(e.map.dim, e.map.domain_radius, 100, 1001);
    const auto ys = oracle::uniform_box(e.map.dim, 3.0, 100, 1002);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const TargetFunctional F(e.map, ys[k]);
      const double c = criticality(F, xs[k]);
      const double h = 1e-6 * std::max(1.0, xs[k].norm());
      const double fd = oracle::central_gradient_norm([&](const Vec& x) { return value(F, x); }, xs[k], h);
      const double rel = std::abs(c - fd) / std::max(1.0, c);
      if (rel > worst) {
        worst = rel;
        worst_map = e.map.name;
      }
    }
  }
  return {worst <= 1e-5, fmt("worst relative deviation %.2e", worst) + " (" + worst_map + ")"};
}

Outcome claim_one() {
  int violations = 0, total = 0;
  double worst = 0.0;
  for (const auto& e : register_gallery()) {
    const auto xs = oracle::uniform_box(e.map.dim, e.map.domain_radius, 1000, 2001);
    const auto ys = oracle::uniform_box(e.map.dim, 3.0, 1000, 2002);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const TargetFunctional F(e.map, ys[k]);
      const double lhs = criticality(F, xs[k]);
      const double rhs = banach_constant(e.map, xs[k]) * F.residual(xs[k]).norm();
      // rounding in both sides scales with their magnitude; equality cases reach it
      const double slack = 1e-12 * std::max(1.0, rhs);
      worst = std::min(worst, (lhs - rhs) / std::max(1.0, rhs));
      ++total;
      if (lhs < rhs - slack) ++violations;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(total) +
                               fmt(" samples, worst scaled residual %.2e", worst)};
}

Outcome existence_engine() {
  double worst = 0.0;
  std::vector<MapUnderTest> maps{make_shifted_sine(), make_cubic_drift(), make_identity(1)};
  for (const MapUnderTest& m : maps) {
    for (int k = 0; k <= 10; ++k) {
      const double y = -5.0 + k;
      const SolveReport s = solve(m, Vec::Constant(1, y), Weight::zero(), {Vec::Zero(1)});
      if (!s.solution) return {false, m.name + " failed at y = " + std::to_string(y)};
      const double root = bisect_root_1d([&](double t) { return m(Vec::Constant(1, t))[0] - y; }, -10, 10, 1e-13);
      worst = std::max(worst, std::abs((*s.solution)[0] - root));
    }
  }
  double worst_id = 0.0;
  const MapUnderTest id = make_identity(2);
  for (const Vec& y : default_target_grid(2)) {
    const SolveReport s = solve(id, y, Weight::zero(), {Vec::Zero(2)});
    if (!s.solution) return {false, "identity failed"};
    worst_id = std::max(worst_id, (*s.solution - y).norm());
  }
  return {worst <= 1e-6 && worst_id <= 1e-10,
          fmt("1-D worst |x - root| %.2e", worst) + fmt(", identity worst |x - y| %.2e", worst_id)};
}

Outcome ps_violation() {
  DescentConfig c;
  c.escape_norm = 1e3;
  c.start = Vec::Zero(1);
  const MinimizeResult r = minimize(TargetFunctional(make_arctan(), Vec::Constant(1, 2.0)), Weight::zero(), c);
  const auto& w = r.witness;
  const double oracle_level = 0.5 * std::pow(2.0 - std::numbers::pi / 2, 2);
  const double final_norm = w.points.back().norm();
  const double wc = w.weighted_criticalities.back();
  const bool ok = w.classification == Classification::escaped_to_infinity && final_norm > 1e3 && w.level >= 0.090 &&
                  w.level <= 0.095 && wc <= 1e-4;
  return {ok, std::string(to_string(w.classification)) + fmt(", |x| = %.1f", final_norm) +
                  fmt(", level %.6f", w.level) + fmt(" (oracle %.6f)", oracle_level) + fmt(", wc %.2e", wc)};
}

Outcome mountain_pass() {
  const MapUnderTest m = make_complex_exp();
  const Vec y = v2(1, 0);
  InjectivityOptions o;
  o.band_nodes = 64;
  o.band_iterations = 20000;
  o.descent.escape_norm = 2 * m.domain_radius;
  const InjectivityVerdict v = injectivity_falsifier(m, y, {v2(0, 0), v2(0, 6), v2(0, -6)}, Weight::zero(), o);
  if (!v.two_preimages_found || !v.band) return {false, "no second preimage or no band"};
  const double e0 = (v.preimages[0] - v2(0, 0)).norm();
  const double e1 = (v.preimages[1] - v2(0, 2 * std::numbers::pi)).norm();
  const Openness op = estimate_openness(m, v.preimages[0]);
  const double rho = 0.5 * op.alpha * op.alpha * op.radius * op.radius;
  const double level = v.band->level_history.back();
  const double wc = v.band->witness.weighted_criticalities.back();
  const double fine = oracle::string_method_level([&](const Vec& x) { return oracle::complex_exp_F(x, y); },
                                                  [&](const Vec& x) { return oracle::complex_exp_grad(x, y); },
                                                  v2(0, 0), v2(0, 2 * std::numbers::pi), 512, 100000, 0.01);
  const bool ok = e0 <= 1e-6 && e1 <= 1e-6 && level >= rho && std::abs(level - fine) <= 0.1 * fine && wc <= 1e-3;
  return {ok, fmt("preimage errors %.1e", e0) + fmt("/%.1e", e1) + fmt(", rho %.6f", rho) +
                  fmt(", band level %.6f", level) + fmt(", K=512 oracle %.6f", fine) + fmt(", wc %.2e", wc)};
}

Outcome profile_exactness() {
  const HadamardProfile p = hadamard_profile(make_shifted_sine(), std::numbers::pi, 256, 16);
  double worst = 0.0;
  for (double r : {0.5, 1.0, 2.0, 3.0}) worst = std::max(worst, std::abs(p.varrho_at(r) - (2 * r + std::sin(r))));
  const auto sat = check_integral_divergence(derive_weight(make_saturating(), 20, 400, 16), 20).status.state;
  const auto id = check_integral_divergence(derive_weight(make_identity(), 20, 400, 16), 20).status.state;
  const bool ok = worst <= 1e-3 && sat == DivergenceStatus::State::falsified &&
                  id == DivergenceStatus::State::not_falsified;
  return {ok, fmt("shifted-sine worst error %.2e", worst) + ", saturating " + std::string(to_string(sat)) +
                  ", identity " + std::string(to_string(id))};
}

Outcome derived_weight() {
  const MapUnderTest m = make_complex_exp();
  const Weight w = derive_weight(m, 20, 800, 16);
  double worst = 0.0;
  for (int i = 1; i <= 500; ++i) {
    const double r = 0.01 * i;
    worst = std::max(worst, std::abs(w(r) - std::expm1(r)) / std::expm1(r));
  }
  const bool h0 = w(0.0) == 0.0;
  const auto div = check_integral_divergence(w, 20).status.state;
  const Status starstar = check_integral_condition(m, 20, 800, 16).verdict.status;
  const bool ok = worst <= 0.02 && h0 && div == DivergenceStatus::State::falsified && starstar == Status::falsified;
  return {ok, fmt("worst relative error %.2e on (0, 5]", worst) + ", integral " + std::string(to_string(div)) +
                  ", condition " + std::string(to_string(starstar))};
}

Outcome rabier() {
  const MapUnderTest m = make_complex_exp();
  const Verdict v = check_rabier(m, v2(0, 0), SearchBudget{});
  const Probe* merit = nullptr;
  const Probe* sigma = nullptr;
  for (const Probe& p : v.probes) {
    if (p.quantity == "merit") merit = &p;
    if (p.quantity == "banach_constant") sigma = &p;
  }
  if (v.status != Status::falsified || !merit || !sigma) return {false, "status " + std::string(to_string(v.status))};
  const bool same_point = merit->x == sigma->x;
  const double mv = evaluate_probe(m, *merit);
  const double sv = evaluate_probe(m, *sigma);
  const bool ok = same_point && mv < 1e-8 && sv < 1e-3;
  return {ok, fmt("final merit %.2e", mv) + fmt(", banach constant %.2e", sv) + fmt(", x1 = %.2f", merit->x[0])};
}

Outcome audit() {
  std::vector<CriteriaReport> reports;
  for (const auto& e : register_gallery()) reports.push_back(evaluate_criteria(e.map));
  const auto anomalies = audit_implications(reports);
  int inconsistent = 0;
  for (const auto& r : reports) {
    bool f = false, c = false;
    for (Condition k : {Condition::plastock, Condition::katriel, Condition::star, Condition::rabier}) {
      f = f || r[k]->status == Status::falsified;
      c = c || r[k]->status == Status::certified_sampled;
    }
    if (f && c) ++inconsistent;
  }
  return {anomalies.empty() && inconsistent == 0,
          std::to_string(anomalies.size()) + " anomalies, " + std::to_string(inconsistent) + " inconsistent maps"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool perturb_first_value(Json& j) {
  if (j.is_object()) {
    if (j.contains("f_values") && j["f_values"].size() > 1) {
      j["f_values"][1] = j["f_values"][1].get<double>() + 1e-3;
      return true;
    }
    for (auto& [k, v] : j.items()) {
      if (k != "config" && perturb_first_value(v)) return true;
    }
  } else if (j.is_array()) {
    for (auto& v : j)
      if (perturb_first_value(v)) return true;
  }
  return false;
}

Outcome determinism_and_replay(const fs::path& out_dir, const fs::path& shipped) {
  fs::create_directories(out_dir);
  std::vector<RunConfig> configs;
  for (const auto& e : register_gallery()) {
    RunConfig c;
    c.command = "check";
    c.map = e.map.name;
    c.out = (out_dir / ("check_" + e.map.name + ".json")).string();
    configs.push_back(c);
  }
  {
    RunConfig c;
    c.command = "solve";
    c.map = "arctan";
    c.target = Vec::Constant(1, 2.0);
    c.escape_norm = 1e3;
    c.out = (out_dir / "solve_arctan.json").string();
    configs.push_back(c);
  }
  {
    RunConfig c;
    c.command = "mpass";
    c.map = "complex-exp";
    c.target = v2(1, 0);
    c.out = (out_dir / "mpass_complex-exp.json").string();
    configs.push_back(c);
  }
  std::ostringstream sink, err;
  for (const RunConfig& c : configs) {
    if (run(c, sink, err) != 0) return {false, "run failed: " + err.str()};
  }

  RunConfig again = configs.back();
  for (const RunConfig& c : configs) {
    if (c.command == "check" && c.map == "complex-exp") again = c;
  }
  const std::string first = slurp(again.out);
  const fs::path scratch = out_dir / "rerun";
  fs::create_directories(scratch);
  again.out = (scratch / "check_complex-exp.json").string();
  if (run(again, sink, err) != 0) return {false, "rerun failed"};
  const bool identical = first == slurp(again.out);
  fs::remove_all(scratch);

  std::vector<fs::path> reports;
  for (const fs::path& dir : {out_dir, shipped}) {
    if (dir.empty() || !fs::is_directory(dir)) continue;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".json") reports.push_back(entry.path());
    }
  }
  std::size_t ok = 0, checked = 0;
  std::string failure;
  for (const fs::path& p : reports) {
    const ReplayResult r = replay(Json::parse(slurp(p)));
    checked += r.checked;
    if (r.ok) {
      ++ok;
    } else if (failure.empty()) {
      failure = p.filename().string() + " " + r.path;
    }
  }

  Json faulty = Json::parse(slurp(out_dir / "solve_arctan.json"));
  const bool perturbed = perturb_first_value(faulty);
  const ReplayResult bad = replay(faulty);
  const bool caught = perturbed && !bad.ok && bad.index == 1;

  const bool pass = identical && ok == reports.size() && caught;
  std::string detail = std::string(identical ? "byte-identical reruns" : "reruns differ") + ", replay ok on " +
                       std::to_string(ok) + "/" + std::to_string(reports.size()) + " reports (" +
                       std::to_string(checked) + " values), fault " + (caught ? "detected" : "missed");
  if (!failure.empty()) detail += ", first mismatch " + failure;
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out_dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_reports");
  const fs::path shipped = argc > 2 ? fs::path(argv[2]) : fs::path();

  struct Item {
    int id;
    const char* name;
    double limit;
    std::function<Outcome()> fn;
  };
  const std::vector<Item> items{
      {1, "gradient consistency", 5, gradient_consistency},
      {2, "criticality lower bound", 0, claim_one},
      {3, "existence engine vs bisection", 0, existence_engine},
      {4, "escaping PS-violation witness", 10, ps_violation},
      {5, "mountain pass", 60, mountain_pass},
      {6, "profile exactness and divergence", 0, profile_exactness},
      {7, "derived weight", 0, derived_weight},
      {8, "rabier falsifier", 30, rabier},
      {9, "implication audit", 0, audit},
      {10, "determinism and replay", 0, [&] { return determinism_and_replay(out_dir, shipped); }},
  };
  int failed = 0;
  for (const Item& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (it.limit > 0 && secs >= it.limit) {
      o.pass = false;
      o.detail += fmt(", over the %.0f s limit", it.limit);
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2d %-34s %s  %7.2f s  %s\n", it.id, it.name, o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
