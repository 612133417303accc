#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ginv/criteria_chain.hpp"
#include "ginv/hadamard.hpp"
#include "oracles.hpp"

using namespace ginv;

namespace {
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
Vec v1(double a) { return Vec::Constant(1, a); }
}  // namespace

TEST(Profile, IdentityIsLinear) {
  const HadamardProfile p = hadamard_profile(make_identity(), 10, 32, 8);
  for (const auto& row : p.rows) EXPECT_NEAR(row.varrho, row.rho, 1e-12);
  EXPECT_NEAR(p.varrho_at(3.3), 3.3, 1e-12);
}

TEST(Profile, ShiftedSineClosedForm) {
  const HadamardProfile p = hadamard_profile(make_shifted_sine(), std::numbers::pi, 256, 16);
  for (double r : {0.5, 1.0, 2.0, 3.0}) EXPECT_NEAR(p.varrho_at(r), 2 * r + std::sin(r), 1e-3);
}

TEST(Profile, SaturatingIsBounded) {
  const HadamardProfile p = hadamard_profile(make_saturating(), 10, 128, 8);
  for (const auto& row : p.rows) EXPECT_NEAR(row.varrho, 1 - std::exp(-row.rho), 2e-3);
}

TEST(Profile, Invariants) {
  const HadamardProfile p = hadamard_profile(make_complex_exp(), 8, 32, 8);
  ASSERT_EQ(p.rows.size(), 33u);
  EXPECT_EQ(p.rows.front().rho, 0.0);
  EXPECT_EQ(p.rows.front().varrho, 0.0);
  for (std::size_t i = 1; i < p.rows.size(); ++i) {
    EXPECT_GT(p.rows[i].rho, p.rows[i - 1].rho);
    EXPECT_LE(p.rows[i].inf_estimate, p.rows[i - 1].inf_estimate);
    EXPECT_GE(p.rows[i].varrho, p.rows[i - 1].varrho);
    EXPECT_LE(p.rows[i].argmin.norm(), p.rows[i].rho + 1e-12);
  }
  EXPECT_THROW(hadamard_profile(make_identity(), 8, 4, 8), ConfigError);
}

TEST(DerivedWeight, ClosedForms) {
  const Weight id = derive_weight(make_identity(), 10, 32, 8);
  EXPECT_EQ(id(0), 0.0);
  EXPECT_EQ(id(7), 0.0);

  const Weight ss = derive_weight(make_shifted_sine(), std::numbers::pi, 256, 16);
  EXPECT_EQ(ss(0), 0.0);
  for (double r : {0.5, 1.0, 2.0, 3.0}) EXPECT_NEAR(ss(r), 3 / (2 + std::cos(r)) - 1, 0.02 * (3 / (2 + std::cos(r))));

  const Weight ce = derive_weight(make_complex_exp(), 20, 400, 16);
  EXPECT_EQ(ce(0), 0.0);
  for (double r = 0.05; r <= 5.0; r += 0.05) EXPECT_NEAR(ce(r), std::expm1(r), 0.02 * std::expm1(r));
  EXPECT_TRUE(ce.monotone_on({0, 0.5, 1, 5, 10, 19, 25}));
}

TEST(DerivedWeight, SingularJacobianNamesShell) {
  try {
    derive_weight(make_diagonal({1, 0}), 4, 16, 4);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("shell"), std::string::npos);
  }
}

TEST(Divergence, Examples) {
  EXPECT_EQ(check_integral_divergence(Weight::zero(), 20).status.state, DivergenceStatus::State::not_falsified);
  EXPECT_EQ(check_integral_divergence(Weight::cerami(), 20).status.state, DivergenceStatus::State::not_falsified);
  std::vector<double> rho, h;
  for (int i = 0; i <= 400; ++i) {
    rho.push_back(i * 0.05);
    h.push_back(std::expm1(rho.back()));
  }
  const Weight e = Weight::tabulated(WeightKind::custom, rho, h, {});
  EXPECT_EQ(check_integral_divergence(e, 20).status.state, DivergenceStatus::State::falsified);
  EXPECT_NEAR(weight_integral(Weight::zero(), 3), 3.0, 1e-12);
  EXPECT_NEAR(weight_integral(Weight::cerami(), 3), std::log(4.0), 1e-6);
}

TEST(Isometry, Examples) {
  EXPECT_EQ(check_isometry(make_identity(), 10, 256).status, Status::certified_sampled);
  const Verdict d = check_isometry(make_diagonal({2, 3}), 10, 256);
  EXPECT_EQ(d.status, Status::falsified);
  EXPECT_TRUE(d.has_witness());
  EXPECT_EQ(check_isometry(make_arctan(), 10, 256).status, Status::falsified);
}

TEST(Expansive, Examples) {
  const Verdict c = check_expansive(make_cubic_drift(), 10, 256);
  EXPECT_EQ(c.status, Status::certified_sampled);
  EXPECT_GE(*c.metric("alpha_estimate"), 1 - 1e-9);
  const Verdict id = check_expansive(make_identity(), 10, 256);
  EXPECT_EQ(id.status, Status::certified_sampled);
  EXPECT_NEAR(*id.metric("alpha_estimate"), 1.0, 1e-12);
  EXPECT_EQ(check_expansive(make_arctan(), 10, 256).status, Status::falsified);
}

TEST(UniformBound, Examples) {
  const Verdict s = check_uniform_lower_bound(make_shifted_sine(), 10, 256);
  EXPECT_EQ(s.status, Status::certified_sampled);
  EXPECT_NEAR(*s.metric("alpha"), 1.0, 1e-3);
  const Verdict id = check_uniform_lower_bound(make_identity(), 10, 256);
  EXPECT_EQ(id.status, Status::certified_sampled);
  EXPECT_DOUBLE_EQ(*id.metric("alpha"), 1.0);
  EXPECT_NE(check_uniform_lower_bound(make_complex_exp(), 10, 256).status, Status::certified_sampled);
}

TEST(Plastock, Examples) {
  EXPECT_EQ(check_plastock(make_cubic_drift(), {1.25, 2.5, 5, 10, 20}, 8).status, Status::certified_sampled);
  EXPECT_EQ(check_plastock(make_identity(), {1.25, 2.5, 5, 10, 20}, 8).status, Status::certified_sampled);
  const Verdict a = check_plastock(make_arctan(), {1.25, 2.5, 5, 10, 20}, 8);
  EXPECT_EQ(a.status, Status::falsified);
  EXPECT_TRUE(a.has_witness());
}

TEST(Katriel, Examples) {
  const SearchBudget b{};
  EXPECT_EQ(check_katriel(make_identity(), v2(0, 0), {0.25, 0.5, 1, 2, 4}, 64, b).status, Status::certified_sampled);
  EXPECT_EQ(check_katriel(make_shifted_sine(), v1(0), {0.25, 0.5, 1, 2, 4}, 64, b).status, Status::certified_sampled);
  const Verdict ce = check_katriel(make_complex_exp(), v2(1, 0), {0.25, 0.5, 1, 2, 4}, 64, b);
  ASSERT_EQ(ce.status, Status::falsified);
  const MapUnderTest m = make_complex_exp();
  for (const Probe& p : ce.probes) EXPECT_NEAR(evaluate_probe(m, p), p.value, 1e-12 * std::max(1.0, std::abs(p.value)));
}

TEST(Rabier, Examples) {
  const SearchBudget b{};
  EXPECT_EQ(check_rabier(make_identity(), v2(0.5, 0.5), b).status, Status::certified_sampled);
  EXPECT_EQ(check_rabier(make_cubic_drift(), v1(0), b).status, Status::certified_sampled);
  const Verdict ce = check_rabier(make_complex_exp(), v2(0, 0), b);
  ASSERT_EQ(ce.status, Status::falsified);
  ASSERT_FALSE(ce.probes.empty());
}

TEST(Star, Examples) {
  StarOptions o;
  o.search.radius = 10;
  const Verdict a = check_star(make_arctan(), Weight::zero(), {v1(2)}, o);
  EXPECT_EQ(a.status, Status::falsified);
  ASSERT_TRUE(a.sequence);
  EXPECT_EQ(a.sequence->label, "dagger");

  std::vector<Vec> grid;
  for (double t = -5; t <= 5; t += 1) grid.push_back(v1(t));
  const Weight w = derive_weight(make_shifted_sine(), 20, 64, 16);
  EXPECT_EQ(check_star(make_shifted_sine(), w, grid, o).status, Status::certified_sampled);

  const Verdict s = check_star(make_saturating(), Weight::zero(), {v1(2)}, o);
  EXPECT_EQ(s.status, Status::falsified);
}

TEST(Star, ConjunctionOfParts) {
  StarOptions o;
  const Verdict s = check_star(make_saturating(), Weight::zero(), {v1(2), v1(0.999)}, o);
  ASSERT_EQ(s.parts.size(), 2u);
  bool any_false = false;
  for (const auto& [name, st] : s.parts) any_false = any_false || st == Status::falsified;
  EXPECT_EQ(any_false, s.status == Status::falsified);
}

TEST(Audit, SyntheticAnomaly) {
  CriteriaReport r;
  r.map_name = "synthetic";
  Verdict cert, fals;
  cert.status = Status::certified_sampled;
  fals.status = Status::falsified;
  r[Condition::uniform_bound] = cert;
  r[Condition::integral] = fals;
  const auto a = audit_implications({r});
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].upstream, Condition::uniform_bound);
  EXPECT_EQ(a[0].downstream, Condition::integral);
  EXPECT_EQ(a[0].kind, "chain");
}

TEST(Audit, EquivalenceAnomaly) {
  CriteriaReport r;
  r.map_name = "synthetic";
  Verdict cert, fals;
  cert.status = Status::certified_sampled;
  fals.status = Status::falsified;
  r[Condition::katriel] = fals;
  r[Condition::rabier] = cert;
  const auto a = audit_implications({r});
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].kind, "equivalence");
}

TEST(Evaluate, IdentityAllCertified) {
  const CriteriaReport r = evaluate_criteria(make_identity());
  for (Condition c : kChainOrder) {
    ASSERT_TRUE(r[c]);
    EXPECT_EQ(r[c]->status, Status::certified_sampled) << condition_key(c) << ": " << r[c]->detail;
  }
}

TEST(Evaluate, SubsetOfCriteria) {
  CriteriaOptions o;
  o.criteria = {Condition::isometry, Condition::expansive};
  const CriteriaReport r = evaluate_criteria(make_diagonal({2, 3}), o);
  EXPECT_TRUE(r[Condition::isometry]);
  EXPECT_TRUE(r[Condition::expansive]);
  EXPECT_FALSE(r[Condition::rabier]);
}

TEST(Evaluate, SerialMatchesParallel) {
  CriteriaOptions a;
  a.exec = Exec::serial;
  CriteriaOptions b;
  b.exec = Exec::parallel;
  const CriteriaReport ra = evaluate_criteria(make_complex_exp(), a);
  const CriteriaReport rb = evaluate_criteria(make_complex_exp(), b);
  for (Condition c : kChainOrder) {
    ASSERT_TRUE(ra[c] && rb[c]);
    EXPECT_EQ(ra[c]->status, rb[c]->status);
    EXPECT_EQ(ra[c]->metrics, rb[c]->metrics);
  }
}
