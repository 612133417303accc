#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ginv/parallel.hpp"
#include "ginv/sampling.hpp"
#include "ginv/test_oracle.hpp"
#include "ginv/variational_core.hpp"

using namespace ginv;

TEST(Extremum, SmallestIndexWinsTies) {
  const std::vector<double> v{3, 1, 2, 1, NAN, 1};
  for (Exec e : {Exec::serial, Exec::parallel}) {
    const Extremum m = min_index(v.size(), [&](std::size_t i) { return v[i]; }, e);
    EXPECT_EQ(m.index, 1);
    EXPECT_EQ(m.value, 1.0);
  }
}

TEST(Extremum, ParallelMatchesSerialOnLargeInput) {
  std::vector<double> v(100000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(double(i) * 0.37) + (i % 977 == 0 ? -5.0 : 0.0);
  const Extremum a = min_index_serial(v.size(), [&](std::size_t i) { return v[i]; });
  const Extremum b = min_index_parallel(v.size(), [&](std::size_t i) { return v[i]; });
  EXPECT_EQ(a.index, b.index);
  EXPECT_EQ(a.value, b.value);
  EXPECT_LT(a.value, -5.0);
}

TEST(Extremum, AllNaNNotFound) {
  EXPECT_FALSE(min_index(2, [](std::size_t) { return NAN; }, Exec::serial).found());
}

TEST(StreamSeed, DistinctCellsAndStable) {
  EXPECT_EQ(stream_seed(42, "identity", "1"), stream_seed(42, "identity", "1"));
  EXPECT_NE(stream_seed(42, "identity", "1"), stream_seed(42, "identity", "2"));
  EXPECT_NE(stream_seed(42, "identity", "1"), stream_seed(43, "identity", "1"));
  EXPECT_NE(stream_seed(42, "identity", "1"), stream_seed(42, "arctan", "1"));
}

TEST(Sampling, BallAndShellBounds) {
  SampleStream s(7);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LE(s.in_ball(3, 2.0).norm(), 2.0 + 1e-12);
    const double r = s.in_shell(2, 1.0, 1.5).norm();
    EXPECT_GT(r, 1.0 - 1e-12);
    EXPECT_LE(r, 1.5 + 1e-12);
    EXPECT_NEAR(s.direction(4).norm(), 1.0, 1e-12);
  }
}

TEST(Sampling, SampleBallLayout) {
  SampleStream s(1);
  const auto pts = sample_ball(2, 4.0, {8, 5, true}, s);
  ASSERT_EQ(pts.size(), 1u + 8u * (4u + 5u));
  EXPECT_EQ(pts[0], Vec::Zero(2));
  EXPECT_NEAR(pts[1].norm(), 0.5, 1e-15);
}

TEST(BallMinimum, SerialEqualsParallelAndIsExactOnAxes) {
  const MapUnderTest m = make_complex_exp();
  auto run = [&](Exec e) {
    SampleStream s(42, m.name, "t");
    return ball_minimum(2, 3.0, {16, 16, true}, s, [&](const Vec& x) { return banach_constant(m, x); }, e);
  };
  const BallExtremum a = run(Exec::serial);
  const BallExtremum b = run(Exec::parallel);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.argument, b.argument);
  EXPECT_NEAR(a.value, std::exp(-3.0), 1e-15);
  EXPECT_EQ(a.doubling_estimates.size(), 3u);
  EXPECT_TRUE(a.stable);
}

TEST(Bisect, Examples) {
  EXPECT_NEAR(bisect_root_1d([](double t) { return t; }, -1, 2, 1e-13), 0.0, 1e-12);
  const double r = bisect_root_1d([](double t) { return 2 * t + std::sin(t) - 5; }, 0, 5, 1e-12);
  EXPECT_NEAR(2 * r + std::sin(r), 5.0, 1e-10);
  const double c = bisect_root_1d([](double t) { return t + t * t * t - 10; }, 0, 3, 1e-12);
  EXPECT_NEAR(c + c * c * c, 10.0, 1e-10);
  EXPECT_ANY_THROW(bisect_root_1d([](double t) { return t * t + 1; }, -1, 1, 1e-12));
}

TEST(GridScan, IdentityInjectiveAndCovering) {
  const GridVerdict g = grid_scan(make_identity(), 3.0, 101);
  EXPECT_TRUE(g.injective_on_box);
  EXPECT_DOUBLE_EQ(g.covered_targets, 1.0);
}

TEST(GridScan, ComplexExpCollisionAcrossPeriod) {
  const GridVerdict g = grid_scan(make_complex_exp(), 8.0, 401);
  ASSERT_FALSE(g.injective_on_box);
  ASSERT_TRUE(g.collision);
  EXPECT_GT((g.collision->a - g.collision->b).norm(), 1.0);
  EXPECT_LE((g.collision->fa - g.collision->fb).norm(), g.max_image_tol);
}

TEST(GridScan, ArctanMissesTargets) {
  const GridVerdict g = grid_scan(make_arctan(), 100.0, 100000);
  EXPECT_TRUE(g.injective_on_box);
  EXPECT_LT(g.covered_targets, 1.0);
  EXPECT_GT(g.covered_targets, 0.0);
}

TEST(GridScan, SerialEqualsParallel) {
  GridScanOptions s, p;
  s.exec = Exec::serial;
  p.exec = Exec::parallel;
  const GridVerdict a = grid_scan(make_complex_exp(), 8.0, 201, s);
  const GridVerdict b = grid_scan(make_complex_exp(), 8.0, 201, p);
  EXPECT_EQ(a.injective_on_box, b.injective_on_box);
  EXPECT_EQ(a.covered_targets, b.covered_targets);
  EXPECT_EQ(a.min_f_norm_on_boundary, b.min_f_norm_on_boundary);
  ASSERT_EQ(bool(a.collision), bool(b.collision));
  if (a.collision) EXPECT_EQ(a.collision->a, b.collision->a);
}

TEST(GridScan, RejectsOversizedGrids) {
  EXPECT_THROW(grid_scan(make_identity(), 1.0, 8), ConfigError);
  EXPECT_THROW(grid_scan(make_identity(), 1.0, 5000), ConfigError);
}
