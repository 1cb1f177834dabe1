#include <gtest/gtest.h>

#include <atomic>
#include <numeric>

#include "fiolab/common.hpp"
#include "fiolab/grid.hpp"

using namespace fiolab;

TEST(Common, BracketMatchesDefinition) {
  EXPECT_DOUBLE_EQ(bracket(0.0), 1.0);
  EXPECT_DOUBLE_EQ(bracket(Point{3.0, 4.0, 0.0}, 2), std::sqrt(26.0));
  EXPECT_DOUBLE_EQ(bracket(Point{3.0, 4.0, 12.0}, 3), std::sqrt(170.0));
}

TEST(Common, VectorHelpers) {
  const Point a{1.0, 2.0, 3.0}, b{4.0, 5.0, 6.0};
  EXPECT_DOUBLE_EQ(dot(a, b, 3), 32.0);
  EXPECT_DOUBLE_EQ(dot(a, b, 2), 14.0);
  const Point c = axpy(2.0, a, b, 3);
  EXPECT_DOUBLE_EQ(c[2], 12.0);
  EXPECT_DOUBLE_EQ(sub(b, a, 3)[0], 3.0);
  EXPECT_DOUBLE_EQ(scaled(a, -1.0, 2)[1], -2.0);
}

TEST(Common, DeterminantAndFrobenius) {
  Mat m{};
  m[0] = {2.0, 1.0, 0.0};
  m[1] = {1.0, 3.0, 0.0};
  m[2] = {0.0, 0.0, 4.0};
  EXPECT_DOUBLE_EQ(det(m, 2), 5.0);
  EXPECT_DOUBLE_EQ(det(m, 3), 20.0);
  EXPECT_DOUBLE_EQ(frobenius(m, 2), std::sqrt(15.0));
}

TEST(Common, SmoothStepIsSymmetricPartition) {
  for (double t = -0.5; t <= 1.5; t += 0.0625) {
    const double s = smooth_step(t);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_NEAR(s + smooth_step(1.0 - t), 1.0, 1e-15);
  }
  EXPECT_EQ(smooth_step(0.0), 0.0);
  EXPECT_EQ(smooth_step(1.0), 1.0);
  EXPECT_DOUBLE_EQ(smooth_step(0.5), 0.5);
}

TEST(Common, QuinticStepPolynomial) {
  for (double u = 0.0; u <= 1.0; u += 0.125)
    EXPECT_NEAR(quintic_step(u), 6 * std::pow(u, 5) - 15 * std::pow(u, 4) + 10 * std::pow(u, 3),
                1e-15);
  EXPECT_EQ(quintic_step(-1.0), 0.0);
  EXPECT_EQ(quintic_step(2.0), 1.0);
}

TEST(Common, UnitBumpShapeAndDerivative) {
  EXPECT_DOUBLE_EQ(unit_bump(0.0), 1.0);
  EXPECT_EQ(unit_bump(1.0), 0.0);
  EXPECT_EQ(unit_bump(-1.5), 0.0);
  for (double v = -0.9; v <= 0.9; v += 0.1) {
    const double h = 1e-6;
    const double fd = (unit_bump(v + h) - unit_bump(v - h)) / (2 * h);
    EXPECT_NEAR(unit_bump_derivative(v), fd, 1e-6);
  }
}

TEST(Common, PairwiseSumIsAccurateAndOrderFixed) {
  std::vector<double> v(10001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
  const double s = pairwise_sum(std::span<const double>(v));
  long double ref = 0.0L;
  for (double x : v) ref += x;
  EXPECT_NEAR(s, static_cast<double>(ref), 1e-13);
  EXPECT_EQ(s, pairwise_sum(std::span<const double>(v)));
  std::vector<cplx> c(33, cplx(1.0, -2.0));
  const cplx cs = pairwise_sum(std::span<const cplx>(c));
  EXPECT_DOUBLE_EQ(cs.real(), 33.0);
  EXPECT_DOUBLE_EQ(cs.imag(), -66.0);
  EXPECT_EQ(pairwise_sum(std::span<const double>()), 0.0);
}

TEST(Common, ParallelForCoversRangeOnce) {
  for (int workers : {1, 2, 3, 7}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) hits[i]++;
    });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  EXPECT_GE(default_workers(), 1);
}

TEST(Common, RngIsSplitMix64) {
  // reference splitmix64 stream for seed 0
  std::uint64_t s = 0;
  auto ref = [&s] {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  Rng r(0);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(r.next(), ref());
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Common, SampleDirectionsAreUnit) {
  for (int n : {1, 2, 3}) {
    const auto d = sample_directions(n, 16);
    ASSERT_FALSE(d.empty());
    for (const auto& w : d) EXPECT_NEAR(norm(w, n), 1.0, 1e-14);
  }
  const auto d2 = sample_directions(2, 4);
  EXPECT_NEAR(d2[0][0], 1.0, 1e-15);
  EXPECT_NEAR(d2[1][1], 1.0, 1e-15);
}

TEST(Grid, CoordinatesAndIndexing) {
  Grid g;
  g.n = 2;
  g.extent = 2.0;
  g.points_per_axis = 8;
  g.center = Point{1.0, -1.0, 0.0};
  EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.25);
  EXPECT_EQ(g.size(), 64u);
  const Point p = g.point(g.flat({3, 5, 0}));
  EXPECT_DOUBLE_EQ(p[0], 1.0 - 2.0 + 3 * 0.5);
  EXPECT_DOUBLE_EQ(p[1], -1.0 - 2.0 + 5 * 0.5);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.flat(g.index(i)), i);
  EXPECT_EQ(g.index(1)[1], 1);
}

TEST(Grid, ValidateRejectsBadGeometry) {
  Grid g;
  g.points_per_axis = 0;
  EXPECT_THROW(g.validate(), ConfigError);
  g.points_per_axis = 4;
  g.extent = -1.0;
  EXPECT_THROW(g.validate(), ConfigError);
}

TEST(Grid, SampleFieldIsWorkerIndependent) {
  Grid g;
  g.n = 2;
  g.extent = 1.0;
  g.points_per_axis = 16;
  auto f = [](const Point& x) { return cplx(std::sin(3 * x[0]), x[1]); };
  const Field a = sample_field(g, f, 1);
  const Field b = sample_field(g, f, 3);
  EXPECT_EQ(a.values, b.values);
}
