#include <gtest/gtest.h>

#include "fiolab/engine.hpp"
#include "fiolab/oracles.hpp"

using namespace fiolab;

namespace {

Grid make(int n, double extent, int points, const Point& c = Point{}) {
  Grid g;
  g.n = n;
  g.extent = extent;
  g.points_per_axis = points;
  g.center = c;
  return g;
}

Field bump_field(const Grid& g, double q, const Point& c = Point{}) {
  return sample_field(g, [&](const Point& x) {
    return cplx(unit_bump(norm(sub(x, c, g.n), g.n) / q));
  });
}

QuadratureSpec quad(int k_min, int k_max, double os) {
  QuadratureSpec q;
  q.k_min = k_min;
  q.k_max = k_max;
  q.oversample = os;
  q.workers = 1;
  return q;
}

}  // namespace

TEST(Polar, NyquistCountsAndRefusal) {
  QuadratureSpec q = quad(1, 3, 1.0);
  const PolarRule r = make_polar_rule(2, 8.0, 64.0, 2.0, q);
  EXPECT_EQ(r.radial_count, static_cast<int>(std::ceil(32.0 * 56.0 / 8.0)) + 1);
  QuadratureSpec wide = quad(1, 3, 1.0);
  EXPECT_EQ(make_polar_rule(2, 8.0, 64.0, 200.0, wide).radial_count,
            static_cast<int>(std::ceil(200.0 * 56.0 / kPi)) + 1);
  EXPECT_EQ(r.angular_counts.back(), static_cast<int>(std::ceil(2.0 * 64.0 * 2.0)));
  q.oversample = 0.1;
  try {
    make_polar_rule(2, 8.0, 64.0, 2.0, q);
    FAIL() << "expected refusal";
  } catch (const QuadratureRefusal& e) {
    EXPECT_EQ(e.required_radial, r.radial_count);
    EXPECT_EQ(e.required_angular, r.angular_counts.back());
    EXPECT_NE(std::string(e.what()).find("required"), std::string::npos);
  }
  q.oversample = 1.0;
  q.radial_points = 5;
  EXPECT_THROW(make_polar_rule(2, 8.0, 64.0, 2.0, q), QuadratureRefusal);
}

TEST(Polar, RuleIntegratesShellVolume) {
  for (int n : {1, 2, 3}) {
    SCOPED_TRACE(n);
    const PolarRule r = make_polar_rule(n, 8.0, 32.0, 1.0, quad(1, 3, 1.5));
    double vol = 0.0;
    std::vector<Point> xi;
    std::vector<double> w;
    for (int i = 0; i < r.radial_count; ++i) {
      ring_nodes(r, i, xi, w);
      for (double v : w) vol += v;
    }
    const double exact = unit_ball_volume(n) * (std::pow(32.0, n) - std::pow(8.0, n));
    EXPECT_NEAR(vol / exact, 1.0, 2e-3);
  }
}

TEST(Kernel, LinearPhaseTranslationInvariance) {
  const PhaseFunction lin = make_builtin_phase("linear", 2);
  const Amplitude b = make_builtin_amplitude("sg_power", 2, Orders{0.0, 0.0, -0.5}, Flavor::I);
  const QuadratureSpec q = quad(1, 3, 1.5);
  const Point x{0.3, 0.1, 0.0}, y{0.0, -0.2, 0.0}, v{0.25, 0.5, 0.0};
  const cplx a = kernel_F(b, lin, x, y, q);
  const cplx c = kernel_F(b, lin, axpy(1.0, v, x, 2), axpy(1.0, v, y, 2), q);
  EXPECT_LE(std::abs(a - c), 1e-8 * std::abs(a));
}

TEST(Kernel, DyadicPiecesSumToFull) {
  const PhaseFunction sw = make_builtin_phase("shifted_wave", 2);
  const Amplitude b = make_builtin_amplitude("sg_power", 2, Orders{0.0, 0.0, -0.5}, Flavor::I);
  const QuadratureSpec q = quad(1, 4, 1.5);
  const Point x{0.9, 0.2, 0.0}, y{};
  const cplx full = kernel_F(b, sw, x, y, q);
  cplx sum{};
  for (int k = 1; k <= 4; ++k) sum += kernel_F(b, sw, x, y, q, KernelVariant::dyadic(k));
  EXPECT_LE(std::abs(sum - full), 1e-8 * std::abs(full));
}

TEST(Kernel, FieldMatchesPointwiseQuadrature) {
  const PhaseFunction sw = make_builtin_phase("shifted_wave", 2);
  const Amplitude b = make_builtin_amplitude("sg_power", 2, Orders{-0.25, 0.0, -0.5}, Flavor::I);
  const QuadratureSpec q = quad(1, 3, 1.5);
  const Grid g = make(2, 3.0, 256);
  const Field F = kernel_field(b, sw, Point{}, g, q, KernelVariant::dyadic(3));
  for (std::size_t idx : {g.flat({128, 128, 0}), g.flat({128, 171, 0}), g.flat({60, 200, 0})}) {
    const cplx ref = kernel_F(b, sw, g.point(idx), Point{}, q, KernelVariant::dyadic(3));
    EXPECT_NEAR(std::abs(F.values[idx] - ref), 0.0, 1e-4 * (1.0 + std::abs(ref)));
  }
  const Grid coarse = make(2, 3.0, 32);
  EXPECT_THROW(kernel_field(b, sw, Point{}, coarse, q, KernelVariant::dyadic(3)),
               QuadratureRefusal);
}

TEST(Apply, MultiplierMatchesOracle) {
  const PhaseFunction lin = make_builtin_phase("linear", 2);
  const Amplitude b = make_builtin_amplitude("sg_power", 2, Orders{}, Flavor::I);
  const Grid g = make(2, 4.0, 128);
  const Field u = bump_field(g, 1.0);
  const QuadratureSpec q = quad(1, 3, 1.5);
  const RadialCutoffs rc(3);
  auto symbol = [&](const Point& xi) {
    const double r = norm(xi, 2);
    return cplx(eta(r) * rc.window(r, 1, 3));
  };
  const Field ref = dft_multiplier_oracle(u, symbol);
  const Field periodic = dft_multiplier_oracle(u, symbol, 1);
  EXPECT_LE(relative_l2(apply_T(b, lin, u, q, Method::Lattice), periodic), 1e-12);
  EXPECT_LE(relative_l2(apply_T(b, lin, u, q, Method::Polar), ref), 1e-6);
  const Amplitude a = make_builtin_amplitude("sg_power_xi", 2, Orders{}, Flavor::I);
  EXPECT_LE(relative_l2(apply_A(a, lin, u, q, Method::Lattice), periodic), 1e-12);
}

TEST(Apply, ShiftedWavePreservesL2OfMultiplierSide) {
  const PhaseFunction sw = make_builtin_phase("shifted_wave", 2);
  const Amplitude a = make_builtin_amplitude("sg_power_xi", 2, Orders{}, Flavor::I);
  const Grid g = make(2, 4.0, 256);
  const Field f = sample_field(g, [](const Point& x) {
    return cplx(std::cos(14.0 * x[0]) * std::exp(-2.0 * dot(x, x, 2)));
  });
  const QuadratureSpec q = quad(1, 4, 1.0);
  const Field Af = apply_A(a, sw, f, q, Method::Lattice);
  const Field lin = apply_A(a, make_builtin_phase("linear", 2), f, q, Method::Lattice);
  EXPECT_NEAR(lp_norm(Af, 2.0) / lp_norm(lin, 2.0), 1.0, 1e-6);
}

TEST(Apply, WorkerCountDoesNotChangeBits) {
  const PhaseFunction sw = make_builtin_phase("shifted_wave", 2);
  const Amplitude b = make_builtin_amplitude("sg_power", 2, Orders{-0.5, 0.0, -0.5}, Flavor::I);
  const Grid g = make(2, 3.0, 64);
  const Field u = bump_field(g, 0.5);
  QuadratureSpec q = quad(1, 2, 1.0);
  const Field a = apply_T(b, sw, u, q, Method::Polar);
  q.workers = 3;
  const Field c = apply_T(b, sw, u, q, Method::Polar);
  EXPECT_EQ(a.values, c.values);
}

TEST(Dilation, ExactRoundTripAndReflection) {
  const Grid g = make(2, 2.0, 32, Point{0.5, 0.0, 0.0});
  const Field f = sample_field(g, [](const Point& x) { return cplx(x[0] + 2.0 * x[1]); });
  const Field d = dilate(f, 4.0);
  EXPECT_DOUBLE_EQ(d.grid.extent, 0.5);
  EXPECT_DOUBLE_EQ(d.grid.center[0], 0.125);
  for (std::size_t i = 0; i < d.grid.size(); i += 37) {
    const Point x = d.grid.point(i);
    EXPECT_NEAR(d.values[i].real(), 4.0 * x[0] + 8.0 * x[1], 1e-12);
  }
  const Field back = dilate(d, 0.25);
  EXPECT_TRUE(same_geometry(back.grid, g));
  EXPECT_EQ(back.values, f.values);
  const Grid s = make(1, 2.0, 16);
  const Field h = sample_field(s, [](const Point& x) { return cplx(x[0]); });
  const Field r = dilate(h, -1.0);
  EXPECT_EQ(r.values[0], cplx{});
  for (std::size_t i = 1; i < r.grid.size(); ++i)
    EXPECT_NEAR(r.values[i].real(), -r.grid.point(i)[0], 1e-12);
}

TEST(Dilation, CubicReproducesQuadratics) {
  const Grid g = make(2, 2.0, 64);
  auto q = [](const Point& x) { return cplx(1.0 + x[0] - 0.5 * x[1] + 0.25 * x[0] * x[1]); };
  const Field f = sample_field(g, q);
  const Field d = dilate(f, 0.75, DilationMode::Cubic);
  EXPECT_TRUE(same_geometry(d.grid, g));
  for (std::size_t i = 0; i < g.size(); i += 11) {
    const Point x = g.point(i);
    if (std::abs(x[0]) > 1.3 || std::abs(x[1]) > 1.3) continue;
    EXPECT_NEAR(std::abs(d.values[i] - q(scaled(x, 0.75, 2))), 0.0, 1e-10);
  }
}

TEST(Rescaled, LinearPhaseSymbols) {
  const Amplitude a = make_builtin_amplitude("sg_power_xi", 2, Orders{-0.5, 0.0, -0.5}, Flavor::I);
  const RescaledOperator op = rescaled_operator_symbols(a, make_builtin_phase("linear", 2), 3);
  const Point x{1.0, 0.5, 0.0}, xi{100.0, 50.0, 0.0};
  EXPECT_NEAR(op.phase.eval(x, xi), dot(x, xi, 2), 1e-10);
  const cplx ref = a(scaled(x, 8.0, 2), scaled(xi, 0.125, 2)) * lp_psi_tilde(norm(x, 2));
  EXPECT_NEAR(std::abs(op.amplitude(x, xi) - ref), 0.0, 1e-14);
  EXPECT_DOUBLE_EQ(op.amplitude.low_cutoff(), 64.0);
}

TEST(Rescaled, ZeroOrderConstantsSaturate) {
  const Amplitude a = make_builtin_amplitude("sg_power_xi", 2, Orders{-0.5, 0.0, -0.5}, Flavor::I);
  const auto c4 = rescaled_symbol_constants(a, 4, -0.5, 0);
  const auto c6 = rescaled_symbol_constants(a, 6, -0.5, 0);
  const double v4 = c4.begin()->second, v6 = c6.begin()->second;
  // sup over |x| >= 1/4 tends to <2^k/4>^{-1/2} 2^{k/2} -> 2
  EXPECT_NEAR(v6, 2.0, 0.01);
  EXPECT_LT(v4, v6);
}

TEST(Norms, LpNormsAndWeights) {
  const Grid g = make(2, 1.0, 8);
  Field f(g);
  f.values[g.flat({3, 4, 0})] = 1.0;
  for (double p : {1.0, 2.0, 4.0}) EXPECT_NEAR(lp_norm(f, p), std::pow(g.cell_volume(), 1.0 / p), 1e-15);
  const Field w = weight_multiply(f, 2.0);
  const Point x = g.point(g.flat({3, 4, 0}));
  EXPECT_NEAR(w.values[g.flat({3, 4, 0})].real(), 1.0 + dot(x, x, 2), 1e-14);
  EXPECT_EQ(bessel_multiply(f, 0.0).values, f.values);
  EXPECT_NEAR(sobolev_norm(f, 0.0, 0.0, 2.0), lp_norm(f, 2.0), 1e-14);
}

TEST(Norms, TailMass) {
  const Grid g = make(1, 1.0, 10);
  Field f(g);
  f.values[0] = 3.0;
  f.values[5] = 1.0;
  EXPECT_NEAR(tail_mass(f), 0.75, 1e-15);
  EXPECT_NEAR(max_abs_coordinate(g), 1.0, 1e-15);
}

TEST(Oracles, AnnulusIntegralsClosedForm) {
  EXPECT_NEAR(annulus_bracket_integral(1, 0.0, 1.0), 2.0 * std::atan(1.0), 1e-14);
  EXPECT_NEAR(annulus_bracket_integral(2, 1.0, 3.0), kPi * std::log(5.0), 1e-13);
  const double r1 = 0.5, r2 = 4.0;
  auto f3 = [](double r) { return std::asinh(r) - r / std::sqrt(1.0 + r * r); };
  EXPECT_NEAR(annulus_bracket_integral(3, r1, r2), 4.0 * kPi * (f3(r2) - f3(r1)), 1e-12);
  // midpoint rule on the radial integral
  double s = 0.0;
  const int m = 200000;
  for (int i = 0; i < m; ++i) {
    const double r = r1 + (i + 0.5) * (r2 - r1) / m;
    s += 4.0 * kPi * r * r * std::pow(1.0 + r * r, -1.5) * (r2 - r1) / m;
  }
  EXPECT_NEAR(annulus_bracket_integral(3, r1, r2), s, 1e-8);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * kPi / 3.0, 1e-15);
  EXPECT_NEAR(unit_ball_volume(2), kPi, 1e-15);
}

TEST(Oracles, DftOracleIdentity) {
  const Grid g = make(2, 3.0, 64);
  const Field u = bump_field(g, 1.0, Point{0.5, 0.0, 0.0});
  const Field v = dft_multiplier_oracle(u, [](const Point&) { return cplx(1.0); });
  EXPECT_LE(relative_l2(v, u), 1e-12);
}
