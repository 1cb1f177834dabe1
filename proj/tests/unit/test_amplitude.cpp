#include <gtest/gtest.h>

#include "fiolab/amplitude.hpp"

using namespace fiolab;

TEST(Amplitude, SgPowerUnitAtZeroOrders) {
  const Amplitude b = make_builtin_amplitude("sg_power", 2, Orders{}, Flavor::I);
  EXPECT_DOUBLE_EQ(std::abs(b(Point{}, Point{}, Point{32.0, 0.0, 0.0})), 1.0);
  EXPECT_EQ(std::abs(b(Point{}, Point{}, Point{7.9, 0.0, 0.0})), 0.0);
}

TEST(Amplitude, SgPowerClosedForm) {
  const Orders o{-0.25, -0.5, -0.5};
  const Amplitude b = make_builtin_amplitude("sg_power", 2, o, Flavor::I);
  const Point x{1.0, 2.0, 0.0}, y{-3.0, 0.0, 0.0}, xi{30.0, 40.0, 0.0};
  const double ref = std::pow(6.0, -0.125) * std::pow(10.0, -0.25) * std::pow(2501.0, -0.25);
  EXPECT_NEAR(b(x, y, xi).real(), ref, 1e-15);
  EXPECT_EQ(b(x, y, xi).imag(), 0.0);
  const Amplitude a = make_builtin_amplitude("sg_power_xi", 2, Orders{-1.0, 0.0, 0.5}, Flavor::I);
  EXPECT_NEAR(a(x, xi).real(), std::pow(6.0, -0.5) * std::pow(2501.0, 0.25), 1e-12);
  EXPECT_EQ(a.kind(), AmplitudeKind::TwoArg);
}

TEST(Amplitude, EtaTransitionBand) {
  EXPECT_EQ(eta(8.0), 0.0);
  EXPECT_EQ(eta(16.0), 1.0);
  EXPECT_EQ(eta(100.0), 1.0);
  double prev = 0.0;
  for (double r = 8.0; r <= 16.0; r += 0.25) {
    const double v = eta(r);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_DOUBLE_EQ(eta(12.0), 0.5);
}

TEST(Amplitude, SeparableTermsReproduceEvaluator) {
  for (const auto& id : {"sg_power", "sg_power_xi"}) {
    SCOPED_TRACE(id);
    const Amplitude b = make_builtin_amplitude(id, 2, Orders{-0.5, -0.25, -0.5}, Flavor::I);
    ASSERT_TRUE(b.separable());
    const Point x{0.3, -1.2, 0.0}, y{2.0, 1.0, 0.0}, xi{-11.0, 9.0, 0.0};
    cplx sum{};
    for (const auto& t : b.terms()) sum += t.x(x) * t.y(y) * t.xi(xi);
    EXPECT_NEAR(std::abs(sum - b(x, y, xi)), 0.0, 1e-14);
  }
}

TEST(Amplitude, ZeroAmplitude) {
  const Amplitude z = make_builtin_amplitude("zero", 2, Orders{}, Flavor::I);
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(std::abs(z(Point{}, Point{}, Point{40.0, 0.0, 0.0})), 0.0);
  EXPECT_THROW(make_builtin_amplitude("nope", 2, Orders{}, Flavor::I), ConfigError);
}

TEST(Amplitude, SymbolCertificateZeroOrder) {
  const Amplitude b = make_builtin_amplitude("sg_power", 2, Orders{}, Flavor::I);
  const SymbolCertificate c = certify_symbol(b, SymbolSampleSpec{}, 0);
  EXPECT_TRUE(c.pass);
  ASSERT_EQ(c.constants.size(), 1u);
  EXPECT_NEAR(c.constants.begin()->second, 1.0, 1e-12);
}

TEST(Amplitude, SymbolCertificateXiDerivative) {
  const Amplitude b = make_builtin_amplitude("sg_power", 2, Orders{0.0, 0.0, -0.5}, Flavor::I);
  const SymbolCertificate c = certify_symbol(b, SymbolSampleSpec{}, 1);
  EXPECT_TRUE(c.pass);
  // independent sup of |d_xi1 (<xi>^{-1/2} eta)| / <xi>^{-3/2} over the sampled shells
  double ref = 0.0;
  const SymbolSampleSpec s;
  for (double r = s.xi_min; r <= s.xi_max; r *= 2.0)
    for (int d = 0; d < s.directions; ++d) {
      const double a = 2.0 * kPi * d / s.directions;
      const double x1 = r * std::cos(a);
      const double h = 1e-5 * r;
      auto f = [&](double t) {
        const double rr = std::hypot(t, r * std::sin(a));
        return eta(rr) * std::pow(1.0 + rr * rr, -0.25);
      };
      const double der = (f(x1 + h) - f(x1 - h)) / (2 * h);
      ref = std::max(ref, std::abs(der) / std::pow(1.0 + r * r, -0.75));
    }
  double got = 0.0;
  for (const auto& [k, v] : c.constants)
    if (k.find("(0,0;0,0;1,0)") != std::string::npos) got = v;
  EXPECT_GT(got, 0.0);
  EXPECT_NEAR(got, ref, 0.05 * ref);
}

TEST(Amplitude, WavefrontSplitSumsToOriginal) {
  const PhaseFunction phi = make_builtin_phase("shifted_wave", 2);
  const Amplitude b = make_builtin_amplitude("sg_power", 2, Orders{-0.5, 0.0, -0.5}, Flavor::I);
  const auto [near, far] = wavefront_split(b, phi, 0.25);
  for (double t : {0.0, 0.5, 1.0, 3.0, 20.0}) {
    const Point x{t, 0.5, 0.0}, y{1.0, 0.0, 0.0}, xi{10.0, 30.0, 0.0};
    EXPECT_EQ(near(x, y, xi) + far(x, y, xi), b(x, y, xi));
  }
  const Point y{2.0, 0.0, 0.0}, xi{16.0, 0.0, 0.0};
  const Point on = phi.grad_xi(y, xi);
  EXPECT_EQ(std::abs(far(on, y, xi)), 0.0);
}

TEST(Amplitude, WavefrontProfile) {
  EXPECT_EQ(wavefront_profile(0.0), 1.0);
  EXPECT_EQ(wavefront_profile(0.5), 1.0);
  EXPECT_EQ(wavefront_profile(1.0), 0.0);
  EXPECT_NEAR(wavefront_profile(0.75), 0.5, 1e-15);
}

TEST(Amplitude, SupportEquivalenceBrackets) {
  const SupportEquivalence e =
      support_equivalence(make_builtin_phase("shifted_wave", 2), 0.25, PhaseSampleSpec{});
  EXPECT_GT(e.c1, 0.0);
  EXPECT_LE(e.c1, 1.0);
  EXPECT_GE(e.c2, 1.0);
  EXPECT_LE(e.ratio_min, e.ratio_max);
}
