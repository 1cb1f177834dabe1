#pragma once

#include <map>
#include <string>
#include <vector>

#include "fiolab/amplitude.hpp"
#include "fiolab/common.hpp"
#include "fiolab/decomp.hpp"
#include "fiolab/grid.hpp"
#include "fiolab/phase.hpp"

namespace fiolab {

struct QuadratureSpec {
  int k_min = 1;
  int k_max = 8;
  int radial_points = 0;   // 0 selects the Nyquist count
  int angular_points = 0;  // nodes on the outermost ring; 0 selects the Nyquist count
  double oversample = 1.5;
  int workers = 1;
};

enum class KernelVariantType { Full, Dyadic, DyadicAngular, Far };

struct KernelVariant {
  KernelVariantType type = KernelVariantType::Full;
  int k = 0;
  int nu = -1;
  double c0 = 0.5;
  double wave_k = 0.25;

  static KernelVariant full() { return {}; }
  static KernelVariant dyadic(int k) { return {KernelVariantType::Dyadic, k, -1, 0.5, 0.25}; }
  static KernelVariant angular(int k, int nu, double c0 = 0.5) {
    return {KernelVariantType::DyadicAngular, k, nu, c0, 0.25};
  }
  static KernelVariant far(double wave_k = 0.25) {
    return {KernelVariantType::Far, 0, -1, 0.5, wave_k};
  }
};

// Trapezoid nodes in polar coordinates on [rho_lo, rho_hi].
struct PolarRule {
  int n = 2;
  double rho_lo = 0.0;
  double rho_hi = 0.0;
  double d_rho = 0.0;
  int radial_count = 0;            // rings, endpoints included
  std::vector<int> angular_counts; // per ring
  double outer = 0.0;              // node count scale on the outermost ring
  double reach = 0.0;              // X_max used for the Nyquist rule
  std::size_t node_count() const;
};

// Throws QuadratureRefusal when oversample < 1 or user counts fall short.
PolarRule make_polar_rule(int n, double rho_lo, double rho_hi, double reach,
                          const QuadratureSpec& q);

// Angular nodes and weights of ring `ring` (weights include rho^{n-1} d_rho).
void ring_nodes(const PolarRule& rule, int ring, std::vector<Point>& xi,
                std::vector<double>& w);

struct KernelValue {
  cplx value{};
  double abs_sum = 0.0;  // sum of |terms|, for roundoff floors
  std::size_t nodes = 0;
};

KernelValue kernel_F_detailed(const Amplitude& b, const PhaseFunction& phi, const Point& x,
                              const Point& y, const QuadratureSpec& quad,
                              const KernelVariant& variant = KernelVariant::full());
cplx kernel_F(const Amplitude& b, const PhaseFunction& phi, const Point& x, const Point& y,
              const QuadratureSpec& quad, const KernelVariant& variant = KernelVariant::full());

// F(., y) on a grid by a lattice trapezoid; b must be separable in x.
// Supports full, dyadic and dyadic_angular variants.
Field kernel_field(const Amplitude& b, const PhaseFunction& phi, const Point& y,
                   const Grid& x_grid, const QuadratureSpec& quad, const KernelVariant& variant);

// Points per axis needed by kernel_field / lattice paths for the given
// frequency reach and oversample.
int lattice_points_required(double extent, double rho_hi, double oversample);

enum class Method { Auto, Polar, Lattice };

Field apply_T(const Amplitude& b, const PhaseFunction& phi, const Field& u,
              const QuadratureSpec& quad, Method method = Method::Auto);
Field apply_A(const Amplitude& a, const PhaseFunction& phi, const Field& f,
              const QuadratureSpec& quad, Method method = Method::Auto);

enum class DilationMode { Exact, Cubic };

// U_lambda f(x) = f(lambda x). Exact mode keeps the samples and rescales
// the grid; Cubic mode resamples onto the original grid.
Field dilate(const Field& f, double lambda, DilationMode mode = DilationMode::Exact);
// Separable cubic convolution resampling; zero outside the source grid.
Field resample_cubic(const Field& f, const Grid& target);

struct RescaledOperator {
  PhaseFunction phase;
  Amplitude amplitude;
  int k = 0;
};

// Symbols of A'_k: phi(2^k x, 2^-k xi) and psi~(x) a(2^k x, 2^-k xi).
RescaledOperator rescaled_operator_symbols(const Amplitude& a, const PhaseFunction& phi, int k);

// Sampled C_{alpha,beta}(k) = sup |d_x^alpha d_xi^beta a(2^k x, 2^-k xi)| / <xi>^{m_p - |beta|}
// over 1/4 <= |x| <= 4, for |alpha| + |beta| <= max_order.
std::map<std::string, double> rescaled_symbol_constants(const Amplitude& a, int k, double m_p,
                                                        int max_order = 2);

Field weight_multiply(const Field& f, double s);
Field bessel_multiply(const Field& f, double sigma);
double lp_norm(const Field& f, double p);
double sobolev_norm(const Field& f, double sigma, double s, double p);

// Fraction of the L1 mass outside the box of half-width frac * extent.
double tail_mass(const Field& f, double frac = 0.8);
double max_abs_coordinate(const Grid& g);  // max |x| over grid points

}  // namespace fiolab
