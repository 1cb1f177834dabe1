#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fiolab/common.hpp"
#include "fiolab/grid.hpp"
#include "fiolab/phase.hpp"

namespace fiolab {

class RadialCutoffs {
 public:
  explicit RadialCutoffs(int k_max);

  int k_max() const { return k_max_; }
  // theta(s), supported in (1/4, 4), with sum over k in Z of theta(2^-k s) = 1.
  static double theta(double s);
  double theta_k(int k, double r) const { return theta(std::ldexp(r, -k)); }
  double theta_0(double r) const;
  // sum of theta_k for k_lo <= k <= k_hi
  double window(double r, int k_lo, int k_hi) const;

 private:
  int k_max_;
};

RadialCutoffs make_radial_cutoffs(int k_max);

// Same construction as theta, used as the x-space Littlewood-Paley family:
// psi(x) = theta(|x|) rescaled to supp in 1/2 <= |x| <= 2.
double lp_psi(double s);
// psi_0 = 1 - sum_{k >= 1} psi(2^-k s)
double lp_psi0(double s);
// 1 on 1/2 <= |x| <= 2, 0 outside 1/4 < |x| < 4.
double lp_psi_tilde(double s);

class AngularFrame {
 public:
  int n = 2;
  int k = 1;
  Point y{};
  double c0 = 0.5;       // spacing constant C0
  double radius = 1.0;   // 2^{-k/2} <y>^{-1/2}
  double delta = 0.5;    // C0 * radius
  double step = 0.5;     // 2 pi / N for n = 2
  std::vector<Point> directions;

  int count() const { return static_cast<int>(directions.size()); }
  // c0 * radius with c0 = 2 C0
  double vanishing_radius() const { return 2.0 * c0 * radius; }
  double cutoff(int nu, const Point& xi) const;
  // nonzero (nu, chi) pairs at xi
  void cutoffs(const Point& xi, std::vector<std::pair<int, double>>& out) const;
  double min_spacing() const;

 private:
  double weight(int nu, const Point& w) const;
};

AngularFrame make_angular_frame(int n, int k, const Point& y, double c0 = 0.5);

enum class AtomProfile { TensorHaarSmoothed, RadialDerivative };

AtomProfile parse_atom_profile(const std::string& s);
std::string to_string(AtomProfile p);

class Atom {
 public:
  Atom(int n, const Point& y0, double q, AtomProfile profile);

  int dim() const { return n_; }
  const Point& center() const { return y0_; }
  double side() const { return q_; }
  AtomProfile profile() const { return profile_; }
  double sup() const { return std::pow(q_, -n_); }
  double operator()(const Point& y) const;
  Field sample(const Grid& g) const;

 private:
  int n_;
  Point y0_;
  double q_;
  AtomProfile profile_;
};

Atom make_atom(int n, const Point& y0, double q, const std::string& profile);
// sup over (0, 1) of |d/dv exp(1 - 1/(1 - v^2))|
double bump_derivative_sup();

struct Rectangle {
  Point center{};
  Point dir{};
  double half_thickness = 0.0;
  double half_width = 0.0;
  bool contains(const Point& x, int n) const;
};

struct ExceptionalSet {
  int n = 2;
  int j = 0;
  double q = 1.0;
  Point y0{};
  double m_raw = 0.0;
  double m_used = 0.0;
  double lip = 0.0;
  std::vector<Rectangle> rects;
  Grid grid;
  std::vector<std::uint8_t> mask;
  double volume_estimate = 0.0;

  bool member(const Point& x) const;
};

ExceptionalSet build_exceptional_set(const PhaseFunction& phi, const Point& y0, int j, double M,
                                     const Grid& x_grid, double c0 = 0.5, double m_min = 1.0);

// Bounding box [lo, hi] of the union of rectangles.
std::pair<Point, Point> rectangles_bounds(const ExceptionalSet& s);

struct TaylorReport {
  double ray_sup = 0.0;        // sup |r(y, tau xi^nu)|
  double remainder_sup = 0.0;  // sup |r| on the sampled sector
  double gradient_ratio_sup = 0.0;  // sup |d_xi r| / (2^{-k/2} <y>^{1/2})
  bool pass = false;
};

TaylorReport taylor_remainder_check(const PhaseFunction& phi, const AngularFrame& frame,
                                    int radial_samples = 5, int angular_samples = 9,
                                    double ceiling = 1e3);

}  // namespace fiolab
