#include "fiolab/decomp.hpp"

#include <algorithm>
#include <limits>

namespace fiolab {

namespace {

// exp(-1 / (1 - (t / half)^2)) on |t| < half
double log_bump(double t, double half) {
  const double u = t / half;
  const double w = 1.0 - u * u;
  return w > 0.0 ? std::exp(-1.0 / w) : 0.0;
}

double normalized_log_bump(double s, double half) {
  if (!(s > 0.0)) return 0.0;
  const double t = std::log2(s);
  const double b = log_bump(t, half);
  if (b == 0.0) return 0.0;
  const double f = std::floor(t);
  const int reach = static_cast<int>(std::ceil(half)) + 1;
  double d = 0.0;
  for (int m = -reach; m <= reach; ++m) d += log_bump(t - (f + m), half);
  return b / d;
}

}  // namespace

RadialCutoffs::RadialCutoffs(int k_max) : k_max_(k_max) {
  if (k_max < 1) throw DomainError("k_max must be at least 1");
}

double RadialCutoffs::theta(double s) { return normalized_log_bump(s, 2.0); }

double RadialCutoffs::theta_0(double r) const { return 1.0 - window(r, 1, k_max_); }

double RadialCutoffs::window(double r, int k_lo, int k_hi) const {
  if (!(r > 0.0)) return 0.0;
  const double t = std::log2(r);
  const int lo = std::max(k_lo, static_cast<int>(std::floor(t)) - 2);
  const int hi = std::min(k_hi, static_cast<int>(std::ceil(t)) + 2);
  double s = 0.0;
  for (int k = lo; k <= hi; ++k) s += theta_k(k, r);
  return s;
}

RadialCutoffs make_radial_cutoffs(int k_max) { return RadialCutoffs(k_max); }

double lp_psi(double s) { return normalized_log_bump(s, 2.0); }

double lp_psi0(double s) {
  if (s <= 0.5) return 1.0;
  double acc = 0.0;
  const int kmax = static_cast<int>(std::ceil(std::log2(s))) + 2;
  for (int k = 1; k <= kmax; ++k) acc += lp_psi(std::ldexp(s, -k));
  return 1.0 - acc;
}

double lp_psi_tilde(double s) {
  if (!(s > 0.0)) return 0.0;
  return 1.0 - smooth_step(std::abs(std::log2(s)) - 1.0);
}

namespace {

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a > kPi) a -= 2.0 * kPi;
  if (a < -kPi) a += 2.0 * kPi;
  return a;
}

// 1 on |t| <= 1/4, 0 on |t| >= 3/4
double plateau_bump(double t) { return 1.0 - smooth_step((std::abs(t) - 0.25) / 0.5); }

// 1 on |t| <= 1/4, 0 on |t| >= 0.95
double wide_bump(double t) { return 1.0 - smooth_step((std::abs(t) - 0.25) / 0.7); }

Point unit_of(const Point& xi, int n) { return scaled(xi, 1.0 / norm(xi, n), n); }

}  // namespace

double AngularFrame::weight(int nu, const Point& w) const {
  if (n == 2) {
    const double a = std::atan2(w[1], w[0]);
    return plateau_bump(wrap_angle(a - 2.0 * kPi * nu / count()) / step);
  }
  const double c = std::clamp(dot(w, directions[nu], n), -1.0, 1.0);
  return wide_bump(std::acos(c) / delta);
}

void AngularFrame::cutoffs(const Point& xi, std::vector<std::pair<int, double>>& out) const {
  out.clear();
  if (n == 1) {
    out.push_back({xi[0] > 0.0 ? 0 : 1, 1.0});
    return;
  }
  const Point w = unit_of(xi, n);
  if (n == 2) {
    const int N = count();
    const double a = std::atan2(w[1], w[0]);
    const long c = std::lround(a / step);
    for (long d = -1; d <= 1; ++d) {
      const int nu = static_cast<int>(((c + d) % N + N) % N);
      const double v = weight(nu, w);
      if (v > 0.0) out.push_back({nu, v});
    }
  } else {
    for (int nu = 0; nu < count(); ++nu) {
      const double v = weight(nu, w);
      if (v > 0.0) out.push_back({nu, v});
    }
  }
  double s = 0.0;
  for (const auto& p : out) s += p.second;
  for (auto& p : out) p.second /= s;
}

double AngularFrame::cutoff(int nu, const Point& xi) const {
  std::vector<std::pair<int, double>> cs;
  cutoffs(xi, cs);
  for (const auto& [i, v] : cs)
    if (i == nu) return v;
  return 0.0;
}

double AngularFrame::min_spacing() const {
  double m = std::numeric_limits<double>::infinity();
  if (n == 2) {
    for (int i = 0; i < count(); ++i) {
      const int j = (i + 1) % count();
      m = std::min(m, norm(sub(directions[i], directions[j], n), n));
    }
    return m;
  }
  for (int i = 0; i < count(); ++i)
    for (int j = i + 1; j < count(); ++j)
      m = std::min(m, norm(sub(directions[i], directions[j], n), n));
  return m;
}

AngularFrame make_angular_frame(int n, int k, const Point& y, double c0) {
  if (k < 1) throw DomainError("angular frame requires k >= 1");
  if (!(c0 > 0.0 && c0 < 1.0)) throw DomainError("spacing constant C0 must lie in (0, 1)");
  AngularFrame f;
  f.n = n;
  f.k = k;
  f.y = y;
  f.c0 = c0;
  f.radius = std::pow(2.0, -0.5 * k) / std::sqrt(bracket(y, n));
  f.delta = c0 * f.radius;
  if (n == 1) {
    f.directions = {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
    f.step = kPi;
    return f;
  }
  if (n == 2) {
    const int N = static_cast<int>(std::ceil(2.0 * kPi / f.delta));
    f.step = 2.0 * kPi / N;
    for (int nu = 0; nu < N; ++nu) {
      const double a = f.step * nu;
      f.directions.push_back({std::cos(a), std::sin(a), 0.0});
    }
    return f;
  }
  const int rings = static_cast<int>(std::ceil(kPi / f.delta));
  const double dth = kPi / rings;
  f.step = dth;
  for (int i = 0; i <= rings; ++i) {
    const double th = i * dth;
    const int m = (i == 0 || i == rings)
                      ? 1
                      : static_cast<int>(std::ceil(2.0 * kPi * std::sin(th) / f.delta));
    const double off = (i % 2) ? 0.5 : 0.0;
    for (int a = 0; a < m; ++a) {
      const double ph = 2.0 * kPi * (a + off) / m;
      f.directions.push_back(
          {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
    }
  }
  return f;
}

AtomProfile parse_atom_profile(const std::string& s) {
  if (s == "tensor_haar_smoothed") return AtomProfile::TensorHaarSmoothed;
  if (s == "radial_derivative") return AtomProfile::RadialDerivative;
  throw ConfigError("unknown atom profile '" + s + "'");
}

std::string to_string(AtomProfile p) {
  return p == AtomProfile::TensorHaarSmoothed ? "tensor_haar_smoothed" : "radial_derivative";
}

double bump_derivative_sup() {
  static const double value = [] {
    auto f = [](double v) { return std::abs(unit_bump_derivative(v)); };
    int best = 1;
    const int m = 4096;
    for (int i = 1; i < m; ++i)
      if (f(static_cast<double>(i) / m) > f(static_cast<double>(best) / m)) best = i;
    double a = (best - 1.0) / m, b = (best + 1.0) / m;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 200; ++it) {
      const double c = b - g * (b - a), d = a + g * (b - a);
      if (f(c) > f(d))
        b = d;
      else
        a = c;
    }
    return f(0.5 * (a + b));
  }();
  return value;
}

Atom::Atom(int n, const Point& y0, double q, AtomProfile profile)
    : n_(n), y0_(y0), q_(q), profile_(profile) {
  if (!(q > 0.0)) throw DomainError("atom side length must be positive");
}

double Atom::operator()(const Point& y) const {
  Point t{};
  for (int i = 0; i < n_; ++i) t[i] = (y[i] - y0_[i]) / q_;
  const double s = sup();
  if (profile_ == AtomProfile::TensorHaarSmoothed) {
    double v = unit_bump(4.0 * t[0] - 1.0) - unit_bump(4.0 * t[0] + 1.0);
    for (int i = 1; i < n_; ++i) v *= unit_bump(2.0 * t[i]);
    return s * v;
  }
  const double r = norm(t, n_);
  if (r == 0.0 || r >= 0.5) return 0.0;
  return s * unit_bump_derivative(2.0 * r) * (t[0] / r) / bump_derivative_sup();
}

Field Atom::sample(const Grid& g) const {
  Field f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f.values[i] = (*this)(g.point(i));
  return f;
}

Atom make_atom(int n, const Point& y0, double q, const std::string& profile) {
  return Atom(n, y0, q, parse_atom_profile(profile));
}

bool Rectangle::contains(const Point& x, int n) const {
  const Point d = sub(x, center, n);
  const double par = dot(d, dir, n);
  if (std::abs(par) > half_thickness) return false;
  const Point perp = axpy(-par, dir, d, n);
  return norm(perp, n) <= half_width;
}

bool ExceptionalSet::member(const Point& x) const {
  for (const auto& r : rects)
    if (r.contains(x, n)) return true;
  return false;
}

namespace {

Point rect_halfbox(const Rectangle& r, int n) {
  Point h{};
  for (int i = 0; i < n; ++i) {
    const double e = std::abs(r.dir[i]);
    h[i] = r.half_thickness * e + r.half_width * std::sqrt(std::max(0.0, 1.0 - e * e));
  }
  return h;
}

}  // namespace

std::pair<Point, Point> rectangles_bounds(const ExceptionalSet& s) {
  Point lo{}, hi{};
  for (int i = 0; i < s.n; ++i) {
    lo[i] = std::numeric_limits<double>::infinity();
    hi[i] = -std::numeric_limits<double>::infinity();
  }
  for (const auto& r : s.rects) {
    const Point h = rect_halfbox(r, s.n);
    for (int i = 0; i < s.n; ++i) {
      lo[i] = std::min(lo[i], r.center[i] - h[i]);
      hi[i] = std::max(hi[i], r.center[i] + h[i]);
    }
  }
  return {lo, hi};
}

ExceptionalSet build_exceptional_set(const PhaseFunction& phi, const Point& y0, int j, double M,
                                     const Grid& x_grid, double c0, double m_min) {
  if (x_grid.size() == 0 || x_grid.points_per_axis < 1)
    throw DomainError("exceptional set needs a non-empty grid");
  const int n = phi.dim();
  ExceptionalSet s;
  s.n = n;
  s.j = j;
  s.q = std::ldexp(1.0, -j);
  s.y0 = y0;
  s.m_raw = M;
  s.grid = x_grid;

  // y-subgrid of Q with spacing q/4
  std::vector<Point> ys;
  {
    const int per = 5;
    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= per;
    for (std::size_t idx = 0; idx < total; ++idx) {
      Point p = y0;
      std::size_t r = idx;
      for (int d = n - 1; d >= 0; --d) {
        p[d] += s.q * (-0.5 + 0.25 * static_cast<double>(r % per));
        r /= per;
      }
      ys.push_back(p);
    }
  }
  const auto dirs = sample_directions(n, 64);
  double lip = 0.0;
  for (const auto& y : ys)
    for (const auto& w : dirs) lip = std::max(lip, frobenius(phi.mixed_hessian(y, w), n));
  s.lip = lip;
  s.m_used = std::max(M, m_min) + lip * std::sqrt(static_cast<double>(n)) / 8.0;

  for (const auto& y : ys) {
    const AngularFrame fr = make_angular_frame(n, j, y, c0);
    const double thick = s.m_used * std::ldexp(1.0, -j);
    const double wide = s.m_used * std::pow(2.0, -0.5 * j) * std::sqrt(bracket(y, n));
    for (const auto& e : fr.directions)
      s.rects.push_back(Rectangle{phi.grad_xi(y, e), e, thick, wide});
  }

  const std::size_t total = x_grid.size();
  s.mask.assign(total, 0);
  const double h = x_grid.spacing();
  const int P = x_grid.points_per_axis;
  for (const auto& r : s.rects) {
    const Point hb = rect_halfbox(r, n);
    std::array<int, 3> lo{}, hi{};
    bool empty = false;
    for (int d = 0; d < n; ++d) {
      const double base = x_grid.center[d] - x_grid.extent;
      lo[d] = std::max(0, static_cast<int>(std::floor((r.center[d] - hb[d] - base) / h)));
      hi[d] = std::min(P - 1, static_cast<int>(std::ceil((r.center[d] + hb[d] - base) / h)));
      if (lo[d] > hi[d]) empty = true;
    }
    if (empty) continue;
    std::array<int, 3> ix = lo;
    while (true) {
      const std::size_t f = x_grid.flat(ix);
      if (!s.mask[f]) {
        Point x{};
        for (int d = 0; d < n; ++d) x[d] = x_grid.coord(d, ix[d]);
        if (r.contains(x, n)) s.mask[f] = 1;
      }
      int d = n - 1;
      while (d >= 0) {
        if (++ix[d] <= hi[d]) break;
        ix[d] = lo[d];
        --d;
      }
      if (d < 0) break;
    }
  }
  std::size_t count = 0;
  for (auto v : s.mask) count += v;
  s.volume_estimate = static_cast<double>(count) * x_grid.cell_volume();
  return s;
}

TaylorReport taylor_remainder_check(const PhaseFunction& phi, const AngularFrame& frame,
                                    int radial_samples, int angular_samples, double ceiling) {
  const int n = phi.dim();
  const int k = frame.k;
  const Point& y = frame.y;
  const double norm_scale = std::pow(2.0, -0.5 * k) * std::sqrt(bracket(y, n));
  TaylorReport rep;
  const double lo = std::ldexp(1.0, k - 2), hi = std::ldexp(1.0, k + 2);
  const double reach = (n == 2 ? 0.75 * frame.step : 0.95 * frame.delta);
  for (int nu = 0; nu < frame.count(); ++nu) {
    const Point& e = frame.directions[nu];
    Point perp{};
    if (n >= 2) {
      perp[0] = -e[1];
      perp[1] = e[0];
      if (norm(perp, n) < 1e-12) perp = {1.0, 0.0, 0.0};
      perp = scaled(perp, 1.0 / norm(perp, n), n);
    }
    const Point g0 = phi.grad_xi(y, e);
    for (int ir = 0; ir < radial_samples; ++ir) {
      const double rho =
          radial_samples > 1 ? lo * std::pow(hi / lo, double(ir) / (radial_samples - 1)) : lo;
      const double on_ray = phi.eval(y, scaled(e, rho, n)) - dot(g0, scaled(e, rho, n), n);
      rep.ray_sup = std::max(rep.ray_sup, std::abs(on_ray));
      if (n == 1) continue;
      for (int ia = 0; ia < angular_samples; ++ia) {
        const double d =
            angular_samples > 1 ? -reach + 2.0 * reach * ia / (angular_samples - 1) : 0.0;
        const Point w = axpy(std::sin(d), perp, scaled(e, std::cos(d), n), n);
        const Point xi = scaled(w, rho, n);
        const double r = phi.eval(y, xi) - dot(g0, xi, n);
        rep.remainder_sup = std::max(rep.remainder_sup, std::abs(r));
        const Point dr = sub(phi.grad_xi(y, xi), g0, n);
        rep.gradient_ratio_sup = std::max(rep.gradient_ratio_sup, norm(dr, n) / norm_scale);
      }
    }
  }
  rep.pass = rep.gradient_ratio_sup <= ceiling && rep.remainder_sup <= ceiling &&
             rep.ray_sup <= 1e-9 * (1.0 + hi * bracket(y, n));
  return rep;
}

}  // namespace fiolab
