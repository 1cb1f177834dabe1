#include "fiolab/engine.hpp"

#include <algorithm>
#include <sstream>

#include "fft.hpp"

namespace fiolab {

using detail::lattice_frequency;

std::size_t PolarRule::node_count() const {
  std::size_t s = 0;
  for (int c : angular_counts) s += static_cast<std::size_t>(c);
  return s;
}

namespace {

std::string refusal_text(const std::string& why, long long r, long long a) {
  std::ostringstream os;
  os << why << "; required radial_points >= " << r << ", angular_points >= " << a;
  return os.str();
}

void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int l = 2; l <= m; ++l) {
        const double p2 = ((2.0 * l - 1.0) * z * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

constexpr double kWindowNodesPerLow = 32.0;

PolarRule make_polar_rule(int n, double rho_lo, double rho_hi, double reach,
                          const QuadratureSpec& q) {
  PolarRule rule;
  rule.n = n;
  rule.rho_lo = rho_lo;
  rule.rho_hi = rho_hi;
  rule.reach = reach;
  const double os = q.oversample;
  const double os_eff = os >= 1.0 ? os : 1.0;
  const double span = std::max(0.0, rho_hi - rho_lo);
  // the cutoff windows vary on the scale of rho_lo
  const double window_nodes = rho_lo > 0.0 ? kWindowNodesPerLow * span / rho_lo : 0.0;
  const long long req_r = std::max<long long>(
      8, static_cast<long long>(std::ceil(std::max(os_eff * reach * span / kPi, window_nodes))) + 1);
  const long long req_a =
      std::max<long long>(8, static_cast<long long>(std::ceil(2.0 * os_eff * rho_hi * reach)));
  if (!(os >= 1.0))
    throw QuadratureRefusal(refusal_text("oversample must be >= 1", req_r, req_a), req_r, req_a);
  if (q.radial_points > 0 && q.radial_points < req_r)
    throw QuadratureRefusal(refusal_text("radial node count below the Nyquist bound", req_r, req_a),
                            req_r, req_a);
  if (q.angular_points > 0 && q.angular_points < req_a)
    throw QuadratureRefusal(
        refusal_text("angular node count below the Nyquist bound", req_r, req_a), req_r, req_a);
  if (!(rho_hi > rho_lo)) return rule;
  const int nr = q.radial_points > 0 ? q.radial_points : static_cast<int>(req_r);
  const double outer = q.angular_points > 0 ? q.angular_points : static_cast<double>(req_a);
  rule.radial_count = nr;
  rule.outer = outer;
  rule.d_rho = (rho_hi - rho_lo) / (nr - 1);
  for (int i = 0; i < nr; ++i) {
    const double rho = rho_lo + i * rule.d_rho;
    const double frac = rho / rho_hi;
    int c;
    if (n == 1) {
      c = 2;
    } else if (n == 2) {
      c = std::max(8, static_cast<int>(std::ceil(outer * frac)));
    } else {
      const int pol = std::max(4, static_cast<int>(std::ceil(0.5 * outer * frac)));
      const int az = std::max(8, static_cast<int>(std::ceil(outer * frac)));
      c = pol * az;
    }
    rule.angular_counts.push_back(c);
  }
  return rule;
}

void ring_nodes(const PolarRule& rule, int ring, std::vector<Point>& xi, std::vector<double>& w) {
  const double rho = rule.rho_lo + ring * rule.d_rho;
  const double tw = (ring == 0 || ring == rule.radial_count - 1) ? 0.5 : 1.0;
  const double base = tw * rule.d_rho;
  const int c = rule.angular_counts[ring];
  xi.clear();
  w.clear();
  if (rule.n == 1) {
    xi.push_back({rho, 0.0, 0.0});
    xi.push_back({-rho, 0.0, 0.0});
    w.assign(2, base);
    return;
  }
  if (rule.n == 2) {
    const double wa = base * rho * 2.0 * kPi / c;
    for (int j = 0; j < c; ++j) {
      const double a = 2.0 * kPi * j / c;
      xi.push_back({rho * std::cos(a), rho * std::sin(a), 0.0});
      w.push_back(wa);
    }
    return;
  }
  const double frac = rho / rule.rho_hi;
  const int pol = std::max(4, static_cast<int>(std::ceil(0.5 * rule.outer * frac)));
  const int az = std::max(8, static_cast<int>(std::ceil(rule.outer * frac)));
  std::vector<double> gx, gw;
  gauss_legendre(pol, gx, gw);
  for (int p = 0; p < pol; ++p) {
    const double ct = gx[p];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int a = 0; a < az; ++a) {
      const double ph = 2.0 * kPi * a / az;
      xi.push_back({rho * st * std::cos(ph), rho * st * std::sin(ph), rho * ct});
      w.push_back(base * rho * rho * gw[p] * 2.0 * kPi / az);
    }
  }
}

namespace {

struct RadialWindow {
  double lo = 0.0;
  double hi = 0.0;
  int k_lo = 1;
  int k_hi = 1;
  double operator()(double r) const {
    static const RadialCutoffs rc(1);
    return rc.window(r, k_lo, k_hi);
  }
};

RadialWindow window_for(const Amplitude& b, const QuadratureSpec& q, const KernelVariant& v) {
  RadialWindow w;
  if (v.type == KernelVariantType::Dyadic || v.type == KernelVariantType::DyadicAngular) {
    if (v.k < 1) throw DomainError("dyadic kernel requires k >= 1");
    w.k_lo = w.k_hi = v.k;
  } else {
    w.k_lo = q.k_min;
    w.k_hi = q.k_max;
  }
  if (w.k_hi < w.k_lo) throw ConfigError("quadrature k range is empty");
  w.lo = std::max(b.low_cutoff(), std::ldexp(1.0, w.k_lo - 2));
  w.hi = std::ldexp(1.0, w.k_hi + 2);
  return w;
}

double phase_reach(const PhaseFunction& phi, const Point& y) {
  return phi.gradient_reach(y, Point{}, 128);
}

}  // namespace

KernelValue kernel_F_detailed(const Amplitude& b, const PhaseFunction& phi, const Point& x,
                              const Point& y, const QuadratureSpec& quad,
                              const KernelVariant& variant) {
  const int n = phi.dim();
  const RadialWindow win = window_for(b, quad, variant);
  const double reach = norm(x, n) + phase_reach(phi, y);
  const PolarRule rule = make_polar_rule(n, win.lo, win.hi, reach, quad);
  KernelValue out;
  if (rule.radial_count == 0 || b.is_zero()) return out;

  Amplitude amp = b;
  if (variant.type == KernelVariantType::Far) amp = wavefront_split(b, phi, variant.wave_k).second;
  AngularFrame frame;
  const bool angular = variant.type == KernelVariantType::DyadicAngular;
  if (angular) {
    frame = make_angular_frame(n, variant.k, y, variant.c0);
    if (variant.nu < 0 || variant.nu >= frame.count())
      throw DomainError("angular index out of range");
  }

  std::vector<cplx> ring_sum(rule.radial_count);
  std::vector<double> ring_abs(rule.radial_count);
  parallel_for(rule.radial_count, quad.workers, [&](std::size_t rb, std::size_t re) {
    std::vector<Point> xs;
    std::vector<double> ws;
    std::vector<cplx> terms;
    std::vector<double> mags;
    std::vector<std::pair<int, double>> cs;
    for (std::size_t r = rb; r < re; ++r) {
      ring_nodes(rule, static_cast<int>(r), xs, ws);
      const double rho = rule.rho_lo + r * rule.d_rho;
      const double wr = win(rho);
      terms.assign(xs.size(), cplx{});
      mags.assign(xs.size(), 0.0);
      if (wr != 0.0) {
        for (std::size_t m = 0; m < xs.size(); ++m) {
          const Point& xi = xs[m];
          double c = wr * ws[m];
          if (angular) {
            frame.cutoffs(xi, cs);
            double chi = 0.0;
            for (const auto& [nu, v] : cs)
              if (nu == variant.nu) chi = v;
            c *= chi;
          }
          if (c == 0.0) continue;
          const cplx bv = amp(x, y, xi);
          if (bv == cplx{}) continue;
          const double ph = dot(x, xi, n) - phi.eval(y, xi);
          const cplx t = c * bv * std::polar(1.0, ph);
          terms[m] = t;
          mags[m] = std::abs(t);
        }
      }
      ring_sum[r] = pairwise_sum(std::span<const cplx>(terms));
      ring_abs[r] = pairwise_sum(std::span<const double>(mags));
    }
  });
  const double norm_c = std::pow(2.0 * kPi, -n);
  out.value = norm_c * pairwise_sum(std::span<const cplx>(ring_sum));
  out.abs_sum = norm_c * pairwise_sum(std::span<const double>(ring_abs));
  out.nodes = rule.node_count();
  return out;
}

cplx kernel_F(const Amplitude& b, const PhaseFunction& phi, const Point& x, const Point& y,
              const QuadratureSpec& quad, const KernelVariant& variant) {
  return kernel_F_detailed(b, phi, x, y, quad, variant).value;
}

int lattice_points_required(double extent, double rho_hi, double oversample) {
  return static_cast<int>(std::ceil(oversample * 2.0 * extent * rho_hi / kPi));
}

namespace {

void check_lattice(const Grid& g, double rho_hi, double os) {
  const int req = lattice_points_required(g.extent, rho_hi, std::max(os, 1.0));
  if (!(os >= 1.0) || g.points_per_axis < req) {
    std::ostringstream msg;
    msg << "lattice does not resolve |xi| <= " << rho_hi << " at oversample " << os
        << "; required points_per_axis >= " << req;
    throw QuadratureRefusal(msg.str(), 0, 0, req);
  }
}

}  // namespace

Field kernel_field(const Amplitude& b, const PhaseFunction& phi, const Point& y,
                   const Grid& x_grid, const QuadratureSpec& quad, const KernelVariant& variant) {
  if (variant.type == KernelVariantType::Far)
    throw DomainError("kernel_field does not support the far variant; use kernel_F");
  if (!b.separable()) throw DomainError("kernel_field requires an amplitude separable in x");
  const int n = phi.dim();
  if (x_grid.n != n) throw DomainError("grid dimension differs from phase dimension");
  const RadialWindow win = window_for(b, quad, variant);
  Field out(x_grid);
  if (!(win.hi > win.lo) || b.is_zero()) {
    check_lattice(x_grid, win.hi, quad.oversample);
    return out;
  }
  check_lattice(x_grid, win.hi, quad.oversample);
  const double reach = phi.gradient_reach(y, x_grid.center, 128);
  if (reach * quad.oversample > x_grid.extent) {
    std::ostringstream msg;
    msg << "kernel window too small: singular set reaches " << reach
        << " from the window centre; required extent >= " << reach * quad.oversample;
    throw QuadratureRefusal(msg.str(), 0, 0, 0);
  }
  AngularFrame frame;
  const bool angular = variant.type == KernelVariantType::DyadicAngular;
  if (angular) {
    frame = make_angular_frame(n, variant.k, y, variant.c0);
    if (variant.nu < 0 || variant.nu >= frame.count())
      throw DomainError("angular index out of range");
  }
  const std::size_t total = x_grid.size();
  std::vector<cplx> G(total);
  for (const auto& term : b.terms()) {
    const double yv = term.y(y);
    parallel_for(total, quad.workers, [&](std::size_t lb, std::size_t le) {
      std::vector<std::pair<int, double>> cs;
      for (std::size_t idx = lb; idx < le; ++idx) {
        const auto ix = x_grid.index(idx);
        Point xi{};
        for (int d = 0; d < n; ++d) xi[d] = lattice_frequency(ix[d], x_grid);
        const double r = norm(xi, n);
        cplx g{};
        if (r > win.lo && r < win.hi && r >= b.low_cutoff()) {
          double c = win(r) * yv;
          if (angular && c != 0.0) {
            frame.cutoffs(xi, cs);
            double chi = 0.0;
            for (const auto& [nu, v] : cs)
              if (nu == variant.nu) chi = v;
            c *= chi;
          }
          if (c != 0.0) c *= term.xi(xi);
          if (c != 0.0) g = c * std::polar(1.0, -phi.eval(y, xi));
        }
        G[idx] = g;
      }
    });
    detail::lattice_synthesis(G, x_grid);
    for (std::size_t i = 0; i < total; ++i) out.values[i] += term.x(x_grid.point(i)) * G[i];
  }
  return out;
}

double max_abs_coordinate(const Grid& g) {
  double s = 0.0;
  for (int d = 0; d < g.n; ++d) {
    const double a = std::max(std::abs(g.center[d] - g.extent),
                              std::abs(g.center[d] + g.extent - g.spacing()));
    s += a * a;
  }
  return std::sqrt(s);
}

namespace {

struct Support {
  std::vector<std::size_t> idx;
  std::vector<Point> pts;
  std::vector<std::array<int, 3>> ix;
  std::vector<cplx> val;
  double max_norm = 0.0;
};

Support support_of(const Field& u) {
  Support s;
  const Grid& g = u.grid;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (u.values[i] == cplx{}) continue;
    s.idx.push_back(i);
    s.pts.push_back(g.point(i));
    s.ix.push_back(g.index(i));
    s.val.push_back(u.values[i]);
    s.max_norm = std::max(s.max_norm, norm(s.pts.back(), g.n));
  }
  return s;
}

struct NodeSet {
  std::vector<Point> xi;
  std::vector<double> w;  // quadrature weight times radial window
};

NodeSet gather_nodes(const PolarRule& rule, const RadialWindow& win) {
  NodeSet ns;
  std::vector<Point> xs;
  std::vector<double> ws;
  for (int r = 0; r < rule.radial_count; ++r) {
    const double rho = rule.rho_lo + r * rule.d_rho;
    const double wr = win(rho);
    if (wr == 0.0) continue;
    ring_nodes(rule, r, xs, ws);
    for (std::size_t m = 0; m < xs.size(); ++m) {
      ns.xi.push_back(xs[m]);
      ns.w.push_back(ws[m] * wr);
    }
  }
  return ns;
}

// Z(x) = sum_m e^{i<x, xi_m>} c_m over the grid.
void accumulate_plane_waves(const Grid& g, const std::vector<Point>& xi,
                            const std::vector<cplx>& c, std::vector<cplx>& Z, int workers) {
  const int n = g.n;
  const int P = g.points_per_axis;
  const std::size_t block = 512;
  std::vector<cplx> tab;
  for (std::size_t b0 = 0; b0 < xi.size(); b0 += block) {
    const std::size_t b1 = std::min(xi.size(), b0 + block);
    const std::size_t nb = b1 - b0;
    tab.assign(nb * n * P, cplx{});
    parallel_for(nb, workers, [&](std::size_t mb, std::size_t me) {
      for (std::size_t m = mb; m < me; ++m)
        for (int d = 0; d < n; ++d)
          for (int i = 0; i < P; ++i)
            tab[(m * n + d) * P + i] = std::polar(1.0, g.coord(d, i) * xi[b0 + m][d]);
    });
    const std::size_t rows = static_cast<std::size_t>(P);
    const std::size_t stride = g.size() / rows;
    parallel_for(rows, workers, [&](std::size_t rb, std::size_t re) {
      for (std::size_t i0 = rb; i0 < re; ++i0) {
        cplx* z = Z.data() + i0 * stride;
        for (std::size_t m = 0; m < nb; ++m) {
          const cplx a = c[b0 + m] * tab[(m * n + 0) * P + i0];
          if (n == 1) {
            z[0] += a;
          } else if (n == 2) {
            const cplx* t1 = &tab[(m * n + 1) * P];
            for (int i1 = 0; i1 < P; ++i1) z[i1] += a * t1[i1];
          } else {
            const cplx* t1 = &tab[(m * n + 1) * P];
            const cplx* t2 = &tab[(m * n + 2) * P];
            for (int i1 = 0; i1 < P; ++i1) {
              const cplx a1 = a * t1[i1];
              cplx* zz = z + static_cast<std::size_t>(i1) * P;
              for (int i2 = 0; i2 < P; ++i2) zz[i2] += a1 * t2[i2];
            }
          }
        }
      }
    });
  }
}

// sum over the support of g_s e^{-i <y_s, xi>}
cplx plane_wave_sum(const Grid& g, const Support& s, const std::vector<cplx>& gv,
                    const Point& xi, std::vector<cplx>& tab) {
  const int n = g.n;
  const int P = g.points_per_axis;
  tab.resize(static_cast<std::size_t>(n) * P);
  for (int d = 0; d < n; ++d)
    for (int i = 0; i < P; ++i) tab[d * P + i] = std::polar(1.0, -g.coord(d, i) * xi[d]);
  cplx acc{};
  for (std::size_t k = 0; k < s.idx.size(); ++k) {
    cplx e = tab[s.ix[k][0]];
    for (int d = 1; d < n; ++d) e *= tab[d * P + s.ix[k][d]];
    acc += gv[k] * e;
  }
  return acc;
}

constexpr double kDirectBudget = 4e9;

Field apply_T_polar(const Amplitude& b, const PhaseFunction& phi, const Field& u,
                    const QuadratureSpec& quad) {
  const int n = phi.dim();
  const Grid& g = u.grid;
  Field out(g);
  const RadialWindow win = window_for(b, quad, KernelVariant::full());
  const Support s = support_of(u);
  double sup_reach = 0.0;
  if (phi.translation_form())
    sup_reach = s.max_norm + phase_reach(phi, Point{});
  else
    for (const auto& p : s.pts) sup_reach = std::max(sup_reach, phase_reach(phi, p));
  const double reach = max_abs_coordinate(g) + sup_reach;
  const PolarRule rule = make_polar_rule(n, win.lo, win.hi, reach, quad);
  if (s.idx.empty() || b.is_zero() || rule.radial_count == 0) return out;
  const NodeSet ns = gather_nodes(rule, win);
  const double hv = g.cell_volume();
  const std::size_t M = ns.xi.size();

  if (b.separable()) {
    for (const auto& term : b.terms()) {
      std::vector<cplx> gv(s.idx.size());
      for (std::size_t k = 0; k < s.idx.size(); ++k) gv[k] = s.val[k] * term.y(s.pts[k]) * hv;
      std::vector<cplx> c(M);
      if (!phi.translation_form() &&
          static_cast<double>(M) * static_cast<double>(s.idx.size()) > kDirectBudget)
        throw DomainError("direct quadrature exceeds the evaluation budget");
      parallel_for(M, quad.workers, [&](std::size_t mb, std::size_t me) {
        std::vector<cplx> tab;
        for (std::size_t m = mb; m < me; ++m) {
          const Point& xi = ns.xi[m];
          const double bx = term.xi(xi);
          if (bx == 0.0 || norm(xi, n) < b.low_cutoff()) {
            c[m] = cplx{};
            continue;
          }
          cplx v;
          if (phi.translation_form()) {
            v = plane_wave_sum(g, s, gv, xi, tab) * std::polar(1.0, -phi.offset(xi));
          } else {
            v = cplx{};
            for (std::size_t k = 0; k < s.idx.size(); ++k)
              v += gv[k] * std::polar(1.0, -phi.eval(s.pts[k], xi));
          }
          c[m] = ns.w[m] * bx * v;
        }
      });
      std::vector<cplx> Z(g.size());
      accumulate_plane_waves(g, ns.xi, c, Z, quad.workers);
      const double nc = std::pow(2.0 * kPi, -n);
      for (std::size_t i = 0; i < g.size(); ++i)
        out.values[i] += nc * term.x(g.point(i)) * Z[i];
    }
    return out;
  }
  if (static_cast<double>(M) * s.idx.size() * g.size() > kDirectBudget)
    throw DomainError("direct quadrature of a non-separable amplitude exceeds the budget");
  const double nc = std::pow(2.0 * kPi, -n);
  parallel_for(g.size(), quad.workers, [&](std::size_t xb, std::size_t xe) {
    for (std::size_t i = xb; i < xe; ++i) {
      const Point x = g.point(i);
      cplx acc{};
      for (std::size_t m = 0; m < M; ++m) {
        const Point& xi = ns.xi[m];
        cplx v{};
        for (std::size_t k = 0; k < s.idx.size(); ++k)
          v += s.val[k] * b(x, s.pts[k], xi) *
               std::polar(1.0, dot(x, xi, n) - phi.eval(s.pts[k], xi));
        acc += ns.w[m] * v;
      }
      out.values[i] = nc * hv * acc;
    }
  });
  return out;
}

Field apply_lattice(const Amplitude& b, const PhaseFunction& phi, const Field& u,
                    const QuadratureSpec& quad, bool is_T) {
  const int n = phi.dim();
  const Grid& g = u.grid;
  const RadialWindow win = window_for(b, quad, KernelVariant::full());
  check_lattice(g, win.hi, quad.oversample);
  Field out(g);
  if (b.is_zero()) return out;
  const std::size_t total = g.size();
  std::vector<cplx> F;
  if (!is_T) {
    F = u.values;
    detail::lattice_analysis(F, g);
  }
  for (const auto& term : b.terms()) {
    std::vector<cplx> G;
    if (is_T) {
      G.resize(total);
      for (std::size_t i = 0; i < total; ++i) G[i] = u.values[i] * term.y(g.point(i));
      detail::lattice_analysis(G, g);
    } else {
      G = F;
    }
    const double sign = is_T ? -1.0 : 1.0;
    parallel_for(total, quad.workers, [&](std::size_t lb, std::size_t le) {
      for (std::size_t idx = lb; idx < le; ++idx) {
        const auto ix = g.index(idx);
        Point xi{};
        for (int d = 0; d < n; ++d) xi[d] = lattice_frequency(ix[d], g);
        const double r = norm(xi, n);
        double c = 0.0;
        if (r > win.lo && r < win.hi && r >= b.low_cutoff()) c = win(r);
        if (c != 0.0) c *= term.xi(xi);
        G[idx] = c == 0.0 ? cplx{} : G[idx] * c * std::polar(1.0, sign * phi.offset(xi));
      }
    });
    detail::lattice_synthesis(G, g);
    for (std::size_t i = 0; i < total; ++i) out.values[i] += term.x(g.point(i)) * G[i];
  }
  return out;
}

Field apply_A_polar(const Amplitude& a, const PhaseFunction& phi, const Field& f,
                    const QuadratureSpec& quad) {
  const int n = phi.dim();
  const Grid& g = f.grid;
  Field out(g);
  const RadialWindow win = window_for(a, quad, KernelVariant::full());
  const Support s = support_of(f);
  double xr = 0.0;
  if (phi.translation_form()) {
    xr = max_abs_coordinate(g) + phase_reach(phi, Point{});
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) xr = std::max(xr, phase_reach(phi, g.point(i)));
  }
  const double reach = xr + s.max_norm;
  const PolarRule rule = make_polar_rule(n, win.lo, win.hi, reach, quad);
  if (s.idx.empty() || a.is_zero() || rule.radial_count == 0) return out;
  const NodeSet ns = gather_nodes(rule, win);
  const std::size_t M = ns.xi.size();
  const double hv = g.cell_volume();
  std::vector<cplx> gv(s.idx.size());
  for (std::size_t k = 0; k < s.idx.size(); ++k) gv[k] = s.val[k] * hv;
  std::vector<cplx> fhat(M);
  parallel_for(M, quad.workers, [&](std::size_t mb, std::size_t me) {
    std::vector<cplx> tab;
    for (std::size_t m = mb; m < me; ++m) fhat[m] = plane_wave_sum(g, s, gv, ns.xi[m], tab);
  });
  const double nc = std::pow(2.0 * kPi, -n);
  if (a.separable() && phi.translation_form()) {
    for (const auto& term : a.terms()) {
      std::vector<cplx> c(M);
      for (std::size_t m = 0; m < M; ++m) {
        const Point& xi = ns.xi[m];
        const double ax = norm(xi, n) < a.low_cutoff() ? 0.0 : term.xi(xi);
        c[m] = ax == 0.0 ? cplx{}
                         : ns.w[m] * ax * fhat[m] * std::polar(1.0, phi.offset(xi));
      }
      std::vector<cplx> Z(g.size());
      accumulate_plane_waves(g, ns.xi, c, Z, quad.workers);
      for (std::size_t i = 0; i < g.size(); ++i)
        out.values[i] += nc * term.x(g.point(i)) * term.y(Point{}) * Z[i];
    }
    return out;
  }
  if (static_cast<double>(M) * g.size() > kDirectBudget)
    throw DomainError("direct quadrature exceeds the evaluation budget");
  parallel_for(g.size(), quad.workers, [&](std::size_t xb, std::size_t xe) {
    for (std::size_t i = xb; i < xe; ++i) {
      const Point x = g.point(i);
      cplx acc{};
      for (std::size_t m = 0; m < M; ++m) {
        const Point& xi = ns.xi[m];
        const cplx av = a(x, xi);
        if (av == cplx{}) continue;
        acc += ns.w[m] * av * fhat[m] * std::polar(1.0, phi.eval(x, xi));
      }
      out.values[i] = nc * acc;
    }
  });
  return out;
}

}  // namespace

Field apply_T(const Amplitude& b, const PhaseFunction& phi, const Field& u,
              const QuadratureSpec& quad, Method method) {
  if (u.grid.n != phi.dim() || b.dim() != phi.dim())
    throw DomainError("dimension mismatch between field, phase and amplitude");
  const bool fast_ok = phi.translation_form() && b.separable();
  if (method == Method::Lattice && !fast_ok)
    throw DomainError("lattice path requires a translation-type phase and separable amplitude");
  if (method == Method::Lattice || (method == Method::Auto && fast_ok))
    return apply_lattice(b, phi, u, quad, true);
  return apply_T_polar(b, phi, u, quad);
}

Field apply_A(const Amplitude& a, const PhaseFunction& phi, const Field& f,
              const QuadratureSpec& quad, Method method) {
  if (f.grid.n != phi.dim() || a.dim() != phi.dim())
    throw DomainError("dimension mismatch between field, phase and amplitude");
  const bool fast_ok = phi.translation_form() && a.separable();
  if (method == Method::Lattice && !fast_ok)
    throw DomainError("lattice path requires a translation-type phase and separable amplitude");
  if (method == Method::Lattice || (method == Method::Auto && fast_ok))
    return apply_lattice(a, phi, f, quad, false);
  return apply_A_polar(a, phi, f, quad);
}

namespace {

double keys_cubic(double s) {
  const double a = -0.5;
  s = std::abs(s);
  if (s <= 1.0) return ((a + 2.0) * s - (a + 3.0)) * s * s + 1.0;
  if (s < 2.0) return ((a * s - 5.0 * a) * s + 8.0 * a) * s - 4.0 * a;
  return 0.0;
}

// cubic convolution interpolant of f at x; zero outside the source grid
cplx interpolate_cubic(const Field& f, const Point& x) {
  const Grid& g = f.grid;
  const int n = g.n;
  const int P = g.points_per_axis;
  const double h = g.spacing();
  std::array<int, 3> base{};
  std::array<std::array<double, 4>, 3> w{};
  for (int d = 0; d < n; ++d) {
    const double u = (x[d] - (g.center[d] - g.extent)) / h;
    const double fl = std::floor(u);
    if (!(fl > -3.0 && fl < P + 2.0)) return cplx{};
    base[d] = static_cast<int>(fl) - 1;
    for (int t = 0; t < 4; ++t) w[d][t] = keys_cubic(u - (fl - 1 + t));
  }
  cplx acc{};
  const int taps = n == 1 ? 4 : (n == 2 ? 16 : 64);
  for (int t = 0; t < taps; ++t) {
    std::array<int, 3> ix{};
    double wt = 1.0;
    bool inside = true;
    int r = t;
    for (int d = n - 1; d >= 0; --d) {
      const int o = r % 4;
      r /= 4;
      ix[d] = base[d] + o;
      wt *= w[d][o];
      if (ix[d] < 0 || ix[d] >= P) inside = false;
    }
    if (inside && wt != 0.0) acc += wt * f.values[g.flat(ix)];
  }
  return acc;
}

}  // namespace

Field resample_cubic(const Field& f, const Grid& target) {
  if (target.n != f.grid.n) throw DomainError("resample dimension mismatch");
  Field out(target);
  for (std::size_t i = 0; i < target.size(); ++i)
    out.values[i] = interpolate_cubic(f, target.point(i));
  return out;
}

Field dilate(const Field& f, double lambda, DilationMode mode) {
  if (lambda == 0.0 || !std::isfinite(lambda)) throw DomainError("dilation factor must be nonzero");
  const Grid& g = f.grid;
  if (mode == DilationMode::Cubic) {
    Field out(g);
    for (std::size_t i = 0; i < g.size(); ++i)
      out.values[i] = interpolate_cubic(f, scaled(g.point(i), lambda, g.n));
    return out;
  }
  Grid ng = g;
  ng.extent = g.extent / std::abs(lambda);
  for (int d = 0; d < g.n; ++d) ng.center[d] = g.center[d] / lambda;
  if (lambda > 0.0) return Field(ng, f.values);
  // reflection: new index i samples old index P - i; index 0 has no source sample
  Field out(ng);
  const int P = g.points_per_axis;
  for (std::size_t i = 0; i < ng.size(); ++i) {
    auto ix = ng.index(i);
    bool inside = true;
    for (int d = 0; d < g.n; ++d) {
      ix[d] = P - ix[d];
      if (ix[d] >= P) inside = false;
    }
    out.values[i] = inside ? f.values[g.flat(ix)] : cplx{};
  }
  return out;
}

RescaledOperator rescaled_operator_symbols(const Amplitude& a, const PhaseFunction& phi, int k) {
  if (k < 0) throw DomainError("rescaling index must be non-negative");
  const double s = std::ldexp(1.0, k);
  const int n = a.dim();
  RescaledOperator r;
  r.k = k;
  r.phase = phi.rescaled(s);
  std::vector<ProductTerm> terms;
  for (const auto& t : a.terms()) {
    auto tx = t.x;
    auto txi = t.xi;
    auto ty = t.y;
    terms.push_back(ProductTerm{
        [tx, s, n](const Point& x) { return lp_psi_tilde(norm(x, n)) * tx(scaled(x, s, n)); },
        [ty](const Point&) { return ty(Point{}); },
        [txi, s, n](const Point& xi) { return txi(scaled(xi, 1.0 / s, n)); }});
  }
  auto ev = [a, s, n](const Point& x, const Point& y, const Point& xi) {
    (void)y;
    const double pt = lp_psi_tilde(norm(x, n));
    if (pt == 0.0) return cplx{};
    return pt * a(scaled(x, s, n), Point{}, scaled(xi, 1.0 / s, n));
  };
  std::ostringstream id;
  id << a.id() << "_rescaled_k" << k;
  r.amplitude = Amplitude(n, id.str(), AmplitudeKind::TwoArg, a.orders(), a.flavor(),
                          a.low_cutoff() * s, ev, terms);
  if (a.is_zero()) r.amplitude.mark_zero();
  return r;
}

std::map<std::string, double> rescaled_symbol_constants(const Amplitude& a, int k, double m_p,
                                                        int max_order) {
  const int n = a.dim();
  const double s = std::ldexp(1.0, k);
  auto g = [&](const Point& x, const Point& xi) {
    return a(scaled(x, s, n), Point{}, scaled(xi, 1.0 / s, n));
  };
  std::map<std::string, double> out;
  const auto dirs = sample_directions(n, 8);
  const std::vector<double> xr = {0.25, 0.375, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0};
  std::vector<double> xir;
  for (int i = 0; i <= 24; ++i) xir.push_back(8.0 * s * std::ldexp(1.0, i));
  for (int oa = 0; oa <= max_order; ++oa)
    for (int ob = 0; oa + ob <= max_order; ++ob)
      for (const auto& al : multi_indices(n, oa))
        for (const auto& be : multi_indices(n, ob)) {
          const std::string key = index_key({al, be}, n);
          double sup = 0.0;
          for (double rx : xr)
            for (const auto& wx : dirs)
              for (double rxi : xir)
                for (const auto& wxi : dirs) {
                  const Point x = scaled(wx, rx, n);
                  const Point xi = scaled(wxi, rxi, n);
                  const int tot = oa + ob;
                  const double c = tot <= 1 ? 1e-4 : 1e-3;
                  const double hx = c * std::max(1.0, rx);
                  const double hxi = c * rxi;
                  // tensor central differences over the 2n coordinates
                  std::array<int, 6> d{};
                  for (int i = 0; i < n; ++i) {
                    d[i] = al[i];
                    d[n + i] = be[i];
                  }
                  std::function<cplx(Point, Point, int)> rec = [&](Point px, Point pxi,
                                                                   int var) -> cplx {
                    while (var < 2 * n && d[var] == 0) ++var;
                    if (var == 2 * n) return g(px, pxi);
                    const bool isx = var < n;
                    const int comp = isx ? var : var - n;
                    const double h = isx ? hx : hxi;
                    static const std::vector<std::pair<int, double>> st[3] = {
                        {{0, 1.0}}, {{-1, -0.5}, {1, 0.5}}, {{-1, 1.0}, {0, -2.0}, {1, 1.0}}};
                    cplx acc{};
                    for (const auto& [off, w] : st[d[var]]) {
                      Point qx = px, qxi = pxi;
                      if (isx)
                        qx[comp] += off * h;
                      else
                        qxi[comp] += off * h;
                      acc += w * rec(qx, qxi, var + 1);
                    }
                    return acc / std::pow(h, d[var]);
                  };
                  const double v = std::abs(rec(x, xi, 0));
                  sup = std::max(sup, v / std::pow(bracket(xi, n), m_p - ob));
                }
          out[key] = sup;
        }
  return out;
}

Field weight_multiply(const Field& f, double s) {
  Field out = f;
  if (s == 0.0) return out;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    out.values[i] *= std::pow(bracket(f.grid.point(i), f.grid.n), s);
  return out;
}

Field bessel_multiply(const Field& f, double sigma) {
  Field out = f;
  if (sigma == 0.0) return out;
  const Grid& g = f.grid;
  detail::fft_inplace(out.values, g.n, g.points_per_axis, -1);
  const double inv = 1.0 / static_cast<double>(g.size());
  detail::for_lattice(g, [&](const Point& xi, std::size_t idx) {
    out.values[idx] *= std::pow(bracket(xi, g.n), sigma) * inv;
  });
  detail::fft_inplace(out.values, g.n, g.points_per_axis, 1);
  return out;
}

double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("lp_norm requires 1 <= p < infinity");
  std::vector<double> v(f.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(f.values[i]);
    v[i] = p == 1.0 ? a : (p == 2.0 ? a * a : std::pow(a, p));
  }
  const double s = pairwise_sum(std::span<const double>(v)) * f.grid.cell_volume();
  return p == 1.0 ? s : std::pow(s, 1.0 / p);
}

double sobolev_norm(const Field& f, double sigma, double s, double p) {
  return lp_norm(weight_multiply(bessel_multiply(f, sigma), s), p);
}

double tail_mass(const Field& f, double frac) {
  const Grid& g = f.grid;
  std::vector<double> all(f.values.size()), out(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const Point x = g.point(i);
    double m = 0.0;
    for (int d = 0; d < g.n; ++d) m = std::max(m, std::abs(x[d] - g.center[d]));
    all[i] = std::abs(f.values[i]);
    out[i] = m > frac * g.extent ? all[i] : 0.0;
  }
  const double t = pairwise_sum(std::span<const double>(all));
  if (t == 0.0) return 0.0;
  return pairwise_sum(std::span<const double>(out)) / t;
}

}  // namespace fiolab
