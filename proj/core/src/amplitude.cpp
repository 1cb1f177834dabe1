#include "fiolab/amplitude.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace fiolab {

Amplitude::Amplitude(int n, std::string id, AmplitudeKind kind, Orders orders, Flavor flavor,
                     double low_cutoff, Evaluator eval, std::vector<ProductTerm> terms)
    : n_(n),
      id_(std::move(id)),
      kind_(kind),
      orders_(orders),
      flavor_(flavor),
      low_cutoff_(low_cutoff),
      eval_(std::move(eval)),
      terms_(std::move(terms)) {}

cplx Amplitude::operator()(const Point& x, const Point& y, const Point& xi) const {
  if (zero_ || norm(xi, n_) < low_cutoff_) return {0.0, 0.0};
  return eval_(x, y, xi);
}

double eta(double r, double low) { return smooth_step((r - low) / low); }

Amplitude make_builtin_amplitude(const std::string& id, int n, const Orders& orders,
                                 Flavor flavor) {
  if (n < 1 || n > kMaxDim) throw ConfigError("dimension must be 1, 2 or 3");
  const double m1 = orders.m1, m2 = orders.m2, mu = orders.mu;
  auto fx = [n, m1](const Point& x) { return std::pow(bracket(x, n), m1); };
  auto fy = [n, m2](const Point& y) { return std::pow(bracket(y, n), m2); };
  auto fxi = [n, mu](const Point& xi) {
    const double r = norm(xi, n);
    return eta(r) * std::pow(bracket(r), mu);
  };
  auto osc_xi = [n, mu](const Point& xi) {
    const double r = norm(xi, n);
    const double b = bracket(r);
    return eta(r) * std::pow(b, mu) * std::cos(std::log(b));
  };
  auto one = [](const Point&) { return 1.0; };

  if (id == "sg_power" || id == "sg_power_xi") {
    const bool two = id == "sg_power_xi";
    Orders o = orders;
    if (two) o = Orders{orders.m(), 0.0, mu};
    auto gx = two ? std::function<double(const Point&)>(
                        [n, m = o.m1](const Point& x) { return std::pow(bracket(x, n), m); })
                  : std::function<double(const Point&)>(fx);
    auto gy = two ? std::function<double(const Point&)>(one)
                  : std::function<double(const Point&)>(fy);
    auto ev = [gx, gy, fxi](const Point& x, const Point& y, const Point& xi) {
      return cplx(gx(x) * gy(y) * fxi(xi), 0.0);
    };
    return Amplitude(n, id, two ? AmplitudeKind::TwoArg : AmplitudeKind::ThreeArg, o, flavor,
                     8.0, ev, {ProductTerm{gx, gy, fxi}});
  }
  if (id == "sg_power_osc" || id == "sg_power_xi_osc") {
    const bool two = id == "sg_power_xi_osc";
    Orders o = orders;
    if (two) o = Orders{orders.m(), 0.0, mu};
    const double mx = o.m1;
    auto gx = [n, mx](const Point& x) { return std::pow(bracket(x, n), mx); };
    auto hx = [n, mx](const Point& x) {
      const double bx = bracket(x, n);
      return 0.5 * std::pow(bx, mx) * std::sin(bx);
    };
    auto gy = two ? std::function<double(const Point&)>(one)
                  : std::function<double(const Point&)>(fy);
    auto ev = [gx, hx, gy, fxi, osc_xi](const Point& x, const Point& y, const Point& xi) {
      const double yv = gy(y);
      return cplx(gx(x) * yv * fxi(xi) + hx(x) * yv * osc_xi(xi), 0.0);
    };
    return Amplitude(n, id, two ? AmplitudeKind::TwoArg : AmplitudeKind::ThreeArg, o, flavor,
                     8.0, ev, {ProductTerm{gx, gy, fxi}, ProductTerm{hx, gy, osc_xi}});
  }
  if (id == "zero") {
    auto zero = [](const Point&) { return 0.0; };
    Amplitude a(n, id, AmplitudeKind::ThreeArg, orders, flavor, 8.0,
                [](const Point&, const Point&, const Point&) { return cplx{}; },
                {ProductTerm{zero, one, zero}});
    a.mark_zero();
    return a;
  }
  throw ConfigError("unknown amplitude id '" + id + "'");
}

std::vector<std::string> builtin_amplitude_ids() {
  return {"sg_power", "sg_power_osc", "sg_power_xi", "sg_power_xi_osc", "zero"};
}

std::string SymbolSampleSpec::describe() const {
  std::ostringstream os;
  os << "x in [-" << x_max << "," << x_max << "]^n (" << x_per_axis << "/axis), y in [-"
     << y_max << "," << y_max << "]^n (" << y_per_axis << "/axis), |xi| dyadic " << xi_min
     << ".." << xi_max << " x " << directions << " directions";
  return os.str();
}

namespace {

std::vector<double> box_axis(double half, int count) {
  std::vector<double> a;
  if (count <= 1) return {0.0};
  for (int i = 0; i < count; ++i) a.push_back(-half + 2.0 * half * i / (count - 1));
  return a;
}

std::vector<Point> box_points(int n, double half, int count) {
  const auto axis = box_axis(half, count);
  std::vector<Point> out;
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= axis.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point p{};
    std::size_t r = idx;
    for (int d = n - 1; d >= 0; --d) {
      p[d] = axis[r % axis.size()];
      r /= axis.size();
    }
    out.push_back(p);
  }
  return out;
}

// Central stencils (offset, weight) for derivative orders 0..3 at unit step.
const std::vector<std::pair<int, double>>& stencil(int d) {
  static const std::vector<std::pair<int, double>> s[4] = {
      {{0, 1.0}},
      {{-1, -0.5}, {1, 0.5}},
      {{-1, 1.0}, {0, -2.0}, {1, 1.0}},
      {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}}};
  return s[d];
}

struct VarLayout {
  int n;
  int groups;  // 2 for (x, xi), 3 for (x, y, xi)
};

cplx eval_vars(const Amplitude& b, const VarLayout& L, const std::array<double, 9>& z) {
  Point x{}, y{}, xi{};
  for (int i = 0; i < L.n; ++i) {
    x[i] = z[i];
    if (L.groups == 3) {
      y[i] = z[L.n + i];
      xi[i] = z[2 * L.n + i];
    } else {
      xi[i] = z[L.n + i];
    }
  }
  return b(x, y, xi);
}

cplx fd_derivative(const Amplitude& b, const VarLayout& L, std::array<double, 9> z,
                   const std::array<int, 9>& d, const std::array<double, 9>& h, int var) {
  const int nv = L.n * L.groups;
  while (var < nv && d[var] == 0) ++var;
  if (var == nv) return eval_vars(b, L, z);
  cplx acc{};
  const double z0 = z[var];
  for (const auto& [off, w] : stencil(d[var])) {
    z[var] = z0 + off * h[var];
    acc += w * fd_derivative(b, L, z, d, h, var + 1);
  }
  return acc / std::pow(h[var], d[var]);
}

}  // namespace

SymbolCertificate certify_symbol(const Amplitude& b, const SymbolSampleSpec& samples,
                                 int max_order, double ceiling) {
  if (max_order > 3 || max_order < 0)
    throw DomainError("symbol certification supports derivative orders 0..3");
  const int n = b.dim();
  const bool three = b.kind() == AmplitudeKind::ThreeArg;
  const VarLayout L{n, three ? 3 : 2};
  const int nv = L.n * L.groups;

  struct Entry {
    std::array<int, 9> d{};
    int oa = 0, ob = 0, og = 0;
    std::string key;
  };
  std::vector<Entry> entries;
  for (int tot = 0; tot <= max_order; ++tot) {
    // enumerate all distributions of `tot` over nv variables
    std::array<int, 9> d{};
    std::function<void(int, int)> rec = [&](int var, int left) {
      if (var == nv - 1) {
        d[var] = left;
        Entry e;
        e.d = d;
        std::vector<MultiIndex> parts(L.groups);
        for (int g = 0; g < L.groups; ++g)
          for (int i = 0; i < n; ++i) parts[g][i] = d[g * n + i];
        e.oa = order(parts[0], n);
        if (three) {
          e.ob = order(parts[1], n);
          e.og = order(parts[2], n);
        } else {
          e.og = order(parts[1], n);
        }
        e.key = index_key(parts, n);
        entries.push_back(e);
        return;
      }
      for (int v = left; v >= 0; --v) {
        d[var] = v;
        rec(var + 1, left - v);
      }
    };
    rec(0, tot);
  }

  SymbolCertificate cert;
  cert.max_order_tested = max_order;
  cert.ceiling = ceiling;
  for (const auto& e : entries) cert.constants[e.key] = 0.0;

  const auto xs = box_points(n, samples.x_max, samples.x_per_axis);
  const auto ys = three ? box_points(n, samples.y_max, samples.y_per_axis)
                        : std::vector<Point>{Point{}};
  const auto dirs = sample_directions(n, samples.directions);
  std::vector<double> radii;
  for (double r = samples.xi_min; r <= samples.xi_max * (1 + 1e-12); r *= 2.0)
    radii.push_back(r);

  const Orders& o = b.orders();
  for (const auto& x : xs)
    for (const auto& y : ys)
      for (double r : radii)
        for (const auto& w : dirs) {
          const Point xi = scaled(w, r, n);
          std::array<double, 9> z{};
          for (int i = 0; i < n; ++i) {
            z[i] = x[i];
            if (three) {
              z[n + i] = y[i];
              z[2 * n + i] = xi[i];
            } else {
              z[n + i] = xi[i];
            }
          }
          const double bx = bracket(x, n), by = bracket(y, n), bxi = bracket(xi, n);
          const double sx = std::max(1.0, norm(x, n));
          const double sy = std::max(1.0, norm(y, n));
          const double sxi = std::max(1.0, norm(xi, n));
          for (const auto& e : entries) {
            const int tot = e.oa + e.ob + e.og;
            const double c = tot <= 1 ? 1e-4 : 1e-3;
            std::array<double, 9> h{};
            for (int i = 0; i < n; ++i) {
              h[i] = c * sx;
              if (three) {
                h[n + i] = c * sy;
                h[2 * n + i] = c * sxi;
              } else {
                h[n + i] = c * sxi;
              }
            }
            const double v = std::abs(fd_derivative(b, L, z, e.d, h, 0));
            double g;
            if (three) {
              g = std::pow(bx, o.m1) * std::pow(by, o.m2) * std::pow(bxi, o.mu - e.og);
              if (b.flavor() == Flavor::II) g *= std::pow(bx, -e.oa);
              if (b.flavor() == Flavor::III) g *= std::pow(by, -e.ob);
            } else {
              g = std::pow(bx, o.m() - e.oa) * std::pow(bxi, o.mu - e.og);
            }
            double& slot = cert.constants[e.key];
            slot = std::max(slot, v / g);
          }
        }

  bool ok = true;
  for (const auto& [k, v] : cert.constants) ok = ok && std::isfinite(v) && v <= ceiling;
  cert.pass = ok;
  return cert;
}

double wavefront_profile(double t) { return 1.0 - quintic_step((t - 0.5) / 0.5); }

double wavefront_cutoff(const PhaseFunction& phi, double k, const Point& x, const Point& y,
                        const Point& xi) {
  const int n = phi.dim();
  const double d = norm(sub(x, phi.grad_xi(y, xi), n), n);
  return wavefront_profile(d / (k * bracket(x, n)));
}

std::pair<Amplitude, Amplitude> wavefront_split(const Amplitude& b, const PhaseFunction& phi,
                                                double k) {
  if (!(k > 0.0 && k < 1.0)) throw DomainError("wave-front parameter k must lie in (0, 1)");
  // the larger piece is formed by subtraction (exact by Sterbenz)
  auto near = [b, phi, k](const Point& x, const Point& y, const Point& xi) {
    const double c = wavefront_cutoff(phi, k, x, y, xi);
    const cplx v = b(x, y, xi);
    if (c >= 0.5) return c * v;
    return v - (1.0 - c) * v;
  };
  auto far = [b, phi, k](const Point& x, const Point& y, const Point& xi) {
    const double c = wavefront_cutoff(phi, k, x, y, xi);
    const cplx v = b(x, y, xi);
    if (c >= 0.5) return v - c * v;
    return (1.0 - c) * v;
  };
  Amplitude bn(b.dim(), b.id() + "_near", b.kind(), b.orders(), b.flavor(), b.low_cutoff(), near);
  Amplitude bf(b.dim(), b.id() + "_far", b.kind(), b.orders(), b.flavor(), b.low_cutoff(), far);
  if (b.is_zero()) {
    bn.mark_zero();
    bf.mark_zero();
  }
  return {bn, bf};
}

SupportEquivalence support_equivalence(const PhaseFunction& phi, double k,
                                       const PhaseSampleSpec& samples) {
  const int n = phi.dim();
  SupportEquivalence s;
  s.k = k;
  s.ratio_min = std::numeric_limits<double>::infinity();
  const auto dirs = sample_directions(n, samples.directions);
  for (const auto& y : samples.y_points(n))
    for (double r : samples.radii())
      for (const auto& w : dirs) {
        const double v = bracket(phi.grad_xi(y, scaled(w, r, n)), n) / bracket(y, n);
        s.ratio_min = std::min(s.ratio_min, v);
        s.ratio_max = std::max(s.ratio_max, v);
      }
  s.c1 = s.ratio_min / (1.0 + k);
  s.c2 = s.ratio_max / (1.0 - k);
  return s;
}

}  // namespace fiolab
