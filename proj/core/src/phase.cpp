#include "fiolab/phase.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace fiolab {

Flavor parse_flavor(const std::string& s) {
  if (s == "I") return Flavor::I;
  if (s == "II") return Flavor::II;
  if (s == "III") return Flavor::III;
  throw ConfigError("unknown flavor '" + s + "' (expected I, II or III)");
}

std::string to_string(Flavor f) {
  switch (f) {
    case Flavor::I:
      return "I";
    case Flavor::II:
      return "II";
    default:
      return "III";
  }
}

int order(const MultiIndex& a, int n) {
  int s = 0;
  for (int i = 0; i < n; ++i) s += a[i];
  return s;
}

std::string index_key(const std::vector<MultiIndex>& parts, int n) {
  std::ostringstream os;
  os << '(';
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (p) os << ';';
    for (int i = 0; i < n; ++i) {
      if (i) os << ',';
      os << parts[p][i];
    }
  }
  os << ')';
  return os.str();
}

std::vector<MultiIndex> multi_indices(int n, int total) {
  std::vector<MultiIndex> out;
  for (int a = 0; a <= total; ++a)
    for (int b = 0; b <= (n > 1 ? total - a : 0); ++b) {
      const int c = total - a - b;
      if (n == 1 && (b || c)) continue;
      if (n == 2 && c) continue;
      if (c < 0) continue;
      out.push_back({a, b, c});
    }
  return out;
}

PhaseFunction::PhaseFunction(int n, std::string id, std::shared_ptr<const PhaseModel> model)
    : n_(n), id_(std::move(id)), m_(std::move(model)) {}

namespace {

class LinearPhase : public PhaseModel {
 public:
  explicit LinearPhase(int n) : n_(n) {}
  double eval(const Point& y, const Point& xi) const override { return dot(y, xi, n_); }
  Point grad_xi(const Point& y, const Point&) const override { return y; }
  Point grad_y(const Point&, const Point& xi) const override { return xi; }
  Mat mixed_hessian(const Point&, const Point&) const override {
    Mat m{};
    for (int i = 0; i < n_; ++i) m[i][i] = 1.0;
    return m;
  }
  Mat hessian_xi(const Point&, const Point&) const override { return Mat{}; }
  Mat hessian_y(const Point&, const Point&) const override { return Mat{}; }
  bool translation_form() const override { return true; }
  double offset(const Point&) const override { return 0.0; }

 private:
  int n_;
};

class ShiftedWavePhase : public PhaseModel {
 public:
  explicit ShiftedWavePhase(int n) : n_(n) {}
  double eval(const Point& y, const Point& xi) const override {
    return dot(y, xi, n_) + norm(xi, n_);
  }
  Point grad_xi(const Point& y, const Point& xi) const override {
    const double r = norm(xi, n_);
    return axpy(1.0 / r, xi, y, n_);
  }
  Point grad_y(const Point&, const Point& xi) const override { return xi; }
  Mat mixed_hessian(const Point&, const Point&) const override {
    Mat m{};
    for (int i = 0; i < n_; ++i) m[i][i] = 1.0;
    return m;
  }
  Mat hessian_xi(const Point&, const Point& xi) const override {
    const double r = norm(xi, n_);
    Mat m{};
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        m[i][j] = ((i == j ? 1.0 : 0.0) - xi[i] * xi[j] / (r * r)) / r;
    return m;
  }
  Mat hessian_y(const Point&, const Point&) const override { return Mat{}; }
  bool translation_form() const override { return true; }
  double offset(const Point& xi) const override { return norm(xi, n_); }

 private:
  int n_;
};

// psi_i(y) = y_i + tanh(y_{i+1 mod n}) / 2, and psi(y) = y + tanh(y) / 2 for n = 1.
class DiffeoPhase : public PhaseModel {
 public:
  explicit DiffeoPhase(int n) : n_(n) {}

  int partner(int i) const { return n_ == 1 ? 0 : (i + 1) % n_; }

  Point psi(const Point& y) const {
    Point p{};
    for (int i = 0; i < n_; ++i) p[i] = y[i] + 0.5 * std::tanh(y[partner(i)]);
    return p;
  }
  // J[i][l] = d psi_i / d y_l
  Mat jacobian(const Point& y) const {
    Mat j{};
    for (int i = 0; i < n_; ++i) {
      j[i][i] += 1.0;
      const double c = std::cosh(y[partner(i)]);
      j[i][partner(i)] += 0.5 / (c * c);
    }
    return j;
  }

  double eval(const Point& y, const Point& xi) const override {
    return dot(psi(y), xi, n_);
  }
  Point grad_xi(const Point& y, const Point&) const override { return psi(y); }
  Point grad_y(const Point& y, const Point& xi) const override {
    const Mat j = jacobian(y);
    Point g{};
    for (int l = 0; l < n_; ++l)
      for (int i = 0; i < n_; ++i) g[l] += xi[i] * j[i][l];
    return g;
  }
  Mat mixed_hessian(const Point& y, const Point&) const override {
    const Mat j = jacobian(y);
    Mat m{};
    for (int l = 0; l < n_; ++l)
      for (int i = 0; i < n_; ++i) m[l][i] = j[i][l];
    return m;
  }
  Mat hessian_xi(const Point&, const Point&) const override { return Mat{}; }
  Mat hessian_y(const Point& y, const Point& xi) const override {
    Mat m{};
    for (int i = 0; i < n_; ++i) {
      const int l = partner(i);
      const double t = std::tanh(y[l]);
      const double c = std::cosh(y[l]);
      m[l][l] += xi[i] * 0.5 * (-2.0 * t / (c * c));
    }
    return m;
  }

 private:
  int n_;
};

class RescaledPhase : public PhaseModel {
 public:
  RescaledPhase(std::shared_ptr<const PhaseModel> base, int n, double lambda)
      : base_(std::move(base)), n_(n), l_(lambda) {}

  Point y_of(const Point& y) const { return scaled(y, l_, n_); }
  Point xi_of(const Point& xi) const { return scaled(xi, 1.0 / l_, n_); }

  double eval(const Point& y, const Point& xi) const override {
    return base_->eval(y_of(y), xi_of(xi));
  }
  Point grad_xi(const Point& y, const Point& xi) const override {
    return scaled(base_->grad_xi(y_of(y), xi_of(xi)), 1.0 / l_, n_);
  }
  Point grad_y(const Point& y, const Point& xi) const override {
    return scaled(base_->grad_y(y_of(y), xi_of(xi)), l_, n_);
  }
  Mat mixed_hessian(const Point& y, const Point& xi) const override {
    return base_->mixed_hessian(y_of(y), xi_of(xi));
  }
  Mat hessian_xi(const Point& y, const Point& xi) const override {
    Mat m = base_->hessian_xi(y_of(y), xi_of(xi));
    for (auto& row : m)
      for (auto& v : row) v /= l_ * l_;
    return m;
  }
  Mat hessian_y(const Point& y, const Point& xi) const override {
    Mat m = base_->hessian_y(y_of(y), xi_of(xi));
    for (auto& row : m)
      for (auto& v : row) v *= l_ * l_;
    return m;
  }
  bool translation_form() const override { return base_->translation_form(); }
  double offset(const Point& xi) const override { return base_->offset(xi_of(xi)); }

 private:
  std::shared_ptr<const PhaseModel> base_;
  int n_;
  double l_;
};

Point unit(int i) {
  Point e{};
  e[i] = 1.0;
  return e;
}

}  // namespace

double PhaseFunction::partial(const Point& y, const Point& xi, const MultiIndex& alpha,
                              const MultiIndex& beta) const {
  const int a = order(alpha, n_);
  const int b = order(beta, n_);
  const int tot = a + b;
  auto first = [&](const MultiIndex& m) {
    for (int i = 0; i < n_; ++i)
      if (m[i] > 0) return i;
    return -1;
  };
  if (tot == 0) return eval(y, xi);
  if (tot == 1) {
    if (a == 1) return grad_y(y, xi)[first(alpha)];
    return grad_xi(y, xi)[first(beta)];
  }
  if (tot == 2) {
    auto pair = [&](const MultiIndex& m) {
      const int i = first(m);
      MultiIndex r = m;
      --r[i];
      return std::pair<int, int>{i, first(r)};
    };
    if (a == 2) {
      const auto [i, j] = pair(alpha);
      return hessian_y(y, xi)[i][j];
    }
    if (b == 2) {
      const auto [i, j] = pair(beta);
      return hessian_xi(y, xi)[i][j];
    }
    return mixed_hessian(y, xi)[first(alpha)][first(beta)];
  }
  if (tot != 3) throw DomainError("phase derivatives are limited to total order 3");
  MultiIndex al = alpha;
  MultiIndex be = beta;
  if (a > 0) {
    const int l = first(alpha);
    --al[l];
    const double h = 1e-4 * std::max(1.0, norm(y, n_));
    Point yp = y, ym = y;
    yp[l] += h;
    ym[l] -= h;
    return (partial(yp, xi, al, be) - partial(ym, xi, al, be)) / (2.0 * h);
  }
  const int l = first(beta);
  --be[l];
  const double h = 1e-4 * std::max(1.0, norm(xi, n_));
  Point xp = xi, xm = xi;
  xp[l] += h;
  xm[l] -= h;
  return (partial(y, xp, al, be) - partial(y, xm, al, be)) / (2.0 * h);
}

PhaseFunction PhaseFunction::rescaled(double lambda) const {
  if (!(lambda > 0.0)) throw DomainError("rescaling factor must be positive");
  std::ostringstream os;
  os << id_ << "@" << lambda;
  return PhaseFunction(n_, os.str(), std::make_shared<RescaledPhase>(m_, n_, lambda));
}

double PhaseFunction::gradient_reach(const Point& y, const Point& c, int directions) const {
  double r = 0.0;
  for (const auto& w : sample_directions(n_, directions))
    r = std::max(r, norm(sub(grad_xi(y, w), c, n_), n_));
  return r;
}

PhaseFunction make_builtin_phase(const std::string& id, int n) {
  if (n < 1 || n > kMaxDim) throw ConfigError("dimension must be 1, 2 or 3");
  if (id == "linear") return PhaseFunction(n, id, std::make_shared<LinearPhase>(n));
  if (id == "shifted_wave") return PhaseFunction(n, id, std::make_shared<ShiftedWavePhase>(n));
  if (id == "diffeo") return PhaseFunction(n, id, std::make_shared<DiffeoPhase>(n));
  throw ConfigError("unknown phase id '" + id + "'");
}

std::vector<std::string> builtin_phase_ids() { return {"linear", "shifted_wave", "diffeo"}; }

std::vector<double> PhaseSampleSpec::radii() const {
  std::vector<double> r;
  for (double s = xi_min; s <= xi_max * (1.0 + 1e-12); s *= 2.0) r.push_back(s);
  return r;
}

std::vector<Point> PhaseSampleSpec::y_points(int n) const {
  std::vector<double> axis;
  if (y_per_axis <= 1) {
    axis.push_back(0.0);
  } else {
    for (int i = 0; i < y_per_axis; ++i)
      axis.push_back(-y_max + 2.0 * y_max * i / (y_per_axis - 1));
  }
  std::vector<Point> pts;
  const std::size_t m = axis.size();
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= m;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point p{};
    std::size_t r = idx;
    for (int d = n - 1; d >= 0; --d) {
      p[d] = axis[r % m];
      r /= m;
    }
    pts.push_back(p);
  }
  return pts;
}

std::string PhaseSampleSpec::describe() const {
  std::ostringstream os;
  os << "y in [-" << y_max << "," << y_max << "]^n with " << y_per_axis
     << " points per axis; |xi| dyadic shells " << xi_min << ".." << xi_max << " x "
     << directions << " directions";
  return os.str();
}

namespace {

template <class Fn>
void for_samples(const PhaseFunction& phi, const PhaseSampleSpec& s, Fn&& fn) {
  const int n = phi.dim();
  const auto ys = s.y_points(n);
  const auto dirs = sample_directions(n, s.directions);
  for (double r : s.radii()) {
    if (!(r > 0.0)) throw DomainError("phase sample set touches xi = 0");
    for (const auto& y : ys)
      for (const auto& w : dirs) fn(y, scaled(w, r, n));
  }
}

double flavor_growth(Flavor f, int a, int b, double by, double xi_abs, double bxi) {
  if (b == 0) return std::pow(by, 1.0 - a) * xi_abs;
  switch (f) {
    case Flavor::I:
      return 1.0;
    case Flavor::II:
      return a >= 1 ? 1.0 : by * std::pow(bxi, 1.0 - b);
    default:
      return std::pow(by, 1.0 - a);
  }
}

}  // namespace

double check_homogeneity(const PhaseFunction& phi, const PhaseSampleSpec& samples,
                         const std::vector<double>& taus) {
  double err = 0.0;
  const int n = phi.dim();
  for_samples(phi, samples, [&](const Point& y, const Point& xi) {
    const double v = phi.eval(y, xi);
    for (double t : taus) {
      const double tv = t * v;
      const double e = std::abs(phi.eval(y, scaled(xi, t, n)) - tv) / (std::abs(tv) + 1.0);
      err = std::max(err, e);
    }
  });
  return err;
}

double euler_identity_error(const PhaseFunction& phi, const PhaseSampleSpec& samples) {
  double err = 0.0;
  const int n = phi.dim();
  for_samples(phi, samples, [&](const Point& y, const Point& xi) {
    const double v = phi.eval(y, xi);
    const double e = std::abs(dot(phi.grad_xi(y, xi), xi, n) - v) / (std::abs(v) + 1.0);
    err = std::max(err, e);
  });
  return err;
}

PhaseCertificate certify_phase(const PhaseFunction& phi, Flavor flavor,
                               const PhaseSampleSpec& samples, double delta,
                               double ceiling) {
  const int n = phi.dim();
  PhaseCertificate c;
  c.flavor_checked = flavor;
  c.sample_spec = samples.describe();
  c.delta = delta;
  c.ceiling = ceiling;
  c.nondegeneracy_min = std::numeric_limits<double>::infinity();
  c.equivalence_ratios = {std::numeric_limits<double>::infinity(), 0.0,
                          std::numeric_limits<double>::infinity(), 0.0};

  struct Entry {
    MultiIndex a, b;
    int oa, ob;
    std::string key;
  };
  std::vector<Entry> entries;
  for (int tot = 2; tot <= 3; ++tot)
    for (int oa = 0; oa <= tot; ++oa)
      for (const auto& a : multi_indices(n, oa))
        for (const auto& b : multi_indices(n, tot - oa))
          entries.push_back({a, b, oa, tot - oa, index_key({a, b}, n)});
  for (const auto& e : entries) c.bound_constants[e.key] = 0.0;

  for_samples(phi, samples, [&](const Point& y, const Point& xi) {
    const double by = bracket(y, n);
    const double r = norm(xi, n);
    const double bxi = bracket(xi, n);
    c.nondegeneracy_min = std::min(c.nondegeneracy_min, std::abs(det(phi.mixed_hessian(y, xi), n)));
    const double g1 = bracket(phi.grad_xi(y, xi), n) / by;
    const double g2 = bracket(phi.grad_y(y, xi), n) / bxi;
    c.equivalence_ratios[0] = std::min(c.equivalence_ratios[0], g1);
    c.equivalence_ratios[1] = std::max(c.equivalence_ratios[1], g1);
    c.equivalence_ratios[2] = std::min(c.equivalence_ratios[2], g2);
    c.equivalence_ratios[3] = std::max(c.equivalence_ratios[3], g2);
    const double v = phi.eval(y, xi);
    c.euler_max = std::max(c.euler_max,
                           std::abs(dot(phi.grad_xi(y, xi), xi, n) - v) / (std::abs(v) + 1.0));
    // operator norm of the xi-Hessian by power iteration
    const Mat h = phi.hessian_xi(y, xi);
    Point w{};
    for (int i = 0; i < n; ++i) w[i] = 1.0 + 0.1 * i;
    double lam = 0.0;
    for (int it = 0; it < 60; ++it) {
      Point z{};
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z[i] += h[i][j] * w[j];
      lam = norm(z, n);
      if (lam == 0.0) break;
      w = scaled(z, 1.0 / lam, n);
    }
    c.hessian_xi_norm_sup = std::max(c.hessian_xi_norm_sup, lam);
    for (const auto& e : entries) {
      const double d = std::abs(phi.partial(y, xi, e.a, e.b));
      const double g = flavor_growth(flavor, e.oa, e.ob, by, r, bxi);
      double& slot = c.bound_constants[e.key];
      slot = std::max(slot, d / g);
    }
  });

  bool ok = c.nondegeneracy_min >= delta && std::isfinite(c.nondegeneracy_min);
  for (double r : c.equivalence_ratios) ok = ok && std::isfinite(r) && r > 0.0;
  for (const auto& [k, v] : c.bound_constants) ok = ok && std::isfinite(v) && v <= ceiling;
  c.pass = ok;
  return c;
}

double lemma_M_constant(const PhaseFunction& phi, const PhaseSampleSpec& samples) {
  const int n = phi.dim();
  const MultiIndex zero{};
  std::vector<MultiIndex> idx;
  for (int t = 2; t <= 3; ++t)
    for (const auto& b : multi_indices(n, t)) idx.push_back(b);
  double m = 0.0;
  for_samples(phi, samples, [&](const Point& y, const Point& xi) {
    const double by = bracket(y, n);
    const double bxi = bracket(xi, n);
    for (const auto& b : idx) {
      const int o = order(b, n);
      const double v = std::abs(phi.partial(y, xi, zero, b)) * std::pow(bxi, o - 1) / by;
      m = std::max(m, v);
    }
  });
  return m;
}

GradientCheck gradient_check(const PhaseFunction& phi, const PhaseSampleSpec& samples,
                             double h) {
  const int n = phi.dim();
  GradientCheck g;
  for_samples(phi, samples, [&](const Point& y, const Point& xi) {
    const double hy = h * std::max(1.0, norm(y, n));
    const double hx = h * std::max(1.0, norm(xi, n));
    const Point gx = phi.grad_xi(y, xi);
    const Point gy = phi.grad_y(y, xi);
    const Mat mh = phi.mixed_hessian(y, xi);
    const Mat hx_an = phi.hessian_xi(y, xi);
    for (int i = 0; i < n; ++i) {
      const Point e = unit(i);
      const Point xp = axpy(hx, e, xi, n), xm = axpy(-hx, e, xi, n);
      const Point yp = axpy(hy, e, y, n), ym = axpy(-hy, e, y, n);
      const double dx = (phi.eval(y, xp) - phi.eval(y, xm)) / (2.0 * hx);
      const double dy = (phi.eval(yp, xi) - phi.eval(ym, xi)) / (2.0 * hy);
      g.grad_xi_error = std::max(g.grad_xi_error, std::abs(dx - gx[i]));
      g.grad_y_error = std::max(g.grad_y_error, std::abs(dy - gy[i]));
      const Point gxp = phi.grad_xi(yp, xi), gxm = phi.grad_xi(ym, xi);
      const Point ggp = phi.grad_xi(y, xp), ggm = phi.grad_xi(y, xm);
      for (int j = 0; j < n; ++j) {
        const double m = (gxp[j] - gxm[j]) / (2.0 * hy);
        g.mixed_error = std::max(g.mixed_error, std::abs(m - mh[i][j]));
        const double hh = (ggp[j] - ggm[j]) / (2.0 * hx);
        g.hessian_xi_error = std::max(g.hessian_xi_error, std::abs(hh - hx_an[i][j]));
      }
    }
  });
  return g;
}

}  // namespace fiolab
