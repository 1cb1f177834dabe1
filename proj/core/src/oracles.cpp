#include "fiolab/oracles.hpp"

#include "fft.hpp"

namespace fiolab {

Field dft_multiplier_oracle(const Field& u, const std::function<cplx(const Point&)>& m, int pad) {
  if (pad < 1) throw DomainError("oracle padding must be >= 1");
  const Grid& g = u.grid;
  Grid big = g;
  big.extent = g.extent * pad;
  big.points_per_axis = g.points_per_axis * pad;
  const int off = (big.points_per_axis - g.points_per_axis) / 2;
  Field w(big);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto ix = g.index(i);
    for (int d = 0; d < g.n; ++d) ix[d] += off;
    w.values[big.flat(ix)] = u.values[i];
  }
  detail::lattice_analysis(w.values, big);
  detail::for_lattice(big, [&](const Point& xi, std::size_t idx) { w.values[idx] *= m(xi); });
  detail::lattice_synthesis(w.values, big);
  Field out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto ix = g.index(i);
    for (int d = 0; d < g.n; ++d) ix[d] += off;
    out.values[i] = w.values[big.flat(ix)];
  }
  return out;
}

double annulus_bracket_integral(int n, double r1, double r2) {
  if (r2 <= r1) return 0.0;
  switch (n) {
    case 1:
      return 2.0 * (std::atan(r2) - std::atan(r1));
    case 2:
      return kPi * std::log((1.0 + r2 * r2) / (1.0 + r1 * r1));
    case 3: {
      auto F = [](double r) { return std::asinh(r) - r / std::sqrt(1.0 + r * r); };
      return 4.0 * kPi * (F(r2) - F(r1));
    }
    default:
      throw DomainError("annulus integral defined for n <= 3");
  }
}

double unit_ball_volume(int n) {
  switch (n) {
    case 1:
      return 2.0;
    case 2:
      return kPi;
    case 3:
      return 4.0 * kPi / 3.0;
    default:
      throw DomainError("unit ball volume defined for n <= 3");
  }
}

double relative_l2(const Field& a, const Field& b) {
  if (a.values.size() != b.values.size()) throw DomainError("relative_l2 size mismatch");
  std::vector<double> num(a.values.size()), den(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    num[i] = std::norm(a.values[i] - b.values[i]);
    den[i] = std::norm(b.values[i]);
  }
  const double d = pairwise_sum(std::span<const double>(den));
  const double nn = pairwise_sum(std::span<const double>(num));
  return d > 0.0 ? std::sqrt(nn / d) : std::sqrt(nn);
}

}  // namespace fiolab
