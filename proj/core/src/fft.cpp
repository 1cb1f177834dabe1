#include "fft.hpp"

#include <fftw3.h>

#include <cstring>

namespace fiolab::detail {

void fft_inplace(std::vector<cplx>& data, int n, int P, int sign) {
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(P);
  if (data.size() != total) throw DomainError("fft size mismatch");
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
  if (!buf) throw std::bad_alloc();
  std::memcpy(static_cast<void*>(buf), static_cast<const void*>(data.data()), sizeof(fftw_complex) * total);
  int dims[3] = {P, P, P};
  fftw_plan plan = fftw_plan_dft(n, dims, buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  std::memcpy(static_cast<void*>(data.data()), static_cast<const void*>(buf), sizeof(fftw_complex) * total);
  fftw_free(buf);
}

double lattice_step(const Grid& g) { return 2.0 * kPi / (g.points_per_axis * g.spacing()); }

double lattice_nyquist(const Grid& g) { return kPi / g.spacing(); }

double lattice_frequency(int i, const Grid& g) {
  const int P = g.points_per_axis;
  const int s = i < (P + 1) / 2 ? i : i - P;
  return s * lattice_step(g);
}

namespace {

// per-axis tables of e^{sign i x0_d xi}
std::vector<std::vector<cplx>> origin_phases(const Grid& g, double sign) {
  std::vector<std::vector<cplx>> t(g.n);
  for (int d = 0; d < g.n; ++d) {
    const double x0 = g.center[d] - g.extent;
    t[d].resize(g.points_per_axis);
    for (int i = 0; i < g.points_per_axis; ++i)
      t[d][i] = std::polar(1.0, sign * x0 * lattice_frequency(i, g));
  }
  return t;
}

void apply_phases(std::vector<cplx>& data, const Grid& g,
                  const std::vector<std::vector<cplx>>& t, double scale) {
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    const auto ix = g.index(idx);
    cplx f(scale, 0.0);
    for (int d = 0; d < g.n; ++d) f *= t[d][ix[d]];
    data[idx] *= f;
  }
}

}  // namespace

void lattice_analysis(std::vector<cplx>& data, const Grid& g) {
  fft_inplace(data, g.n, g.points_per_axis, -1);
  apply_phases(data, g, origin_phases(g, -1.0), g.cell_volume());
}

void lattice_synthesis(std::vector<cplx>& data, const Grid& g) {
  const double s = std::pow(lattice_step(g) / (2.0 * kPi), g.n);
  apply_phases(data, g, origin_phases(g, 1.0), s);
  fft_inplace(data, g.n, g.points_per_axis, 1);
}

int fft_friendly(int m) {
  if (m <= 1) return 1;
  for (int c = m;; ++c) {
    int r = c;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return c;
  }
}

}  // namespace fiolab::detail
