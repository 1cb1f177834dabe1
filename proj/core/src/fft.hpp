#pragma once

#include <vector>

#include "fiolab/common.hpp"
#include "fiolab/grid.hpp"

namespace fiolab::detail {

// In-place unnormalized n-dimensional DFT of a row-major P^n array.
// sign = -1 forward (e^{-i}), +1 backward (e^{+i}).
void fft_inplace(std::vector<cplx>& data, int n, int P, int sign);

// Discrete frequency of lattice index i: (i or i - P) * 2 pi / (P h).
double lattice_frequency(int i, const Grid& g);
double lattice_step(const Grid& g);
double lattice_nyquist(const Grid& g);

// u -> uhat(xi) = h^n sum_x e^{-i<x, xi>} u(x) on the lattice.
void lattice_analysis(std::vector<cplx>& data, const Grid& g);
// G -> F(x) = (2 pi)^{-n} sum_xi e^{i<x, xi>} G(xi) dxi^n on the grid.
void lattice_synthesis(std::vector<cplx>& data, const Grid& g);

// Evaluates fn(xi, flat index) over the lattice.
template <class Fn>
void for_lattice(const Grid& g, Fn&& fn) {
  const std::size_t total = g.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto ix = g.index(idx);
    Point xi{};
    for (int d = 0; d < g.n; ++d) xi[d] = lattice_frequency(ix[d], g);
    fn(xi, idx);
  }
}

// Smallest 2^a 3^b 5^c >= m.
int fft_friendly(int m);

}  // namespace fiolab::detail
