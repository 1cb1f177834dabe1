#pragma once

#include <functional>

#include "fiolab/grid.hpp"

namespace fiolab {

// Inverse transform of m(xi) * uhat(xi), with u zero-padded to `pad`
// times the grid extent before the DFT and cropped afterwards.
Field dft_multiplier_oracle(const Field& u, const std::function<cplx(const Point&)>& m,
                            int pad = 4);

// Closed form of the integral of <x>^{-n} over r1 <= |x| <= r2 in R^n.
double annulus_bracket_integral(int n, double r1, double r2);

// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

// |a - b|_2 / |b|_2 over the grid values.
double relative_l2(const Field& a, const Field& b);

}  // namespace fiolab
