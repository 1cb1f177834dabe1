#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fiolab {

using cplx = std::complex<double>;

// Points in R^n for n <= 3; unused trailing components stay zero.
using Point = std::array<double, 3>;
using Mat = std::array<std::array<double, 3>, 3>;

inline constexpr int kMaxDim = 3;
inline constexpr double kPi = 3.14159265358979323846;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureRefusal : public std::runtime_error {
 public:
  QuadratureRefusal(const std::string& what, long long required_radial,
                    long long required_angular, long long required_points = 0)
      : std::runtime_error(what),
        required_radial(required_radial),
        required_angular(required_angular),
        required_points(required_points) {}
  long long required_radial;
  long long required_angular;
  long long required_points;
};

double dot(const Point& a, const Point& b, int n);
double norm(const Point& a, int n);
// <x> = (1 + |x|^2)^{1/2}
double bracket(const Point& a, int n);
inline double bracket(double r) { return std::sqrt(1.0 + r * r); }

Point axpy(double a, const Point& x, const Point& y, int n);  // a*x + y
Point scaled(const Point& x, double a, int n);
Point sub(const Point& a, const Point& b, int n);

double det(const Mat& m, int n);
double frobenius(const Mat& m, int n);

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);
// Quintic smoothstep 6u^5 - 15u^4 + 10u^3 clamped to [0, 1].
double quintic_step(double u);
// exp(1 - 1/(1 - v^2)) on |v| < 1, zero elsewhere; peak value 1 at v = 0.
double unit_bump(double v);
double unit_bump_derivative(double v);

// Fixed-order pairwise summation; the tree depends only on the length.
double pairwise_sum(std::span<const double> v);
cplx pairwise_sum(std::span<const cplx> v);

// Runs fn(begin, end) over `workers` contiguous chunks of [0, count).
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t, std::size_t)>& fn);
int default_workers();

// Platform-independent deterministic generator (splitmix64).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

// Unit directions used by sample sets: n=1 {+1,-1}, n=2 equally spaced
// angles starting on the first axis, n=3 a Fibonacci lattice.
std::vector<Point> sample_directions(int n, int count);

}  // namespace fiolab
