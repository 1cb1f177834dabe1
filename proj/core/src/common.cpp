#include "fiolab/common.hpp"

#include <algorithm>
#include <thread>

namespace fiolab {

double dot(const Point& a, const Point& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double norm(const Point& a, int n) { return std::sqrt(dot(a, a, n)); }

double bracket(const Point& a, int n) { return std::sqrt(1.0 + dot(a, a, n)); }

Point axpy(double a, const Point& x, const Point& y, int n) {
  Point r{};
  for (int i = 0; i < n; ++i) r[i] = a * x[i] + y[i];
  return r;
}

Point scaled(const Point& x, double a, int n) {
  Point r{};
  for (int i = 0; i < n; ++i) r[i] = a * x[i];
  return r;
}

Point sub(const Point& a, const Point& b, int n) {
  Point r{};
  for (int i = 0; i < n; ++i) r[i] = a[i] - b[i];
  return r;
}

double det(const Mat& m, int n) {
  switch (n) {
    case 1:
      return m[0][0];
    case 2:
      return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    default:
      return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
             m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
             m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }
}

double frobenius(const Mat& m, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += m[i][j] * m[i][j];
  return std::sqrt(s);
}

namespace {
double exp_tail(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = exp_tail(t);
  const double b = exp_tail(1.0 - t);
  return a / (a + b);
}

double quintic_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (u * (6.0 * u - 15.0) + 10.0);
}

double unit_bump(double v) {
  const double w = 1.0 - v * v;
  if (w <= 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / w);
}

double unit_bump_derivative(double v) {
  const double w = 1.0 - v * v;
  if (w <= 0.0) return 0.0;
  return unit_bump(v) * (-2.0 * v / (w * w));
}

namespace {
template <class T>
T pairwise_impl(const T* p, std::size_t n) {
  if (n <= 32) {
    T s{};
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_impl(p, h) + pairwise_impl(p + h, n - h);
}
}  // namespace

double pairwise_sum(std::span<const double> v) {
  return pairwise_impl(v.data(), v.size());
}

cplx pairwise_sum(std::span<const cplx> v) {
  return pairwise_impl(v.data(), v.size());
}

int default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  if (workers <= 0) workers = default_workers();
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  if (w <= 1) {
    fn(0, count);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(w - 1);
  std::vector<std::exception_ptr> errors(w);
  const std::size_t chunk = (count + w - 1) / w;
  for (std::size_t t = 0; t < w; ++t) {
    const std::size_t b = t * chunk;
    const std::size_t e = std::min(count, b + chunk);
    if (b >= e) continue;
    auto job = [&, t, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    };
    if (t + 1 == w) {
      job();
    } else {
      threads.emplace_back(job);
    }
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::vector<Point> sample_directions(int n, int count) {
  std::vector<Point> dirs;
  if (n == 1) {
    dirs.push_back({1.0, 0.0, 0.0});
    dirs.push_back({-1.0, 0.0, 0.0});
    return dirs;
  }
  if (count < 1) count = 1;
  if (n == 2) {
    for (int d = 0; d < count; ++d) {
      const double a = 2.0 * kPi * d / count;
      dirs.push_back({std::cos(a), std::sin(a), 0.0});
    }
    return dirs;
  }
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int d = 0; d < count; ++d) {
    const double z = 1.0 - (2.0 * d + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = golden * d;
    dirs.push_back({r * std::cos(a), r * std::sin(a), z});
  }
  return dirs;
}

}  // namespace fiolab
