#include "fiolab/grid.hpp"

#include <string>

namespace fiolab {

double Grid::cell_volume() const { return std::pow(spacing(), n); }

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int d = 0; d < n; ++d) s *= static_cast<std::size_t>(points_per_axis);
  return s;
}

std::array<int, 3> Grid::index(std::size_t idx) const {
  std::array<int, 3> ix{};
  const auto p = static_cast<std::size_t>(points_per_axis);
  for (int d = n - 1; d >= 0; --d) {
    ix[d] = static_cast<int>(idx % p);
    idx /= p;
  }
  return ix;
}

std::size_t Grid::flat(const std::array<int, 3>& ix) const {
  std::size_t f = 0;
  for (int d = 0; d < n; ++d) f = f * static_cast<std::size_t>(points_per_axis) + ix[d];
  return f;
}

Point Grid::point(std::size_t idx) const {
  const auto ix = index(idx);
  Point p{};
  for (int d = 0; d < n; ++d) p[d] = coord(d, ix[d]);
  return p;
}

void Grid::validate(std::size_t max_points) const {
  if (n < 1 || n > kMaxDim) throw ConfigError("grid dimension must be 1, 2 or 3");
  if (!(extent > 0.0)) throw ConfigError("grid extent must be positive");
  if (points_per_axis < 2) throw ConfigError("grid needs at least 2 points per axis");
  double total = 1.0;
  for (int d = 0; d < n; ++d) total *= points_per_axis;
  if (total > static_cast<double>(max_points))
    throw ConfigError("grid of " + std::to_string(static_cast<long long>(total)) +
                      " points exceeds the memory ceiling of " + std::to_string(max_points));
}

bool same_geometry(const Grid& a, const Grid& b) {
  if (a.n != b.n || a.extent != b.extent || a.points_per_axis != b.points_per_axis) return false;
  for (int d = 0; d < a.n; ++d)
    if (a.center[d] != b.center[d]) return false;
  return true;
}

Field::Field(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw DomainError("field length does not match grid");
}

Field sample_field(const Grid& g, const std::function<cplx(const Point&)>& f, int workers) {
  Field out(g);
  parallel_for(g.size(), workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out.values[i] = f(g.point(i));
  });
  return out;
}

}  // namespace fiolab
