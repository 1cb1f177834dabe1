#pragma once

#include <cstddef>
#include <vector>

#include "fiolab/common.hpp"

namespace fiolab {

// Uniform grid x_i = center - extent + i * spacing, i = 0..points-1 per
// axis, stored row-major with the last axis fastest.
struct Grid {
  int n = 2;
  double extent = 12.0;
  int points_per_axis = 128;
  Point center{};

  double spacing() const { return 2.0 * extent / points_per_axis; }
  double cell_volume() const;
  std::size_t size() const;
  double coord(int i) const { return -extent + i * spacing(); }  // relative to center
  double coord(int axis, int i) const { return center[axis] + coord(i); }
  Point point(std::size_t idx) const;
  std::array<int, 3> index(std::size_t idx) const;
  std::size_t flat(const std::array<int, 3>& ix) const;
  void validate(std::size_t max_points = std::size_t{1} << 28) const;
};

bool same_geometry(const Grid& a, const Grid& b);

struct Field {
  Grid grid;
  std::vector<cplx> values;

  Field() = default;
  explicit Field(const Grid& g) : grid(g), values(g.size()) {}
  Field(const Grid& g, std::vector<cplx> v);
};

Field sample_field(const Grid& g, const std::function<cplx(const Point&)>& f, int workers = 1);

}  // namespace fiolab
