#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "fiolab/grid.hpp"

namespace fiolab {

// Binary layout: 32-byte header (magic "FIOLAB01", uint32 n, uint32
// points_per_axis, float64 extent, 8 reserved bytes) followed by
// little-endian (re, im) float64 pairs in row-major order.
void write_field(const Field& f, const std::string& path);
// Reads the grid centre from the sidecar when present.
Field read_field(const std::string& path);

nlohmann::json grid_metadata(const Grid& g);
// Writes <path> and the sidecar <path>.json.
void write_field_with_sidecar(const Field& f, const std::string& path);

}  // namespace fiolab
