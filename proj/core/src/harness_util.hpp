#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fiolab/amplitude.hpp"
#include "fiolab/config.hpp"
#include "fiolab/engine.hpp"
#include "fiolab/harness.hpp"
#include "fiolab/phase.hpp"

namespace fiolab::detail {

PhaseFunction phase_of(const RunConfig& cfg);
Amplitude amplitude_of(const RunConfig& cfg, const Orders& orders);
QuadratureSpec quad_of(const RunConfig& cfg);

Point along_e1(double r, int n);
// mean of grad_xi phi(y, omega) over unit directions
Point singular_center(const PhaseFunction& phi, const Point& y);

// Points per axis resolving |xi| <= rho_hi at the configured oversample,
// or nullopt when the grid would exceed cfg.max_points.
std::optional<int> lattice_points(const RunConfig& cfg, double extent, double rho_hi);
Grid make_grid(int n, double extent, int points, const Point& center);

// Fit over the finite samples when at least three exist.
std::optional<Fit> fit_if(const std::vector<double>& x, const std::vector<double>& y);

ExperimentReport start_report(const RunConfig& cfg);
std::string fmt(double v);

}  // namespace fiolab::detail
