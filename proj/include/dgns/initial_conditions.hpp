#pragma once

#include <cstdint>

#include "dgns/grid.hpp"

namespace dgns {

/// Taylor-Green vortex at the fundamental wavenumber 2*pi/L:
/// amplitude * (sin kx cos ky cos kz, -cos kx sin ky cos kz, 0).
VelocityField taylor_green(const GridSpec& grid, double amplitude = 1.0);

/// Arnold-Beltrami-Childress flow at the fundamental wavenumber.
VelocityField abc_flow(const GridSpec& grid, double a = 1.0, double b = 1.0, double c = 1.0);

/// Band-limited random divergence-free field. White noise is shaped by the
/// isotropic envelope |m|^(slope/2) (tilting the white-noise spectrum by
/// |m|^slope), dealiased with the grid mask, Leray-projected and rescaled so
/// the kinetic energy (1/2)||u||_2^2 equals `energy`. Deterministic for a
/// fixed seed.
VelocityField random_divergence_free(const GridSpec& grid, std::uint64_t seed, double energy,
                                     double spectrum_slope);

}  // namespace dgns
