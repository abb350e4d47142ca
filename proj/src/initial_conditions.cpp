#include "dgns/initial_conditions.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "dgns/operators.hpp"
#include "dgns/spectral.hpp"

namespace dgns {

VelocityField taylor_green(const GridSpec& grid, double amplitude) {
  const double k = 2.0 * std::numbers::pi / grid.box_length;
  return make_field(grid, [k, amplitude](double x, double y, double z) -> std::array<double, 3> {
    return {amplitude * std::sin(k * x) * std::cos(k * y) * std::cos(k * z),
            -amplitude * std::cos(k * x) * std::sin(k * y) * std::cos(k * z), 0.0};
  });
}

VelocityField abc_flow(const GridSpec& grid, double a, double b, double c) {
  const double k = 2.0 * std::numbers::pi / grid.box_length;
  return make_field(grid, [=](double x, double y, double z) -> std::array<double, 3> {
    return {a * std::sin(k * z) + c * std::cos(k * y), b * std::sin(k * x) + a * std::cos(k * z),
            c * std::sin(k * y) + b * std::cos(k * x)};
  });
}

VelocityField random_divergence_free(const GridSpec& grid, std::uint64_t seed, double energy,
                                     double spectrum_slope) {
  grid.validate();
  if (!(energy >= 0.0) || !std::isfinite(energy)) {
    throw std::invalid_argument("random_divergence_free: energy must be finite and >= 0");
  }
  VelocityField u(grid);
  if (energy == 0.0) return u;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int c = 0; c < 3; ++c) {
    for (double& v : u.component(c).values()) v = gauss(rng);
  }

  SpectralVector coef = spectral::forward(u);
  const int n = grid.n, nz = coef[0].nz();
  for (int mx = 0; mx < n; ++mx) {
    const int sx = (mx <= n / 2) ? mx : mx - n;
    for (int my = 0; my < n; ++my) {
      const int sy = (my <= n / 2) ? my : my - n;
      for (int mz = 0; mz < nz; ++mz) {
        const std::size_t idx = coef[0].index(mx, my, mz);
        const double m2 = static_cast<double>(sx) * sx + static_cast<double>(sy) * sy +
                          static_cast<double>(mz) * mz;
        const double env = (m2 == 0.0) ? 0.0 : std::pow(m2, 0.25 * spectrum_slope);
        for (int c = 0; c < 3; ++c) coef[c][idx] *= env;
      }
    }
  }
  spectral::apply_dealias(coef, grid.dealias_fraction);
  spectral::project_divergence_free(coef);
  u = spectral::inverse(coef, grid);

  ScalarField mag2 = magnitude(u);
  for (double& v : mag2.values()) v = v * v;
  const double current = 0.5 * box_integral(mag2);
  if (!(current > 0.0)) {
    throw std::invalid_argument("random_divergence_free: degenerate sample, zero energy");
  }
  const double scale = std::sqrt(energy / current);
  for (int c = 0; c < 3; ++c) {
    for (double& v : u.component(c).values()) v *= scale;
  }
  return u;
}

}  // namespace dgns
