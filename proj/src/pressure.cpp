#include "dgns/pressure.hpp"

#include <cmath>
#include <stdexcept>

#include "dgns/degiorgi.hpp"
#include "dgns/operators.hpp"
#include "dgns/spectral.hpp"
#include "dgns/util.hpp"

namespace dgns {
namespace {

/// Spectral coefficients of the pressure driven by the weighted tensor
/// T_ij = w * u_i * u_j (w == nullptr means w identically 1):
/// P_hat(k) = -sum_ij (k_i k_j / |k|^2) T_hat_ij(k), zero mode dropped.
SpectralScalar pressure_hat_from_tensor(const VelocityField& u, const ScalarField* weight) {
  const GridSpec& grid = u.grid();
  const int n = grid.n;
  const std::size_t nodes = grid.node_count();

  SpectralScalar acc(n, grid.box_length);
  ScalarField product(grid);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      const std::span<const double> ui = u.component(i).values();
      const std::span<const double> uj = u.component(j).values();
      const std::span<double> out = product.values();
      parallel_for(nodes, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t m = lo; m < hi; ++m) {
          double t = ui[m] * uj[m];
          if (weight != nullptr) t *= weight->values()[m];
          out[m] = t;
        }
      });
      SpectralScalar that = spectral::forward(product);
      // Off-diagonal pairs appear twice in the double sum.
      const double pair_weight = (i == j) ? 1.0 : 2.0;
      for (int mx = 0; mx < n; ++mx) {
        const double kx = spectral::deriv_freq(n, grid.box_length, mx);
        for (int my = 0; my < n; ++my) {
          const double ky = spectral::deriv_freq(n, grid.box_length, my);
          for (int mz = 0; mz < acc.nz(); ++mz) {
            const double kz = spectral::deriv_freq(n, grid.box_length, mz);
            const double k[3] = {kx, ky, kz};
            const double k2 = kx * kx + ky * ky + kz * kz;
            if (k2 == 0.0) continue;
            const std::size_t idx = acc.index(mx, my, mz);
            acc[idx] += -pair_weight * (k[i] * k[j] / k2) * that[idx];
          }
        }
      }
    }
  }
  return acc;
}

}  // namespace

ScalarField solve_pressure(const VelocityField& u) {
  SpectralScalar phat = pressure_hat_from_tensor(u, nullptr);
  return spectral::inverse(phat, u.grid());
}

VectorField solve_pressure_gradient(const VelocityField& u) {
  const GridSpec& grid = u.grid();
  SpectralScalar phat = pressure_hat_from_tensor(u, nullptr);
  VectorField grad(grid);
  for (int axis = 0; axis < 3; ++axis) {
    SpectralScalar dhat = phat;
    spectral::apply_derivative(dhat, axis);
    spectral::apply_dealias(dhat, grid.dealias_fraction);
    grad.component(axis) = spectral::inverse(dhat, grid);
  }
  return grad;
}

ScalarField riesz_apply(const ScalarField& f, int i, int j) {
  if (i < 0 || i > 2 || j < 0 || j > 2) {
    throw std::invalid_argument("riesz_apply: component indices must be in 0..2");
  }
  SpectralScalar fhat = spectral::forward(f);
  spectral::apply_riesz(fhat, i, j);
  return spectral::inverse(fhat, f.grid());
}

PressureSplit split_pressure(const VelocityField& u, int k) {
  const GridSpec& grid = u.grid();
  const std::size_t nodes = grid.node_count();
  const ScalarField vk = truncate(u, k);

  // Share a = v_k/|u| and the two tensor weights (1-a)(1+a) and a^2; the
  // weights sum to 1 wherever |u| > 0, so the two pressures sum to the
  // full one.
  ScalarField w1(grid);
  ScalarField w2(grid);
  parallel_for(nodes, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t m = lo; m < hi; ++m) {
      double s = std::sqrt(u.component(0).values()[m] * u.component(0).values()[m] +
                           u.component(1).values()[m] * u.component(1).values()[m] +
                           u.component(2).values()[m] * u.component(2).values()[m]);
      double a = (s > kMagnitudeFloor) ? vk.values()[m] / s : 0.0;
      w1.values()[m] = (1.0 - a) * (1.0 + a);
      w2.values()[m] = a * a;
    }
  });

  PressureSplit split{k, ScalarField(grid), ScalarField(grid), VectorField(grid)};
  SpectralScalar p1hat = pressure_hat_from_tensor(u, &w1);
  split.p_k1 = spectral::inverse(p1hat, grid);
  SpectralScalar p2hat = pressure_hat_from_tensor(u, &w2);
  split.p_k2 = spectral::inverse(p2hat, grid);
  for (int axis = 0; axis < 3; ++axis) {
    SpectralScalar dhat = p2hat;
    spectral::apply_derivative(dhat, axis);
    spectral::apply_dealias(dhat, grid.dealias_fraction);
    split.grad_p_k2.component(axis) = spectral::inverse(dhat, grid);
  }
  return split;
}

double measure_cz_constant(const std::vector<VelocityField>& sample, double p_in, double p_out) {
  if (p_in <= 0.0 || p_out <= 0.0) {
    throw std::invalid_argument("measure_cz_constant: exponents must be positive");
  }
  double best = 0.0;
  for (const VelocityField& u : sample) {
    const double denom = space_norm(u, p_in);
    if (denom <= 0.0) continue;
    const ScalarField p = solve_pressure(u);
    best = std::max(best, space_norm(p, p_out) / (denom * denom));
  }
  return best;
}

CzSplitRatios measure_cz_split(const std::vector<VelocityField>& sample, int k) {
  CzSplitRatios ratios;
  for (const VelocityField& u : sample) {
    const PressureSplit split = split_pressure(u, k);
    const double u6 = space_norm(u, 6.0);
    if (u6 > 0.0) {
      ratios.p1_l6_ratio =
          std::max(ratios.p1_l6_ratio, space_norm(split.p_k1, 6.0) / (3.0 * u6));
    }

    // Majorant 6 v_k d_k for the gradient of the second piece.
    const ScalarField vk = truncate(u, k);
    const ScalarField dk = dissipation(u, k);
    ScalarField majorant(u.grid());
    ScalarField grad_mag(u.grid());
    const std::size_t nodes = u.grid().node_count();
    parallel_for(nodes, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t m = lo; m < hi; ++m) {
        majorant.values()[m] = 6.0 * vk.values()[m] * dk.values()[m];
        double g2 = 0.0;
        for (int c = 0; c < 3; ++c) {
          double g = split.grad_p_k2.component(c).values()[m];
          g2 += g * g;
        }
        grad_mag.values()[m] = std::sqrt(g2);
      }
    });
    const double denom = space_norm(majorant, 1.5);
    if (denom > 0.0) {
      ratios.grad_p2_l32_ratio =
          std::max(ratios.grad_p2_l32_ratio, space_norm(grad_mag, 1.5) / denom);
    }
  }
  return ratios;
}

}  // namespace dgns
