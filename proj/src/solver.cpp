#include "dgns/solver.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dgns/operators.hpp"
#include "dgns/spectral.hpp"

namespace dgns {

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("SolverConfig: dt must be positive");
  }
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("SolverConfig: t_end must be >= 0");
  }
  if (!(viscosity > 0.0) || !std::isfinite(viscosity)) {
    throw std::invalid_argument("SolverConfig: viscosity must be positive");
  }
  if (snapshot_stride < 1) {
    throw std::invalid_argument("SolverConfig: snapshot_stride must be >= 1");
  }
  const long long steps = std::llround(t_end / dt);
  if (std::abs(steps * dt - t_end) > 1e-9 * std::max(1.0, t_end)) {
    throw std::invalid_argument("SolverConfig: t_end must be an integer number of dt steps");
  }
  if (steps % snapshot_stride != 0) {
    throw std::invalid_argument(
        "SolverConfig: step count must be divisible by snapshot_stride so the final state is "
        "stored");
  }
}

BlowUpError::BlowUpError(int step, double time, Trajectory partial)
    : FieldError([&] {
        std::ostringstream msg;
        msg << "solver blow-up: non-finite state at step " << step << ", time " << time << " ("
            << partial.snapshots.size() << " snapshots retained)";
        return msg.str();
      }()),
      step_(step),
      time_(time),
      partial_(std::move(partial)) {}

namespace {

struct SeriesPoint {
  double kinetic = 0.0;
  double enstrophy = 0.0;
};

// Spectral curl without transforms; input and output share the r2c layout.
SpectralVector spectral_curl(const SpectralVector& c) {
  const int n = c[0].n(), nz = c[0].nz();
  const double L = c[0].box_length();
  SpectralVector w;
  for (int i = 0; i < 3; ++i) w[i] = SpectralScalar(n, L);
  for (int mx = 0; mx < n; ++mx) {
    const double kx = spectral::deriv_freq(n, L, mx);
    for (int my = 0; my < n; ++my) {
      const double ky = spectral::deriv_freq(n, L, my);
      for (int mz = 0; mz < nz; ++mz) {
        const double kz = spectral::deriv_freq(n, L, mz);
        const std::size_t idx = c[0].index(mx, my, mz);
        const std::complex<double> I(0.0, 1.0);
        w[0][idx] = I * (ky * c[2][idx] - kz * c[1][idx]);
        w[1][idx] = I * (kz * c[0][idx] - kx * c[2][idx]);
        w[2][idx] = I * (kx * c[1][idx] - ky * c[0][idx]);
      }
    }
  }
  return w;
}

SeriesPoint measure_series(const VectorField& u, const VectorField& w) {
  long double ke = 0.0L, ens = 0.0L;
  for (int c = 0; c < 3; ++c) {
    for (const double v : u.component(c).values()) ke += static_cast<long double>(v) * v;
    for (const double v : w.component(c).values()) ens += static_cast<long double>(v) * v;
  }
  const double h3 = u.grid().cell_volume();
  return {static_cast<double>(0.5L * ke) * h3, static_cast<double>(ens) * h3};
}

// Rotational-form nonlinear term P[dealias(u x omega)] with the mean mode
// pinned to zero; also reports kinetic energy and enstrophy of the input
// state since the real-space fields are available here anyway.
SpectralVector nonlinear_term(const SpectralVector& uhat, const GridSpec& grid,
                              SeriesPoint* series) {
  const SpectralVector what = spectral_curl(uhat);
  const VectorField u = spectral::inverse(uhat, grid);
  const VectorField w = spectral::inverse(what, grid);
  if (series != nullptr) *series = measure_series(u, w);

  VectorField cross(grid);
  const auto u0 = u.component(0).values(), u1 = u.component(1).values(),
             u2 = u.component(2).values();
  const auto w0 = w.component(0).values(), w1 = w.component(1).values(),
             w2 = w.component(2).values();
  auto c0 = cross.component(0).values(), c1 = cross.component(1).values(),
       c2 = cross.component(2).values();
  parallel_for(u0.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      c0[i] = u1[i] * w2[i] - u2[i] * w1[i];
      c1[i] = u2[i] * w0[i] - u0[i] * w2[i];
      c2[i] = u0[i] * w1[i] - u1[i] * w0[i];
    }
  });

  SpectralVector nhat = spectral::forward(cross);
  spectral::apply_dealias(nhat, grid.dealias_fraction);
  spectral::project_divergence_free(nhat);
  for (int c = 0; c < 3; ++c) nhat[c][0] = {0.0, 0.0};  // mean mode is conserved exactly
  return nhat;
}

// Per-mode viscous decay factors exp(-nu |k|^2 delta) using the full
// (Nyquist-inclusive) wavenumbers.
std::vector<double> viscous_factors(const GridSpec& grid, double nu, double delta) {
  const int n = grid.n, nz = n / 2 + 1;
  std::vector<double> e(static_cast<std::size_t>(n) * n * nz);
  std::size_t idx = 0;
  for (int mx = 0; mx < n; ++mx) {
    const double kx = spectral::full_freq(n, grid.box_length, mx);
    for (int my = 0; my < n; ++my) {
      const double ky = spectral::full_freq(n, grid.box_length, my);
      for (int mz = 0; mz < nz; ++mz, ++idx) {
        const double kz = spectral::full_freq(n, grid.box_length, mz);
        e[idx] = std::exp(-nu * (kx * kx + ky * ky + kz * kz) * delta);
      }
    }
  }
  return e;
}

struct Stepper {
  GridSpec grid;
  double dt;
  std::vector<double> e_half;
  std::vector<double> e_full;

  Stepper(const GridSpec& g, double dt_, double nu)
      : grid(g),
        dt(dt_),
        e_half(viscous_factors(g, nu, 0.5 * dt_)),
        e_full(viscous_factors(g, nu, dt_)) {}

  // Classical integrating-factor RK4: the stiff viscous part is integrated
  // exactly, RK4 handles only the nonlinear term.
  SpectralVector advance(const SpectralVector& uhat, SeriesPoint* series) const {
    const std::size_t m = e_half.size();
    const SpectralVector n1 = nonlinear_term(uhat, grid, series);

    SpectralVector s2;
    for (int c = 0; c < 3; ++c) {
      s2[c] = SpectralScalar(grid.n, grid.box_length);
      for (std::size_t i = 0; i < m; ++i) {
        s2[c][i] = e_half[i] * (uhat[c][i] + 0.5 * dt * n1[c][i]);
      }
    }
    const SpectralVector n2 = nonlinear_term(s2, grid, nullptr);

    SpectralVector s3;
    for (int c = 0; c < 3; ++c) {
      s3[c] = SpectralScalar(grid.n, grid.box_length);
      for (std::size_t i = 0; i < m; ++i) {
        s3[c][i] = e_half[i] * uhat[c][i] + 0.5 * dt * n2[c][i];
      }
    }
    const SpectralVector n3 = nonlinear_term(s3, grid, nullptr);

    SpectralVector s4;
    for (int c = 0; c < 3; ++c) {
      s4[c] = SpectralScalar(grid.n, grid.box_length);
      for (std::size_t i = 0; i < m; ++i) {
        s4[c][i] = e_full[i] * uhat[c][i] + dt * e_half[i] * n3[c][i];
      }
    }
    const SpectralVector n4 = nonlinear_term(s4, grid, nullptr);

    SpectralVector out;
    for (int c = 0; c < 3; ++c) {
      out[c] = SpectralScalar(grid.n, grid.box_length);
      const double w = dt / 6.0;
      for (std::size_t i = 0; i < m; ++i) {
        out[c][i] = e_full[i] * uhat[c][i] +
                    w * (e_full[i] * n1[c][i] + 2.0 * e_half[i] * (n2[c][i] + n3[c][i]) +
                         n4[c][i]);
      }
    }
    return out;
  }
};

double linf_magnitude(const VelocityField& u) {
  double m = 0.0;
  const auto a = u.component(0).values(), b = u.component(1).values(),
             c = u.component(2).values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::sqrt(a[i] * a[i] + b[i] * b[i] + c[i] * c[i]));
  }
  return m;
}

}  // namespace

VelocityField step(const VelocityField& u, double dt, double viscosity) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step: dt must be positive");
  u.grid().validate();
  const Stepper stepper(u.grid(), dt, viscosity);
  const SpectralVector uhat = spectral::forward(u);
  return spectral::inverse(stepper.advance(uhat, nullptr), u.grid());
}

Trajectory simulate(const VelocityField& u0, const SolverConfig& cfg) {
  cfg.validate();
  u0.grid().validate();
  u0.require_finite("simulate: initial condition");

  const double linf0 = linf_magnitude(u0);
  const double cfl_limit = 0.5 * u0.grid().spacing() / std::max(1.0, linf0);
  if (cfg.dt > cfl_limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "simulate: dt = " << cfg.dt << " violates the CFL bound 0.5 h / max(1, |u0|_inf) = "
        << cfl_limit;
    throw std::invalid_argument(msg.str());
  }
  {
    const double div_rel_scale =
        std::max(space_norm(u0, 2.0), 1e-300) * u0.grid().n * (2.0 * std::numbers::pi) /
        u0.grid().box_length;
    const double div_l2 = space_norm(divergence(u0), 2.0);
    if (div_l2 > 1e-8 * div_rel_scale) {
      std::ostringstream msg;
      msg << "simulate: initial condition is not divergence-free (|div u0|_2 = " << div_l2 << ")";
      throw std::invalid_argument(msg.str());
    }
  }

  const long long n_steps = std::llround(cfg.t_end / cfg.dt);

  Trajectory traj;
  traj.grid = u0.grid();
  traj.dt = cfg.snapshot_stride * cfg.dt;
  traj.times.push_back(0.0);
  traj.snapshots.push_back(u0);

  SpectralVector uhat = spectral::forward(u0);
  const Stepper stepper(u0.grid(), cfg.dt, cfg.viscosity);

  for (long long s = 0; s < n_steps; ++s) {
    const double t = static_cast<double>(s) * cfg.dt;
    SeriesPoint pt;
    SpectralVector next = stepper.advance(uhat, &pt);
    if (!std::isfinite(pt.kinetic) || !std::isfinite(pt.enstrophy)) {
      throw BlowUpError(static_cast<int>(s), t, std::move(traj));
    }
    traj.series_times.push_back(t);
    traj.series_kinetic_energy.push_back(pt.kinetic);
    traj.series_enstrophy.push_back(pt.enstrophy);
    uhat = std::move(next);
    if ((s + 1) % cfg.snapshot_stride == 0) {
      traj.times.push_back(static_cast<double>(s + 1) * cfg.dt);
      traj.snapshots.push_back(spectral::inverse(uhat, u0.grid()));
    }
  }

  // Closing series point at t_end.
  const VectorField u_end = spectral::inverse(uhat, u0.grid());
  const VectorField w_end = spectral::inverse(spectral_curl(uhat), u0.grid());
  const SeriesPoint last = measure_series(u_end, w_end);
  if (!std::isfinite(last.kinetic) || !std::isfinite(last.enstrophy)) {
    throw BlowUpError(static_cast<int>(n_steps), cfg.t_end, std::move(traj));
  }
  traj.series_times.push_back(static_cast<double>(n_steps) * cfg.dt);
  traj.series_kinetic_energy.push_back(last.kinetic);
  traj.series_enstrophy.push_back(last.enstrophy);

  traj.validate();
  return traj;
}

}  // namespace dgns
