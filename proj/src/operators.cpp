#include "dgns/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dgns/spectral.hpp"

namespace dgns {
namespace {

constexpr double kTimeSlack = 1e-12;

void check_exponent(double p, const char* name) {
  if (std::isinf(p) && p > 0) return;
  if (!(p >= 1.0) || !std::isfinite(p)) {
    std::ostringstream msg;
    msg << name << " exponent must be >= 1 or infinity, got " << p;
    throw std::invalid_argument(msg.str());
  }
}

// Box sums accumulate in extended precision so rectangle-rule values stay
// reproducible and well below the 1e-12 tolerances the tests pin.
double box_sum_pow(const ScalarField& f, double p) {
  long double acc = 0.0L;
  for (const double v : f.values()) acc += std::pow(std::abs(v), p);
  return static_cast<double>(acc);
}

}  // namespace

VectorField make_field(
    const GridSpec& grid,
    const std::function<std::array<double, 3>(double, double, double)>& formula) {
  grid.validate();
  VectorField out(grid);
  const int n = grid.n;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < n; ++iz) {
        const auto xyz = grid.node(ix, iy, iz);
        const auto v = formula(xyz[0], xyz[1], xyz[2]);
        for (int c = 0; c < 3; ++c) {
          if (!std::isfinite(v[static_cast<std::size_t>(c)])) {
            std::ostringstream msg;
            msg << "make_field: formula returned non-finite component " << c << " at node (" << ix
                << ", " << iy << ", " << iz << ") = (" << xyz[0] << ", " << xyz[1] << ", "
                << xyz[2] << ")";
            throw FieldError(msg.str());
          }
          out.component(c)(ix, iy, iz) = v[static_cast<std::size_t>(c)];
        }
      }
    }
  }
  return out;
}

ScalarField make_scalar_field(const GridSpec& grid,
                              const std::function<double(double, double, double)>& formula) {
  grid.validate();
  ScalarField out(grid);
  const int n = grid.n;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < n; ++iz) {
        const auto xyz = grid.node(ix, iy, iz);
        const double v = formula(xyz[0], xyz[1], xyz[2]);
        if (!std::isfinite(v)) {
          std::ostringstream msg;
          msg << "make_scalar_field: formula returned non-finite value at node (" << ix << ", "
              << iy << ", " << iz << ") = (" << xyz[0] << ", " << xyz[1] << ", " << xyz[2] << ")";
          throw FieldError(msg.str());
        }
        out(ix, iy, iz) = v;
      }
    }
  }
  return out;
}

VectorField gradient(const ScalarField& f) {
  const GridSpec& grid = f.grid();
  const SpectralScalar base = spectral::forward(f);
  VectorField out(grid);
  for (int axis = 0; axis < 3; ++axis) {
    SpectralScalar d = base;
    spectral::apply_derivative(d, axis);
    spectral::apply_dealias(d, grid.dealias_fraction);
    out.component(axis) = spectral::inverse(d, grid);
  }
  return out;
}

TensorField gradient(const VectorField& u) {
  const GridSpec& grid = u.grid();
  TensorField out(grid);
  for (int i = 0; i < 3; ++i) {
    const SpectralScalar base = spectral::forward(u.component(i));
    for (int j = 0; j < 3; ++j) {
      SpectralScalar d = base;
      spectral::apply_derivative(d, j);
      spectral::apply_dealias(d, grid.dealias_fraction);
      out.comp(i, j) = spectral::inverse(d, grid);
    }
  }
  return out;
}

ScalarField divergence(const VectorField& u) {
  const GridSpec& grid = u.grid();
  SpectralScalar acc(grid.n, grid.box_length);
  for (int i = 0; i < 3; ++i) {
    SpectralScalar d = spectral::forward(u.component(i));
    spectral::apply_derivative(d, i);
    for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += d[m];
  }
  spectral::apply_dealias(acc, grid.dealias_fraction);
  return spectral::inverse(acc, grid);
}

VectorField curl(const VectorField& u) {
  const GridSpec& grid = u.grid();
  SpectralVector c = spectral::forward(u);
  const int n = grid.n, nz = c[0].nz();
  const double L = grid.box_length;
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
  spectral::apply_dealias(w, grid.dealias_fraction);
  return spectral::inverse(w, grid);
}

VelocityField leray_project(const VelocityField& u) {
  SpectralVector c = spectral::forward(u);
  spectral::project_divergence_free(c);
  return spectral::inverse(c, u.grid());
}

ScalarField magnitude(const VectorField& u) {
  ScalarField out(u.grid());
  const auto& a = u.component(0).values();
  const auto& b = u.component(1).values();
  const auto& c = u.component(2).values();
  auto dst = out.values();
  parallel_for(dst.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      dst[i] = std::sqrt(a[i] * a[i] + b[i] * b[i] + c[i] * c[i]);
    }
  });
  return out;
}

double box_integral(const ScalarField& f) {
  long double acc = 0.0L;
  for (const double v : f.values()) acc += v;
  return static_cast<double>(acc * static_cast<long double>(f.grid().cell_volume()));
}

double space_norm(const ScalarField& f, double p) {
  check_exponent(p, "space_norm");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const double v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  return std::pow(box_sum_pow(f, p) * f.grid().cell_volume(), 1.0 / p);
}

double space_norm(const VectorField& u, double p) { return space_norm(magnitude(u), p); }

namespace {

double slab_norm_impl(const std::vector<double>& times,
                      const std::function<const ScalarField&(std::size_t)>& field_at, double t_a,
                      double t_b, double p, double q) {
  check_exponent(p, "slab_norm time");
  check_exponent(q, "slab_norm space");
  if (!(t_b > t_a)) throw std::invalid_argument("slab_norm: window must have positive length");
  if (times.empty()) throw std::invalid_argument("slab_norm: empty trajectory");
  if (t_a < times.front() - kTimeSlack || t_b > times.back() + kTimeSlack) {
    throw std::invalid_argument("slab_norm: window not covered by trajectory");
  }

  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
      if (times[j] < t_a - kTimeSlack || times[j] > t_b + kTimeSlack) continue;
      m = std::max(m, space_norm(field_at(j), q));
    }
    return m;
  }

  // Time samples of either the joint integrand sum |f|^p h^3 (p == q) or
  // the spatial norm raised to p; both integrate by the trapezoid rule.
  std::vector<double> g(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    const ScalarField& f = field_at(j);
    if (p == q) {
      g[j] = box_sum_pow(f, p) * f.grid().cell_volume();
    } else {
      g[j] = std::pow(space_norm(f, q), p);
    }
  }
  return std::pow(pwl_integral(times, g, t_a, t_b), 1.0 / p);
}

}  // namespace

double slab_norm(const Trajectory& traj, double t_a, double t_b, double p, double q) {
  std::vector<ScalarField> mags;
  mags.reserve(traj.snapshots.size());
  for (const auto& snap : traj.snapshots) mags.push_back(magnitude(snap));
  return slab_norm_impl(
      traj.times, [&](std::size_t j) -> const ScalarField& { return mags[j]; }, t_a, t_b, p, q);
}

double slab_norm_scalar(const std::vector<ScalarField>& fields, const std::vector<double>& times,
                        double t_a, double t_b, double p, double q) {
  if (fields.size() != times.size()) {
    throw std::invalid_argument("slab_norm_scalar: times/fields size mismatch");
  }
  return slab_norm_impl(
      times, [&](std::size_t j) -> const ScalarField& { return fields[j]; }, t_a, t_b, p, q);
}

}  // namespace dgns
