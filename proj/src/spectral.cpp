#include "dgns/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace dgns {

SpectralScalar::SpectralScalar(int n, double box_length)
    : n_(n),
      box_length_(box_length),
      coef_(static_cast<std::size_t>(n) * n * (n / 2 + 1), std::complex<double>(0.0, 0.0)) {}

namespace spectral {
namespace {

// One cached plan pair per grid size. Plans are created with FFTW_ESTIMATE so
// the algorithm choice (and therefore round-off) is reproducible run to run.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

std::mutex plan_mutex;

PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const std::size_t n_real = static_cast<std::size_t>(n) * n * n;
  const std::size_t n_cplx = static_cast<std::size_t>(n) * n * (n / 2 + 1);
  double* rbuf = fftw_alloc_real(n_real);
  fftw_complex* cbuf = fftw_alloc_complex(n_cplx);
  PlanPair pair;
  pair.fwd = fftw_plan_dft_r2c_3d(n, n, n, rbuf, cbuf, FFTW_ESTIMATE);
  pair.inv = fftw_plan_dft_c2r_3d(n, n, n, cbuf, rbuf, FFTW_ESTIMATE);
  fftw_free(rbuf);
  fftw_free(cbuf);
  if (pair.fwd == nullptr || pair.inv == nullptr) {
    throw std::runtime_error("spectral: FFTW planning failed");
  }
  return cache.emplace(n, pair).first->second;
}

int signed_index(int n, int m) { return (m <= n / 2) ? m : m - n; }

}  // namespace

double deriv_freq(int n, double box_length, int m) {
  if (2 * m == n) return 0.0;  // sign-ambiguous Nyquist plane carries no derivative
  return 2.0 * std::numbers::pi / box_length * signed_index(n, m);
}

double full_freq(int n, double box_length, int m) {
  return 2.0 * std::numbers::pi / box_length * std::abs(signed_index(n, m));
}

SpectralScalar forward(const ScalarField& f) {
  const int n = f.grid().n;
  SpectralScalar out(n, f.grid().box_length);
  PlanPair& pp = plans_for(n);

  const std::size_t n_real = f.size();
  double* rbuf = fftw_alloc_real(n_real);
  fftw_complex* cbuf = fftw_alloc_complex(out.size());
  std::memcpy(rbuf, f.values().data(), n_real * sizeof(double));
  fftw_execute_dft_r2c(pp.fwd, rbuf, cbuf);
  const double scale = 1.0 / static_cast<double>(n_real);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::complex<double>(cbuf[i][0] * scale, cbuf[i][1] * scale);
  }
  fftw_free(rbuf);
  fftw_free(cbuf);
  return out;
}

ScalarField inverse(const SpectralScalar& c, const GridSpec& grid) {
  if (c.n() != grid.n) throw std::invalid_argument("spectral::inverse: grid size mismatch");
  PlanPair& pp = plans_for(c.n());

  ScalarField out(grid);
  // c2r destroys its input for multi-dimensional transforms, so run on a copy.
  fftw_complex* cbuf = fftw_alloc_complex(c.size());
  double* rbuf = fftw_alloc_real(out.size());
  std::memcpy(cbuf, c.data(), c.size() * sizeof(fftw_complex));
  fftw_execute_dft_c2r(pp.inv, cbuf, rbuf);
  std::memcpy(out.values().data(), rbuf, out.size() * sizeof(double));
  fftw_free(cbuf);
  fftw_free(rbuf);
  return out;
}

SpectralVector forward(const VectorField& u) {
  SpectralVector out;
  for (int i = 0; i < 3; ++i) out[i] = forward(u.component(i));
  return out;
}

VectorField inverse(const SpectralVector& c, const GridSpec& grid) {
  VectorField out(grid);
  for (int i = 0; i < 3; ++i) out.component(i) = inverse(c[i], grid);
  return out;
}

void apply_derivative(SpectralScalar& c, int axis) {
  const int n = c.n(), nz = c.nz();
  const double L = c.box_length();
  for (int mx = 0; mx < n; ++mx) {
    for (int my = 0; my < n; ++my) {
      for (int mz = 0; mz < nz; ++mz) {
        const double k = (axis == 0)   ? deriv_freq(n, L, mx)
                         : (axis == 1) ? deriv_freq(n, L, my)
                                       : deriv_freq(n, L, mz);
        auto& v = c[c.index(mx, my, mz)];
        v = std::complex<double>(-k * v.imag(), k * v.real());  // *= i k
      }
    }
  }
}

void apply_dealias(SpectralScalar& c, double fraction) {
  const int n = c.n(), nz = c.nz();
  const double cutoff = fraction * (n / 2) + 1e-9;
  for (int mx = 0; mx < n; ++mx) {
    const int ax = std::abs(signed_index(n, mx));
    for (int my = 0; my < n; ++my) {
      const int ay = std::abs(signed_index(n, my));
      for (int mz = 0; mz < nz; ++mz) {
        if (ax > cutoff || ay > cutoff || mz > cutoff) {
          c[c.index(mx, my, mz)] = {0.0, 0.0};
        }
      }
    }
  }
}

void apply_dealias(SpectralVector& c, double fraction) {
  for (int i = 0; i < 3; ++i) apply_dealias(c[i], fraction);
}

void project_divergence_free(SpectralVector& c) {
  const int n = c[0].n(), nz = c[0].nz();
  const double L = c[0].box_length();
  for (int mx = 0; mx < n; ++mx) {
    const double kx = deriv_freq(n, L, mx);
    for (int my = 0; my < n; ++my) {
      const double ky = deriv_freq(n, L, my);
      for (int mz = 0; mz < nz; ++mz) {
        const double kz = deriv_freq(n, L, mz);
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) continue;
        const std::size_t idx = c[0].index(mx, my, mz);
        const std::complex<double> div = kx * c[0][idx] + ky * c[1][idx] + kz * c[2][idx];
        const std::complex<double> s = div / k2;
        c[0][idx] -= kx * s;
        c[1][idx] -= ky * s;
        c[2][idx] -= kz * s;
      }
    }
  }
}

void apply_riesz(SpectralScalar& c, int i, int j) {
  if (i < 0 || i > 2 || j < 0 || j > 2) {
    throw std::invalid_argument("apply_riesz: component indices must be 0..2");
  }
  const int n = c.n(), nz = c.nz();
  const double L = c.box_length();
  for (int mx = 0; mx < n; ++mx) {
    for (int my = 0; my < n; ++my) {
      for (int mz = 0; mz < nz; ++mz) {
        const double k[3] = {deriv_freq(n, L, mx), deriv_freq(n, L, my), deriv_freq(n, L, mz)};
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        auto& v = c[c.index(mx, my, mz)];
        v = (k2 == 0.0) ? std::complex<double>(0.0, 0.0) : v * (k[i] * k[j] / k2);
      }
    }
  }
}

}  // namespace spectral
}  // namespace dgns
