#pragma once

#include <array>
#include <complex>
#include <vector>

#include "dgns/grid.hpp"

namespace dgns {

/// Half-spectrum (r2c layout) coefficients of a real scalar field.
/// Entry (mx, my, mz) with mz in [0, n/2] lives at (mx * n + my) * (n/2 + 1) + mz.
/// Coefficients are normalized so that f(x) = sum_k c_k exp(i k . x).
class SpectralScalar {
 public:
  SpectralScalar() = default;
  SpectralScalar(int n, double box_length);

  int n() const { return n_; }
  double box_length() const { return box_length_; }
  int nz() const { return n_ / 2 + 1; }
  std::size_t size() const { return coef_.size(); }
  std::size_t index(int mx, int my, int mz) const {
    return (static_cast<std::size_t>(mx) * n_ + my) * nz() + mz;
  }
  std::complex<double>& operator[](std::size_t i) { return coef_[i]; }
  const std::complex<double>& operator[](std::size_t i) const { return coef_[i]; }
  std::complex<double>* data() { return coef_.data(); }
  const std::complex<double>* data() const { return coef_.data(); }

 private:
  int n_ = 0;
  double box_length_ = 0.0;
  std::vector<std::complex<double>> coef_;
};

struct SpectralVector {
  std::array<SpectralScalar, 3> comp;
  SpectralScalar& operator[](int i) { return comp[static_cast<std::size_t>(i)]; }
  const SpectralScalar& operator[](int i) const { return comp[static_cast<std::size_t>(i)]; }
};

namespace spectral {

/// Signed frequency 2*pi/L * m~ used by odd (derivative-like) multipliers;
/// the sign-ambiguous Nyquist plane m = n/2 maps to 0.
double deriv_freq(int n, double box_length, int m);

/// |m~| including the Nyquist plane at n/2; used for the viscous |k|^2.
double full_freq(int n, double box_length, int m);

SpectralScalar forward(const ScalarField& f);
ScalarField inverse(const SpectralScalar& c, const GridSpec& grid);
SpectralVector forward(const VectorField& u);
VectorField inverse(const SpectralVector& c, const GridSpec& grid);

/// Multiplies by i*k_axis (Nyquist annihilated).
void apply_derivative(SpectralScalar& c, int axis);

/// Zeroes every mode with any |m~| above fraction * n/2 (sharp 2/3-rule
/// style mask; fraction 1 keeps everything).
void apply_dealias(SpectralScalar& c, double fraction);
void apply_dealias(SpectralVector& c, double fraction);

/// In-place Leray projection I - k k^T / |k|^2 built from deriv_freq;
/// modes with no derivative content (zero mode, pure Nyquist) are left
/// unchanged.
void project_divergence_free(SpectralVector& c);

/// Multiplies by +k_i k_j / |k|^2 (deriv_freq); zero mode and pure-Nyquist
/// modes are annihilated. This is the sign convention with
/// sum_i riesz(f, i, i) = f - mean(f).
void apply_riesz(SpectralScalar& c, int i, int j);

}  // namespace spectral
}  // namespace dgns
