#pragma once

#include <vector>

#include "dgns/grid.hpp"

namespace dgns {

/// Pressure of an incompressible velocity field: the mean-free solution of
/// -Laplace P = sum_ij d_i d_j (u_i u_j), computed by the spectral
/// multiplier P_hat = -sum_ij (k_i k_j / |k|^2) (u tensor u)_ij.
ScalarField solve_pressure(const VelocityField& u);

/// Spectral gradient of solve_pressure(u) without the intermediate
/// real-space pressure field (same dealias mask as gradient()).
VectorField solve_pressure_gradient(const VelocityField& u);

/// Composition of Riesz transforms with multiplier +k_i k_j / |k|^2 and the
/// zero mode annihilated, so that sum_i riesz_apply(f, i, i) = f - mean(f).
ScalarField riesz_apply(const ScalarField& f, int i, int j);

/// Level-k decomposition of the pressure along the De Giorgi truncation:
/// with a = v_k/|u|, p_k1 is driven by the tensor (1-a)(1+a) u_i u_j and
/// p_k2 by a^2 u_i u_j; the sources sum to u_i u_j nodewise, so
/// p_k1 + p_k2 reproduces solve_pressure(u) up to round-off.
struct PressureSplit {
  int level = 0;
  ScalarField p_k1;
  ScalarField p_k2;
  VectorField grad_p_k2;
};
PressureSplit split_pressure(const VelocityField& u, int k);

/// Empirical Calderon-Zygmund constant: max over the sample of
/// |P|_{p_out} / |u|^2_{p_in}, skipping zero fields.
double measure_cz_constant(const std::vector<VelocityField>& sample, double p_in, double p_out);

/// Empirical constants for the split terms at level k: p_k1 against its
/// pointwise majorant 3|u| in L^6, and grad p_k2 against 6 v_k d_k in
/// L^{3/2}. Zero-majorant fields are skipped.
struct CzSplitRatios {
  double p1_l6_ratio = 0.0;
  double grad_p2_l32_ratio = 0.0;
};
CzSplitRatios measure_cz_split(const std::vector<VelocityField>& sample, int k);

}  // namespace dgns
