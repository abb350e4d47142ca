#pragma once

#include <functional>

#include "dgns/grid.hpp"

namespace dgns {

/// Samples a velocity formula at the grid nodes. The caller is responsible
/// for supplying a box-periodic formula; non-finite samples raise FieldError
/// naming the node.
VectorField make_field(const GridSpec& grid,
                       const std::function<std::array<double, 3>(double, double, double)>& formula);

ScalarField make_scalar_field(const GridSpec& grid,
                              const std::function<double(double, double, double)>& formula);

/// Spectral gradient with the grid's dealias mask applied.
VectorField gradient(const ScalarField& f);

/// Component-wise spectral gradient; comp(i, j) = d u_i / d x_j.
TensorField gradient(const VectorField& u);

ScalarField divergence(const VectorField& u);
VectorField curl(const VectorField& u);

/// Spectral Leray projection onto divergence-free fields; the zero mode is
/// left unchanged.
VelocityField leray_project(const VelocityField& u);

/// Pointwise Euclidean magnitude |u|.
ScalarField magnitude(const VectorField& u);

/// Rectangle-rule integral over the box, sum(f) * h^3.
double box_integral(const ScalarField& f);

/// L^p norm over the box by the rectangle rule; p may be infinity.
double space_norm(const ScalarField& f, double p);

/// L^p norm of |u|.
double space_norm(const VectorField& u, double p);

/// L^p-in-time of L^q-in-space norm of |u| over [t_a, t_b] (trapezoid in
/// time, rectangle rule in space). p == q uses the joint space-time
/// quadrature; either exponent may be infinity.
double slab_norm(const Trajectory& traj, double t_a, double t_b, double p, double q);

/// Same norm for a scalar-field time series.
double slab_norm_scalar(const std::vector<ScalarField>& fields, const std::vector<double>& times,
                        double t_a, double t_b, double p, double q);

}  // namespace dgns
