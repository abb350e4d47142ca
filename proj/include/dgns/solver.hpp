#pragma once

#include "dgns/grid.hpp"

namespace dgns {

struct SolverConfig {
  double dt = 0.0;
  double t_end = 0.0;
  double viscosity = 1.0;
  int snapshot_stride = 1;

  /// Throws std::invalid_argument for non-positive dt/viscosity, negative
  /// t_end, a t_end that is not an integer number of steps, or a step count
  /// not divisible by snapshot_stride (snapshots must land on t_end).
  void validate() const;
};

/// Raised when the spectral state stops being finite; carries the snapshots
/// recorded up to the last finite step.
class BlowUpError : public FieldError {
 public:
  BlowUpError(int step, double time, Trajectory partial);
  int step() const { return step_; }
  double time() const { return time_; }
  const Trajectory& partial() const { return partial_; }

 private:
  int step_;
  double time_;
  Trajectory partial_;
};

/// One IF-RK4 step of incompressible Navier-Stokes in rotational form: the
/// viscous semigroup is applied exactly per mode, the nonlinear term is
/// dealiased by the grid mask and Leray-projected, and the mean mode is
/// held fixed.
VelocityField step(const VelocityField& u, double dt, double viscosity = 1.0);

/// Integrates u0 over [0, t_end], storing every snapshot_stride-th state
/// (including t = 0, stored verbatim, and t = t_end) and recording kinetic
/// energy and enstrophy at every step. Requires u0 divergence-free and the
/// CFL bound dt <= 0.5 h / max(1, |u0|_inf).
Trajectory simulate(const VelocityField& u0, const SolverConfig& cfg);

}  // namespace dgns
