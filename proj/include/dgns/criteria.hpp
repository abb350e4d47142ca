#pragma once

#include <string>
#include <vector>

#include "dgns/grid.hpp"

namespace dgns {

enum class CriterionKind {
  log_prodi_serrin,   // int_t int_x |u|^5 / log(1 + |u|)
  prodi_serrin,       // |u|_{L^p_t L^q_x}, 2/p + 3/q = 1
  montgomery_smith,   // int_t |u(t)|_q^p / (1 + log+ |u(t)|_q)
  vorticity_l1,       // sup_t |curl u(t)|_{L^1}
  gradient_lpq,       // |grad u|_{L^p_t L^q_x}, 2/p + 3/q = 2
};

const char* criterion_name(CriterionKind kind);

struct CriterionReport {
  CriterionKind kind = CriterionKind::log_prodi_serrin;
  double p = 0.0;  // 0 when the criterion has no time exponent
  double q = 0.0;
  double value = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  double dt = 0.0;
  int n = 0;
  double box_length = 0.0;
  std::string note;
};

/// Pointwise density |u|^5 / log(1 + |u|), with the removable singularity
/// at |u| = 0 filled by 0.
ScalarField log_ps_density(const VelocityField& u);

/// Box integral of log_ps_density.
double log_ps_integral(const VelocityField& u);

CriterionReport log_prodi_serrin(const Trajectory& traj);
CriterionReport prodi_serrin(const Trajectory& traj, double p, double q);
CriterionReport montgomery_smith(const Trajectory& traj, double p, double q);
CriterionReport vorticity_criterion(const Trajectory& traj);
CriterionReport gradient_criterion(const Trajectory& traj, double p, double q);

/// Scaling map u_eps(x, t) = eps u(eps x, eps^2 t): values scale by eps,
/// times by eps^-2, the box by eps^-1. The kinetic energy and enstrophy
/// series transform by eps^-1 and eps respectively.
Trajectory rescale(const Trajectory& traj, double eps);

/// Measured affine constants A_lambda = sup_{t >= t0 + lambda}
/// F(t) / (1 + int_{t0}^t int |u|^6), with F = sup-norm of u, together
/// with the same quantity at lambda/4 (which can only be larger).
struct AffineReport {
  double lambda = 0.0;
  double a_measured = 0.0;
  double a_measured_quarter = 0.0;
};
AffineReport affine_linf_check(const Trajectory& traj, double lambda);

}  // namespace dgns
