#pragma once

#include <vector>

namespace dgns {

/// Osgood modulus psi(t) = t log(1 + t), defined for t >= 0.
double psi(double t);

/// Capital Psi(y; a) = integral_a^y dt / psi(t) for y, a > 0, evaluated by
/// adaptive quadrature after the substitution t = e^s. Diverges (slowly)
/// as y -> infinity, which is exactly the Osgood no-blow-up mechanism.
double capital_psi(double y, double a);

/// Discretized comparison problem: sampled forcing G and comparand F on a
/// time grid covering [tau1, times.back()], with the affine constant
/// a_affine measured so that F(t) <= a_affine (1 + int_tau1^t psi(F) G ds)
/// holds on [tau1, tau2]. tau1 and tau2 must coincide with sample times.
struct GronwallProblem {
  double a_affine = 1.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  std::vector<double> times;
  std::vector<double> g;
  std::vector<double> f;

  void validate() const;
};

/// Majorant H: on [tau1, tau2] the affine envelope
/// H(t) = A (1 + int_tau1^t psi(F) G ds); past tau2 the solution of
/// H' = A psi(H) G advanced by classical RK4 on the sample grid (with
/// `substeps` RK4 steps per grid cell). psi_max_violation is the largest
/// defect of Psi(H(t)) - Psi(H(tau2)) <= A int_tau2^t G ds over samples.
struct MajorantResult {
  std::vector<double> times;  // samples from tau1 on
  std::vector<double> h;
  double h_final = 0.0;
  double psi_max_violation = 0.0;
  bool finite = true;
};
MajorantResult integrate_majorant(const GronwallProblem& problem, int substeps = 1);

/// Largest value of F - H over samples with t >= tau2 (negative when the
/// majorant dominates, as it must).
double comparison_check(const GronwallProblem& problem, const MajorantResult& majorant);

}  // namespace dgns
