#pragma once

#include <optional>
#include <vector>

#include "dgns/degiorgi.hpp"

namespace dgns {

/// Superlinear recurrence a_k = B^k * a_{k-1}^beta with B > 1, beta > 1.
/// Orbits either blow up or collapse super-exponentially, so everything is
/// tracked in natural logs; the raw values in OrbitResult are exp() of the
/// log orbit and flush to 0 / inf once they leave the representable range.
struct RecurrenceSpec {
  double b = 2.0;
  double beta = 19.0 / 18.0;
  double a1 = 1.0;
  int max_steps = 10000;

  void validate() const;
};

struct OrbitResult {
  std::vector<double> log_values;  // ln a_k for k = 1, 2, ...
  std::vector<double> values;      // exp(log_values), may under/overflow
  bool diverged = false;           // exceeded 1e300 within max_steps
  bool converged = false;          // finished below 1e-30 without ever diverging
};

/// Orbit classification thresholds (natural logs of 1e300 and 1e-30).
inline constexpr double kLogBlowUp = 690.77552789821368;   // ln(1e300)
inline constexpr double kLogCollapse = -69.077552789821368;  // ln(1e-30)

OrbitResult iterate(const RecurrenceSpec& spec);
OrbitResult iterate_log(double log_b, double beta, double log_a1, int max_steps);

/// Critical initial value below which the orbit collapses: analytically
/// log a_1* = -(2 beta - 1)/(beta - 1)^2 * ln B (the fixed critical point
/// of the affine log recursion), and empirically by bisecting the observed
/// converge/diverge boundary of iterate_log.
struct ThresholdEstimate {
  double log_analytic = 0.0;
  double log_empirical = 0.0;
  double analytic = 0.0;   // exp(log_analytic), 0 on underflow
  double empirical = 0.0;  // exp(log_empirical), 0 on underflow
};
ThresholdEstimate estimate_threshold(double b, double beta, int max_steps = 10000);

/// Smallness gate assembled from a measured energy ledger:
///   A_gate  = max(measured_A, 1)
///   B'      = 2^{7/3} max(measured_B, 1)
///   C*      = min( A_gate^{-1/6}, (B'^{-360} / A_gate)^{1/6} )
/// (the exponent -360 is -(2 beta - 1)/(beta - 1)^2 at beta = 19/18).
/// The gate claims a verdict only when the measured slab norm is below C*;
/// otherwise `passed` stays empty and no conclusion is drawn.
struct GateVerdict {
  double log_c_star = 0.0;  // natural log; C* typically underflows
  double c_star = 0.0;      // exp(log_c_star), 0 on underflow
  double a_gate = 1.0;
  double b_prime = 0.0;
  bool small_data = false;      // slab_l6 <= C*
  bool u_seq_vanishes = false;  // final U_k <= 1e-12
  bool terminal_ok = false;     // terminal excess <= final U_k + 1e-12
  bool max_u_le_one = false;    // max |u| on [-1/2, 1] <= 1 + 1e-12
  std::optional<bool> passed;   // empty when small_data fails: no claim
};
GateVerdict smallness_gate(const EnergyLedger& ledger);

}  // namespace dgns
