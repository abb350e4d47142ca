#include "dgns/iteration.hpp"

#include <cmath>
#include <stdexcept>

namespace dgns {
namespace {

/// Once the log orbit falls below this, each further step is strictly more
/// negative (k ln B is bounded by max_steps * ln B << (beta - 1) * 1e15),
/// so the orbit can be declared collapsed without iterating further.
constexpr double kLogFloor = -1e15;

}  // namespace

void RecurrenceSpec::validate() const {
  if (!(b > 1.0) || !std::isfinite(b)) {
    throw std::invalid_argument("recurrence: B must be finite and > 1");
  }
  if (!(beta > 1.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("recurrence: beta must be finite and > 1");
  }
  if (!(a1 > 0.0) || !std::isfinite(a1)) {
    throw std::invalid_argument("recurrence: a1 must be finite and positive");
  }
  if (max_steps < 1) {
    throw std::invalid_argument("recurrence: max_steps must be at least 1");
  }
}

OrbitResult iterate_log(double log_b, double beta, double log_a1, int max_steps) {
  if (!(log_b > 0.0) || !(beta > 1.0) || max_steps < 1 || !std::isfinite(log_a1)) {
    throw std::invalid_argument("iterate_log: need ln B > 0, beta > 1, finite log a1");
  }
  OrbitResult orbit;
  orbit.log_values.reserve(static_cast<std::size_t>(max_steps));
  double x = log_a1;
  orbit.log_values.push_back(x);
  for (int k = 2; k <= max_steps; ++k) {
    x = static_cast<double>(k) * log_b + beta * x;
    orbit.log_values.push_back(x);
    if (x > kLogBlowUp) {
      orbit.diverged = true;
      break;
    }
    if (x < kLogFloor) break;
  }
  // A dip below the collapse threshold is not enough: the orbit must also
  // never have crossed the blow-up threshold within the step budget.
  orbit.converged = !orbit.diverged && orbit.log_values.back() < kLogCollapse;
  orbit.values.reserve(orbit.log_values.size());
  for (double lx : orbit.log_values) orbit.values.push_back(std::exp(lx));
  return orbit;
}

OrbitResult iterate(const RecurrenceSpec& spec) {
  spec.validate();
  return iterate_log(std::log(spec.b), spec.beta, std::log(spec.a1), spec.max_steps);
}

ThresholdEstimate estimate_threshold(double b, double beta, int max_steps) {
  if (!(b > 1.0) || !(beta > 1.0)) {
    throw std::invalid_argument("estimate_threshold: need B > 1 and beta > 1");
  }
  const double log_b = std::log(b);
  ThresholdEstimate est;
  est.log_analytic = -(2.0 * beta - 1.0) / ((beta - 1.0) * (beta - 1.0)) * log_b;

  // Bracket the converge/diverge boundary around the analytic value. The
  // classifier is monotone in the initial value, so bisection is sound.
  double lo = est.log_analytic - 5.0;
  double hi = est.log_analytic + 5.0;
  for (int widen = 0; widen < 64 && !iterate_log(log_b, beta, lo, max_steps).converged; ++widen) {
    lo -= 16.0;
  }
  for (int widen = 0; widen < 64 && !iterate_log(log_b, beta, hi, max_steps).diverged; ++widen) {
    hi += 16.0;
  }
  if (!iterate_log(log_b, beta, lo, max_steps).converged ||
      !iterate_log(log_b, beta, hi, max_steps).diverged) {
    throw std::runtime_error("estimate_threshold: failed to bracket the orbit boundary");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (iterate_log(log_b, beta, mid, max_steps).diverged) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  est.log_empirical = 0.5 * (lo + hi);
  est.analytic = std::exp(est.log_analytic);
  est.empirical = std::exp(est.log_empirical);
  return est;
}

GateVerdict smallness_gate(const EnergyLedger& ledger) {
  if (ledger.u_seq.empty()) {
    throw std::invalid_argument("smallness_gate: ledger has no levels");
  }
  GateVerdict verdict;
  verdict.a_gate = std::max(ledger.measured_a.value_or(0.0), 1.0);
  verdict.b_prime = std::pow(2.0, 7.0 / 3.0) * std::max(ledger.measured_b.value_or(0.0), 1.0);

  const double beta = ledger.beta;
  const double collapse_exp = (2.0 * beta - 1.0) / ((beta - 1.0) * (beta - 1.0));
  const double log_c0 = -collapse_exp * std::log(verdict.b_prime);
  const double log_a = std::log(verdict.a_gate);
  verdict.log_c_star = std::min(-log_a / 6.0, (log_c0 - log_a) / 6.0);
  verdict.c_star = std::exp(verdict.log_c_star);

  // Compare in logs: C* sits far below the smallest positive double.
  verdict.small_data =
      ledger.slab_l6 <= 0.0 || std::log(ledger.slab_l6) <= verdict.log_c_star;
  const double u_final = ledger.u_seq.back();
  verdict.u_seq_vanishes = std::isfinite(u_final) && u_final <= 1e-12;
  verdict.terminal_ok = ledger.terminal_excess <= u_final + 1e-12;
  verdict.max_u_le_one = ledger.max_abs_u_late <= 1.0 + 1e-12;
  if (verdict.small_data) {
    verdict.passed = verdict.u_seq_vanishes && verdict.terminal_ok && verdict.max_u_le_one;
  }
  return verdict;
}

}  // namespace dgns
