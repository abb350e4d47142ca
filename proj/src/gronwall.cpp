#include "dgns/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dgns/util.hpp"

namespace dgns {
namespace {

constexpr double kTimeSlack = 1e-9;

/// log(1 + e^s) without overflow for large s.
double log1p_exp(double s) {
  if (s > 36.0) return s + std::log1p(std::exp(-s));
  return std::log1p(std::exp(s));
}

/// Adaptive Simpson on [a, b] for the substituted integrand 1/log(1+e^s).
double simpson_recurse(double a, double fa, double b, double fb, double m, double fm,
                       double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = 1.0 / log1p_exp(lm);
  const double frm = 1.0 / log1p_exp(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_recurse(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

std::size_t locate_sample(const std::vector<double>& times, double t, const char* what) {
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (std::abs(times[j] - t) <= kTimeSlack * std::max(1.0, std::abs(t))) return j;
  }
  throw std::invalid_argument(std::string(what) + " must coincide with a sample time");
}

}  // namespace

double psi(double t) {
  if (t < 0.0) throw std::invalid_argument("psi: argument must be non-negative");
  return t * std::log1p(t);
}

double capital_psi(double y, double a) {
  if (!(y > 0.0) || !(a > 0.0)) {
    throw std::invalid_argument("capital_psi: bounds must be positive");
  }
  if (y == a) return 0.0;
  if (y < a) return -capital_psi(a, y);
  const double sa = std::log(a);
  const double sb = std::log(y);
  const double fa = 1.0 / log1p_exp(sa);
  const double fb = 1.0 / log1p_exp(sb);
  const double sm = 0.5 * (sa + sb);
  const double fm = 1.0 / log1p_exp(sm);
  const double whole = (sb - sa) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_recurse(sa, fa, sb, fb, sm, fm, whole, 1e-12 * std::max(1.0, std::abs(whole)),
                         50);
}

void GronwallProblem::validate() const {
  if (times.size() < 3 || g.size() != times.size() || f.size() != times.size()) {
    throw std::invalid_argument("gronwall: need matching times/G/F with at least 3 samples");
  }
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!std::isfinite(times[j]) || !std::isfinite(g[j]) || !std::isfinite(f[j])) {
      throw std::invalid_argument("gronwall: samples must be finite");
    }
    if (g[j] < 0.0 || f[j] < 0.0) {
      throw std::invalid_argument("gronwall: G and F must be non-negative");
    }
    if (j > 0 && times[j] <= times[j - 1]) {
      throw std::invalid_argument("gronwall: times must be strictly increasing");
    }
  }
  if (!(a_affine > 0.0) || !std::isfinite(a_affine)) {
    throw std::invalid_argument("gronwall: affine constant must be positive and finite");
  }
  if (!(tau1 < tau2)) throw std::invalid_argument("gronwall: need tau1 < tau2");
  locate_sample(times, tau1, "gronwall: tau1");
  const std::size_t j2 = locate_sample(times, tau2, "gronwall: tau2");
  if (j2 + 1 >= times.size()) {
    throw std::invalid_argument("gronwall: tau2 must leave room for the comparison window");
  }
}

MajorantResult integrate_majorant(const GronwallProblem& problem, int substeps) {
  problem.validate();
  if (substeps < 1) throw std::invalid_argument("integrate_majorant: substeps must be >= 1");
  const std::size_t j1 = locate_sample(problem.times, problem.tau1, "gronwall: tau1");
  const std::size_t j2 = locate_sample(problem.times, problem.tau2, "gronwall: tau2");
  const double a = problem.a_affine;

  MajorantResult result;
  result.times.assign(problem.times.begin() + j1, problem.times.end());
  result.h.assign(result.times.size(), 0.0);

  // Affine phase: H = A (1 + int psi(F) G) accumulated by trapezoid.
  double accum = 0.0;
  result.h[0] = a;
  for (std::size_t j = j1 + 1; j <= j2; ++j) {
    const double left = psi(problem.f[j - 1]) * problem.g[j - 1];
    const double right = psi(problem.f[j]) * problem.g[j];
    accum += 0.5 * (left + right) * (problem.times[j] - problem.times[j - 1]);
    result.h[j - j1] = a * (1.0 + accum);
  }

  // ODE phase: H' = A psi(H) G with G interpolated linearly between samples.
  double h = result.h[j2 - j1];
  for (std::size_t j = j2; j + 1 < problem.times.size(); ++j) {
    const double step = (problem.times[j + 1] - problem.times[j]) / substeps;
    for (int s = 0; s < substeps && std::isfinite(h); ++s) {
      const double t0 = problem.times[j] + s * step;
      const auto rhs = [&](double t, double y) {
        return a * psi(std::max(y, 0.0)) * pwl_value(problem.times, problem.g, t);
      };
      const double k1 = rhs(t0, h);
      const double k2 = rhs(t0 + 0.5 * step, h + 0.5 * step * k1);
      const double k3 = rhs(t0 + 0.5 * step, h + 0.5 * step * k2);
      const double k4 = rhs(t0 + step, h + step * k3);
      h += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    result.h[j + 1 - j1] = h;
    if (!std::isfinite(h)) {
      result.finite = false;
      break;
    }
  }
  result.h_final = result.h.back();
  result.finite = result.finite && std::isfinite(result.h_final);

  // Osgood consistency: Psi(H(t)) - Psi(H(tau2)) <= A int_tau2^t G.
  if (result.finite) {
    const double h_at_tau2 = result.h[j2 - j1];
    double g_accum = 0.0;
    for (std::size_t j = j2; j + 1 < problem.times.size(); ++j) {
      g_accum += 0.5 * (problem.g[j] + problem.g[j + 1]) *
                 (problem.times[j + 1] - problem.times[j]);
      const double lhs = capital_psi(result.h[j + 1 - j1], h_at_tau2);
      result.psi_max_violation = std::max(result.psi_max_violation, lhs - a * g_accum);
    }
    result.psi_max_violation = std::max(result.psi_max_violation, 0.0);
  }
  return result;
}

double comparison_check(const GronwallProblem& problem, const MajorantResult& majorant) {
  const std::size_t j1 = locate_sample(problem.times, problem.tau1, "gronwall: tau1");
  const std::size_t j2 = locate_sample(problem.times, problem.tau2, "gronwall: tau2");
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = j2; j < problem.times.size(); ++j) {
    worst = std::max(worst, problem.f[j] - majorant.h[j - j1]);
  }
  return worst;
}

}  // namespace dgns
