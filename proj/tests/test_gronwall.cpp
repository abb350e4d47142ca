#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "dgns/gronwall.hpp"

namespace {

/// Composite-Simpson oracle for capital_psi, integrating 1/(t log(1 + t))
/// directly in t over geometrically split segments. Independent of the
/// log-substituted adaptive quadrature in the implementation.
double capital_psi_oracle(double y, double a) {
  auto f = [](double t) { return 1.0 / (t * std::log1p(t)); };
  double total = 0.0;
  double lo = a;
  while (lo < y) {
    const double hi = std::min(y, 10.0 * lo);
    const int m = 20000;  // Simpson intervals per decade
    const double h = (hi - lo) / m;
    double sum = f(lo) + f(hi);
    for (int i = 1; i < m; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + h * i);
    total += sum * h / 3.0;
    lo = hi;
  }
  return total;
}

/// Problem with constant forcing and comparand on a uniform grid.
dgns::GronwallProblem constant_problem() {
  dgns::GronwallProblem problem;
  for (int j = 0; j <= 6; ++j) problem.times.push_back(0.5 * j);
  problem.g.assign(problem.times.size(), 0.25);
  problem.f.assign(problem.times.size(), 2.0);
  problem.a_affine = 1.5;
  problem.tau1 = problem.times[0];
  problem.tau2 = problem.times[2];
  return problem;
}

}  // namespace

TEST_CASE("psi hand values") {
  CHECK(dgns::psi(0.0) == 0.0);
  CHECK(dgns::psi(1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const double e1 = std::exp(1.0) - 1.0;
  CHECK(dgns::psi(e1) == doctest::Approx(e1).epsilon(1e-14));
  CHECK_THROWS_AS(dgns::psi(-1.0), std::invalid_argument);
}

TEST_CASE("capital_psi is zero on the diagonal and antisymmetric") {
  CHECK(dgns::capital_psi(3.0, 3.0) == 0.0);
  const double forward = dgns::capital_psi(5.0, 2.0);
  CHECK(forward > 0.0);
  CHECK(dgns::capital_psi(2.0, 5.0) == doctest::Approx(-forward).epsilon(1e-12));
}

TEST_CASE("capital_psi matches a direct Simpson oracle across six decades") {
  for (const double y : {2.0, 10.0, 1e3, 1e6}) {
    const double got = dgns::capital_psi(y, 1.0);
    const double want = capital_psi_oracle(y, 1.0);
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
  }
  CHECK(dgns::capital_psi(10.0, 0.125) ==
        doctest::Approx(capital_psi_oracle(10.0, 0.125)).epsilon(1e-8));
}

TEST_CASE("capital_psi keeps growing without bound, but slowly") {
  double prev = dgns::capital_psi(1e3, 1.0);
  for (const double y : {1e6, 1e9, 1e12}) {
    const double next = dgns::capital_psi(y, 1.0);
    CHECK(next > prev);
    prev = next;
  }
  // Doubly logarithmic growth: three more decades add roughly log(21/14).
  CHECK(dgns::capital_psi(1e12, 1.0) - dgns::capital_psi(1e6, 1.0) > 0.3);
  CHECK_THROWS_AS(dgns::capital_psi(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("zero forcing freezes the majorant at the affine constant") {
  dgns::GronwallProblem problem = constant_problem();
  problem.g.assign(problem.times.size(), 0.0);
  const dgns::MajorantResult result = dgns::integrate_majorant(problem);
  REQUIRE(!result.h.empty());
  for (const double h : result.h) CHECK(h == problem.a_affine);
  CHECK(result.h_final == problem.a_affine);
  CHECK(result.finite);
}

TEST_CASE("constant forcing reproduces the exact affine envelope at tau2") {
  const dgns::GronwallProblem problem = constant_problem();
  const dgns::MajorantResult result = dgns::integrate_majorant(problem);
  // H(tau2) = A (1 + psi(F) g (tau2 - tau1)); the trapezoid rule is exact
  // for the constant integrand.
  const double expected =
      problem.a_affine * (1.0 + dgns::psi(2.0) * 0.25 * (problem.tau2 - problem.tau1));
  REQUIRE(result.times.size() >= 3);
  CHECK(result.times.front() == problem.tau1);
  CHECK(result.h[2] == doctest::Approx(expected).epsilon(1e-14));
  // The majorant never decreases: the ODE phase has non-negative slope.
  for (std::size_t j = 1; j < result.h.size(); ++j) CHECK(result.h[j] >= result.h[j - 1]);
  CHECK(comparison_check(problem, result) < 0.0);  // F = 2 stays below H
}

TEST_CASE("halving the RK4 substep barely moves the majorant") {
  dgns::GronwallProblem problem;
  for (int j = 0; j <= 100; ++j) problem.times.push_back(0.05 * j);
  problem.g.resize(problem.times.size());
  problem.f.resize(problem.times.size());
  for (std::size_t j = 0; j < problem.times.size(); ++j) {
    const double t = problem.times[j];
    problem.g[j] = 0.1 * (1.0 + std::sin(t));
    problem.f[j] = 0.5 + 0.1 * std::sin(2.0 * t);
  }
  problem.a_affine = 1.0;
  problem.tau1 = problem.times[0];
  problem.tau2 = problem.times[20];
  const dgns::MajorantResult coarse = dgns::integrate_majorant(problem, 1);
  const dgns::MajorantResult fine = dgns::integrate_majorant(problem, 2);
  REQUIRE(coarse.h.size() == fine.h.size());
  for (std::size_t j = 0; j < coarse.h.size(); ++j) {
    CHECK(std::abs(coarse.h[j] - fine.h[j]) <= 1e-6 * fine.h[j]);
  }
}

TEST_CASE("the integrated majorant satisfies the Osgood identity at samples") {
  // With a piecewise-linear G the trapezoid side is exact, so the defect of
  // Psi(H(t)) - Psi(H(tau2)) <= A int G reduces to RK4 and quadrature
  // round-off.
  dgns::GronwallProblem problem;
  for (int j = 0; j <= 400; ++j) problem.times.push_back(0.01 * j);
  problem.g.resize(problem.times.size());
  problem.f.assign(problem.times.size(), 0.4);
  for (std::size_t j = 0; j < problem.times.size(); ++j) {
    problem.g[j] = 0.3 - 0.05 * problem.times[j];
  }
  problem.a_affine = 1.0;
  problem.tau1 = problem.times[0];
  problem.tau2 = problem.times[100];
  const dgns::MajorantResult result = dgns::integrate_majorant(problem);
  CHECK(result.finite);
  CHECK(result.psi_max_violation <= 1e-8);
  CHECK(dgns::comparison_check(problem, result) < 0.0);
}

TEST_CASE("gronwall problem validation rejects malformed inputs") {
  dgns::GronwallProblem good = constant_problem();
  CHECK_NOTHROW(good.validate());

  dgns::GronwallProblem p = good;
  p.times.resize(2);
  p.g.resize(2);
  p.f.resize(2);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  p = good;
  p.times[3] = p.times[2];  // not strictly increasing
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  p = good;
  p.g[1] = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  p = good;
  p.f[4] = std::nan("");
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  p = good;
  p.a_affine = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  p = good;
  p.tau1 = 0.2;  // between samples
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  p = good;
  p.tau2 = p.tau1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  p = good;
  p.tau2 = p.times.back();  // no room left for the comparison window
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  CHECK_THROWS_AS(dgns::integrate_majorant(good, 0), std::invalid_argument);
}
