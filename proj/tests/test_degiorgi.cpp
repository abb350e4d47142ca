#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "dgns/degiorgi.hpp"
#include "dgns/initial_conditions.hpp"
#include "dgns/operators.hpp"
#include "dgns/solver.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

dgns::GridSpec small_grid(int n = 16, double box = 2.0 * kPi) {
  dgns::GridSpec grid;
  grid.n = n;
  grid.box_length = box;
  return grid;
}

/// Constant velocity field (value, 0, 0).
dgns::VelocityField const_field(const dgns::GridSpec& grid, double value) {
  dgns::VelocityField u(grid);
  for (double& v : u.component(0).values()) v = value;
  return u;
}

/// Synthetic trajectory on [-1, 1] from a per-time field factory.
template <typename Make>
dgns::Trajectory synthetic_traj(const dgns::GridSpec& grid, int count, Make make) {
  dgns::Trajectory traj;
  traj.grid = grid;
  traj.dt = 2.0 / (count - 1);
  for (int j = 0; j < count; ++j) {
    const double t = -1.0 + traj.dt * j;
    traj.times.push_back(t);
    traj.snapshots.push_back(make(t));
  }
  return traj;
}

/// Independent slab-energy oracle: recomputes v_k, the algebraic gradient
/// of |u| and the dissipation density nodewise from u and gradient(u), box
/// sums in plain doubles, takes the snapshot sup and a hand-rolled
/// piecewise-linear time integral over [T_k, 1].
double slab_energy_oracle(const dgns::Trajectory& traj, int k) {
  const double c = dgns::level_threshold(k);
  const double t_start = -0.5 * (1.0 + std::ldexp(1.0, -k));
  const double vol = traj.grid.cell_volume();

  std::vector<double> v2(traj.times.size(), 0.0);
  std::vector<double> d2(traj.times.size(), 0.0);
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    const dgns::VelocityField& u = traj.snapshots[j];
    const dgns::TensorField g = dgns::gradient(u);
    double sum_v2 = 0.0, sum_d2 = 0.0;
    for (std::size_t idx = 0; idx < u.component(0).size(); ++idx) {
      const double s = std::sqrt(u.component(0)[idx] * u.component(0)[idx] +
                                 u.component(1)[idx] * u.component(1)[idx] +
                                 u.component(2)[idx] * u.component(2)[idx]);
      const double v = s > c ? s - c : 0.0;
      sum_v2 += v * v;
      if (s <= 1e-30) continue;
      double fro2 = 0.0, grad_abs2 = 0.0;
      for (int col = 0; col < 3; ++col) {
        double dcol = 0.0;
        for (int row = 0; row < 3; ++row) {
          const double gij = g.comp(row, col)[idx];
          fro2 += gij * gij;
          dcol += u.component(row)[idx] * gij;
        }
        dcol /= s;
        grad_abs2 += dcol * dcol;
      }
      sum_d2 += (s >= c ? (c / s) * grad_abs2 : 0.0) + (v / s) * fro2;
    }
    v2[j] = sum_v2 * vol;
    d2[j] = sum_d2 * vol;
  }

  double sup_v2 = 0.0;
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    if (traj.times[j] >= t_start - 1e-9) sup_v2 = std::max(sup_v2, v2[j]);
  }

  // Piecewise-linear integral of d2 over [t_start, 1].
  auto pwl_at = [&](double t) {
    std::size_t j = 1;
    while (j + 1 < traj.times.size() && traj.times[j] < t) ++j;
    const double t0 = traj.times[j - 1], t1 = traj.times[j];
    const double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * d2[j - 1] + w * d2[j];
  };
  double integral = 0.0;
  double prev_t = t_start, prev_v = pwl_at(t_start);
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    if (traj.times[j] <= t_start) continue;
    integral += 0.5 * (prev_v + d2[j]) * (traj.times[j] - prev_t);
    prev_t = traj.times[j];
    prev_v = d2[j];
  }
  return 0.5 * sup_v2 + integral;
}

}  // namespace

TEST_CASE("level thresholds and slabs are the textbook dyadic sequences") {
  CHECK(dgns::level_threshold(0) == 0.0);
  CHECK(dgns::level_threshold(1) == 0.5);
  CHECK(dgns::level_threshold(2) == 0.75);
  CHECK(dgns::level_threshold(10) == doctest::Approx(1.0 - std::ldexp(1.0, -10)));
  CHECK_THROWS_AS(dgns::level_threshold(-1), std::invalid_argument);
  CHECK_THROWS_AS(dgns::level_threshold(61), std::invalid_argument);

  CHECK(dgns::SlabSpec::for_level(0).t_start == -1.0);
  CHECK(dgns::SlabSpec::for_level(1).t_start == -0.75);
  CHECK(dgns::SlabSpec::for_level(2).t_start == -0.625);
  CHECK(dgns::SlabSpec::for_level(2).t_end == 1.0);
}

TEST_CASE("truncate clips the magnitude at the level threshold") {
  const dgns::GridSpec grid = small_grid(8);
  const dgns::ScalarField v1 = dgns::truncate(const_field(grid, 0.9), 1);
  for (std::size_t i = 0; i < v1.size(); ++i) CHECK(v1[i] == doctest::Approx(0.4).epsilon(1e-15));
  const dgns::ScalarField v2 = dgns::truncate(const_field(grid, 0.3), 2);
  for (std::size_t i = 0; i < v2.size(); ++i) CHECK(v2[i] == 0.0);
  // Level 0 reproduces the magnitude itself.
  const dgns::ScalarField v0 = dgns::truncate(const_field(grid, -0.7), 0);
  for (std::size_t i = 0; i < v0.size(); ++i) CHECK(v0[i] == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("dissipation vanishes on constants and below the threshold") {
  const dgns::GridSpec grid = small_grid(8);
  const dgns::ScalarField d_const = dgns::dissipation(const_field(grid, 2.5), 1);
  for (std::size_t i = 0; i < d_const.size(); ++i) CHECK(d_const[i] <= 1e-12);

  // A field with plenty of gradient but |u| < c_1 everywhere: both terms
  // of d_1^2 carry an indicator that switches them off.
  const dgns::VelocityField u = dgns::taylor_green(small_grid(), 0.3);
  const dgns::ScalarField d = dgns::dissipation(u, 1);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i] == 0.0);
}

TEST_CASE("dissipation is dominated nodewise by the full gradient") {
  const dgns::GridSpec grid = small_grid();
  const dgns::VelocityField u = dgns::random_divergence_free(grid, 31, 4.0, -2.0);
  const dgns::TensorField g = dgns::gradient(u);
  for (const int k : {1, 2, 3}) {
    const dgns::ScalarField d = dgns::dissipation(u, k);
    for (std::size_t idx = 0; idx < d.size(); ++idx) {
      double fro2 = 0.0;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) fro2 += g.comp(i, j)[idx] * g.comp(i, j)[idx];
      }
      CHECK(d[idx] * d[idx] <= fro2 * (1.0 + 1e-12) + 1e-300);
    }
  }
}

TEST_CASE("truncation layers are nodewise monotone across levels") {
  const dgns::GridSpec grid = small_grid();
  const dgns::VelocityField u = dgns::random_divergence_free(grid, 77, 6.0, -2.0);
  for (int k = 2; k <= 6; ++k) {
    const dgns::ScalarField va = dgns::truncate(u, k - 1);
    const dgns::ScalarField vb = dgns::truncate(u, k);
    const dgns::ScalarField da = dgns::dissipation(u, k - 1);
    const dgns::ScalarField db = dgns::dissipation(u, k);
    const double half_pow = std::ldexp(1.0, -k);
    for (std::size_t i = 0; i < va.size(); ++i) {
      CHECK(vb[i] <= va[i]);
      // Where the level-k layer is active, the coarser layer already
      // exceeds the dyadic gap 2^-k (the Chebyshev pivot).
      if (vb[i] > 0.0) CHECK(va[i] >= half_pow);
      CHECK(db[i] <= da[i] * (1.0 + 1e-12) + 1e-300);
    }
  }
}

TEST_CASE("pointwise_suite reports zero violation in the exact equality case") {
  const dgns::GridSpec grid = small_grid(8);
  const dgns::PointwiseReport zero = dgns::pointwise_suite(dgns::VelocityField(grid), 1);
  for (const double v : zero.max_violation) CHECK(v == 0.0);
  CHECK(zero.max_d == 0.0);

  // |u| = 1 constant, k = 1: the first inequality |(1 - v/|u|) u| <= c_k is
  // an exact dyadic equality and the gradient terms vanish.
  const dgns::PointwiseReport flat = dgns::pointwise_suite(const_field(grid, 1.0), 1);
  for (const double v : flat.max_violation) CHECK(v == 0.0);
}

TEST_CASE("pointwise_suite on random projected fields stays at round-off") {
  const dgns::GridSpec grid = small_grid();
  for (const std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    const dgns::VelocityField u = dgns::random_divergence_free(grid, seed, 5.0, -2.0);
    for (const int k : {1, 2, 3}) {
      const dgns::PointwiseReport report = dgns::pointwise_suite(u, k);
      for (const double v : report.max_violation) {
        CHECK(v <= 1e-10 * (1.0 + report.max_d));
      }
    }
  }
}

TEST_CASE("slab_energy matches an independent quadrature oracle") {
  const dgns::GridSpec grid = small_grid();
  const dgns::Trajectory traj = synthetic_traj(grid, 17, [&](double t) {
    return dgns::taylor_green(grid, 1.2 + 0.5 * std::sin(1.0 + t));
  });
  for (const int k : {1, 2, 3}) {
    const double got = dgns::slab_energy(traj, dgns::SlabSpec::for_level(k));
    const double want = slab_energy_oracle(traj, k);
    CHECK(got == doctest::Approx(want).epsilon(1e-10));
    CHECK(got > 0.0);
  }
}

TEST_CASE("slab_energy vanishes for zero and below-threshold trajectories") {
  const dgns::GridSpec grid = small_grid(8);
  const dgns::Trajectory zero =
      synthetic_traj(grid, 9, [&](double) { return dgns::VelocityField(grid); });
  CHECK(dgns::slab_energy(zero, dgns::SlabSpec::for_level(1)) == 0.0);

  const dgns::Trajectory low =
      synthetic_traj(grid, 9, [&](double) { return dgns::taylor_green(grid, 0.45); });
  CHECK(dgns::slab_energy(low, dgns::SlabSpec::for_level(1)) == 0.0);
}

TEST_CASE("chebyshev_check hand values for a constant unit field") {
  const dgns::GridSpec grid = small_grid(8);
  const dgns::Trajectory traj =
      synthetic_traj(grid, 5, [&](double) { return const_field(grid, 1.0); });
  const dgns::ChebyshevPair pair = dgns::chebyshev_check(traj, 1);
  const double vol = std::pow(grid.box_length, 3.0);
  // v_1 = 1/2 > 0 everywhere, so the sublevel measure is the full slab
  // |Q_0| = 2 L^3; the right side integrates (2 v_0)^{10/3} = 2^{10/3}.
  CHECK(pair.lhs == doctest::Approx(2.0 * vol).epsilon(1e-13));
  CHECK(pair.rhs == doctest::Approx(std::pow(2.0, 10.0 / 3.0) * 2.0 * vol).epsilon(1e-13));
  CHECK(pair.lhs <= pair.rhs);
}

TEST_CASE("chebyshev_check is empty below the threshold") {
  const dgns::GridSpec grid = small_grid(8);
  const dgns::Trajectory traj =
      synthetic_traj(grid, 5, [&](double) { return const_field(grid, 0.7); });
  const dgns::ChebyshevPair pair = dgns::chebyshev_check(traj, 2);  // c_2 = 0.75 > 0.7
  CHECK(pair.lhs == 0.0);
  CHECK(pair.rhs > 0.0);
}

TEST_CASE("chebyshev_check holds with zero tolerance on a solver trajectory") {
  const dgns::GridSpec grid = small_grid();
  dgns::SolverConfig cfg;
  cfg.dt = 5e-3;
  cfg.t_end = 2.0;
  cfg.snapshot_stride = 50;
  const dgns::Trajectory run = dgns::simulate(dgns::taylor_green(grid, 2.2), cfg);
  // Re-center the run onto [-1, 1] so the parabolic slabs apply.
  dgns::Trajectory traj = run;
  for (double& t : traj.times) t -= 1.0;
  for (int k = 1; k <= 8; ++k) {
    const dgns::ChebyshevPair pair = dgns::chebyshev_check(traj, k);
    CHECK(pair.lhs <= pair.rhs);
  }
}

TEST_CASE("interpolation_ratio matches the factorized 1D quadrature oracle") {
  const dgns::GridSpec grid = small_grid(32);
  const int n = grid.n;
  const double box = grid.box_length;
  std::vector<dgns::ScalarField> fields;
  std::vector<double> times;
  for (int j = 0; j <= 4; ++j) {
    times.push_back(-1.0 + 0.5 * j);
    fields.push_back(dgns::make_scalar_field(
        grid, [](double x, double, double) { return std::sin(x); }));
  }
  const dgns::SlabSpec slab = dgns::SlabSpec::for_level(1);
  const std::optional<double> got = dgns::interpolation_ratio(fields, times, slab);
  REQUIRE(got.has_value());

  // The 3D node sums factorize exactly into 1D sums over one axis; the
  // time direction is constant, so every slab norm is a closed form in the
  // slab length tau = 1.75 and three 1D sums.
  double s103 = 0.0, s2 = 0.0, c2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x = box * j / n;
    s103 += std::pow(std::abs(std::sin(x)), 10.0 / 3.0);
    s2 += std::sin(x) * std::sin(x);
    c2 += std::cos(x) * std::cos(x);
  }
  const double h3 = grid.cell_volume();
  const double plane = static_cast<double>(n) * n * h3;
  const double tau = 1.0 - slab.t_start;
  const double num = std::pow(tau * s103 * plane, 0.3);
  const double sup_l2 = std::sqrt(s2 * plane);
  const double grad_l2 = std::sqrt(tau * c2 * plane);
  const double f_l2 = std::sqrt(tau * s2 * plane);
  const double den = std::pow(sup_l2, 0.4) * std::pow(grad_l2 + f_l2 / box, 0.6);
  CHECK(*got == doctest::Approx(num / den).epsilon(1e-8));
}

TEST_CASE("interpolation_ratio approaches the continuum closed form") {
  // At n = 64 the only quadrature error is the |sin|^{10/3} cusp term,
  // about 1e-7 after the 3/10 root.
  const dgns::GridSpec grid = small_grid(64);
  std::vector<dgns::ScalarField> fields;
  std::vector<double> times;
  for (int j = 0; j <= 2; ++j) {
    times.push_back(-1.0 + 1.0 * j);
    fields.push_back(dgns::make_scalar_field(
        grid, [](double x, double, double) { return std::sin(x); }));
  }
  const dgns::SlabSpec slab = dgns::SlabSpec::for_level(1);
  const std::optional<double> got = dgns::interpolation_ratio(fields, times, slab);
  REQUIRE(got.has_value());

  const double box = grid.box_length;
  const double tau = 1.75;
  const double i1d = 2.0 * std::sqrt(kPi) * std::tgamma(13.0 / 6.0) / std::tgamma(8.0 / 3.0);
  const double num = std::pow(tau * i1d * box * box, 0.3);
  const double sup_l2 = std::sqrt(std::pow(box, 3.0) / 2.0);
  const double grad_l2 = std::sqrt(tau * std::pow(box, 3.0) / 2.0);
  const double den = std::pow(sup_l2, 0.4) * std::pow(grad_l2 + grad_l2 / box, 0.6);
  CHECK(*got == doctest::Approx(num / den).epsilon(1e-6));
}

TEST_CASE("interpolation_ratio is scale invariant and empty on zero data") {
  const dgns::GridSpec grid = small_grid();
  std::vector<dgns::ScalarField> fields, scaled;
  std::vector<double> times;
  for (int j = 0; j <= 4; ++j) {
    times.push_back(-1.0 + 0.5 * j);
    const double t = times.back();
    fields.push_back(dgns::make_scalar_field(grid, [t](double x, double y, double) {
      return (1.0 + 0.2 * t) * (std::sin(x) + 0.3 * std::cos(2.0 * y));
    }));
    scaled.push_back(fields.back());
    for (double& v : scaled.back().values()) v *= 37.5;
  }
  const dgns::SlabSpec slab = dgns::SlabSpec::for_level(2);
  const std::optional<double> base = dgns::interpolation_ratio(fields, times, slab);
  const std::optional<double> big = dgns::interpolation_ratio(scaled, times, slab);
  REQUIRE(base.has_value());
  REQUIRE(big.has_value());
  CHECK(*big == doctest::Approx(*base).epsilon(1e-12));

  std::vector<dgns::ScalarField> zeros(times.size(), dgns::ScalarField(grid));
  CHECK(!dgns::interpolation_ratio(zeros, times, slab).has_value());
}

TEST_CASE("level_energy_inequality is exactly satisfied by trivial data") {
  const dgns::GridSpec grid = small_grid(8);
  const dgns::Trajectory zero =
      synthetic_traj(grid, 17, [&](double) { return dgns::VelocityField(grid); });
  const dgns::LevelEnergyReport report = dgns::level_energy_inequality(zero, 1);
  CHECK(report.max_residual == 0.0);
  CHECK(report.pair_count > 0);

  const dgns::Trajectory low =
      synthetic_traj(grid, 17, [&](double) { return dgns::taylor_green(grid, 0.4); });
  CHECK(dgns::level_energy_inequality(low, 1).max_residual == 0.0);
}

TEST_CASE("level_energy_inequality needs snapshots inside the pairing slabs") {
  const dgns::GridSpec grid = small_grid(8);
  const dgns::Trajectory sparse =
      synthetic_traj(grid, 5, [&](double) { return dgns::VelocityField(grid); });
  // Spacing 0.5 leaves no snapshot inside [T_1, T_2] = [-0.75, -0.625].
  CHECK_THROWS_AS(dgns::level_energy_inequality(sparse, 2), std::invalid_argument);
}

TEST_CASE("build_ledger on sub-threshold data reports zero truncation energy") {
  const dgns::GridSpec grid = small_grid(8);
  const dgns::Trajectory low =
      synthetic_traj(grid, 17, [&](double) { return dgns::taylor_green(grid, 0.45); });
  const dgns::EnergyLedger ledger = dgns::build_ledger(low, 6);
  REQUIRE(ledger.u_seq.size() == 6);
  for (const double u : ledger.u_seq) CHECK(u == 0.0);
  CHECK(ledger.slab_l6 > 0.0);
  REQUIRE(ledger.measured_a.has_value());
  CHECK(*ledger.measured_a == 0.0);
  CHECK(!ledger.measured_b.has_value());
  CHECK(ledger.terminal_excess == 0.0);
  CHECK(ledger.max_abs_u_late == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(ledger.snapshot_count == 17);
}

TEST_CASE("build_ledger of a zero trajectory fits nothing") {
  const dgns::GridSpec grid = small_grid(8);
  const dgns::Trajectory zero =
      synthetic_traj(grid, 9, [&](double) { return dgns::VelocityField(grid); });
  const dgns::EnergyLedger ledger = dgns::build_ledger(zero, 4);
  for (const double u : ledger.u_seq) CHECK(u == 0.0);
  CHECK(ledger.slab_l6 == 0.0);
  CHECK(!ledger.measured_a.has_value());
  CHECK(!ledger.measured_b.has_value());
}

TEST_CASE("build_ledger energies decrease in the level and dominate the excess") {
  const dgns::GridSpec grid = small_grid();
  const dgns::Trajectory traj = synthetic_traj(grid, 17, [&](double t) {
    return dgns::taylor_green(grid, 1.6 + 0.4 * std::sin(2.0 * t));
  });
  const dgns::EnergyLedger ledger = dgns::build_ledger(traj, 8);
  REQUIRE(ledger.u_seq.size() == 8);
  CHECK(ledger.u_seq[0] > 0.0);
  for (std::size_t k = 1; k < ledger.u_seq.size(); ++k) {
    CHECK(ledger.u_seq[k] <= ledger.u_seq[k - 1] * (1.0 + 1e-12));
  }
  CHECK(ledger.terminal_excess <= ledger.u_seq.back() * (1.0 + 1e-12) + 1e-300);
  CHECK(ledger.max_abs_u_late > 1.0);

  // measured_A is defined as the exact quotient U_1 / slab6.
  REQUIRE(ledger.measured_a.has_value());
  const double slab6 = std::pow(ledger.slab_l6, 6.0);
  CHECK(ledger.u_seq[0] == doctest::Approx(*ledger.measured_a * slab6).epsilon(1e-10));
}
