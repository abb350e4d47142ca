#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "dgns/initial_conditions.hpp"
#include "dgns/operators.hpp"
#include "dgns/util.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

dgns::GridSpec small_grid(int n = 16, double box = 2.0 * kPi) {
  dgns::GridSpec grid;
  grid.n = n;
  grid.box_length = box;
  return grid;
}

/// Band-limited random scalar built from a handful of low modes, so that a
/// high-order finite-difference stencil resolves it far below the target
/// tolerance.
struct WaveMode {
  double ax, ay, az, amp, phase;
};

std::vector<WaveMode> random_modes(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<WaveMode> modes;
  for (int m = 0; m < 6; ++m) {
    modes.push_back({std::floor(dist(rng) * 3.0), std::floor(dist(rng) * 3.0),
                     std::floor(dist(rng) * 3.0), dist(rng), kPi * dist(rng)});
  }
  return modes;
}

dgns::ScalarField field_from_modes(const dgns::GridSpec& grid,
                                   const std::vector<WaveMode>& modes) {
  const double k = 2.0 * kPi / grid.box_length;
  return dgns::make_scalar_field(grid, [modes, k](double x, double y, double z) {
    double v = 0.0;
    for (const WaveMode& m : modes) {
      v += m.amp * std::cos(k * (m.ax * x + m.ay * y + m.az * z) + m.phase);
    }
    return v;
  });
}

dgns::ScalarField random_low_mode_scalar(const dgns::GridSpec& grid, std::uint64_t seed) {
  return field_from_modes(grid, random_modes(seed));
}

/// 6th-order centered difference along one axis, the classical
/// (45 df1 - 9 df2 + df3) / 60h stencil. Fully independent of the spectral
/// path used by gradient().
double fd6(const dgns::ScalarField& f, int ix, int iy, int iz, int axis) {
  const int n = f.grid().n;
  auto at = [&](int ox, int oy, int oz) {
    auto wrap = [n](int i) { return ((i % n) + n) % n; };
    return f(wrap(ix + ox), wrap(iy + oy), wrap(iz + oz));
  };
  std::array<int, 3> o{};
  auto shift = [&](int s) {
    o = {0, 0, 0};
    o[static_cast<std::size_t>(axis)] = s;
    return at(o[0], o[1], o[2]);
  };
  const double d1 = shift(1) - shift(-1);
  const double d2 = shift(2) - shift(-2);
  const double d3 = shift(3) - shift(-3);
  return (45.0 * d1 - 9.0 * d2 + d3) / (60.0 * f.grid().spacing());
}

}  // namespace

TEST_CASE("make_field samples the formula and rejects non-finite values") {
  const dgns::GridSpec grid = small_grid(8);
  const dgns::VectorField zero = dgns::make_field(
      grid, [](double, double, double) -> std::array<double, 3> { return {0.0, 0.0, 0.0}; });
  for (int i = 0; i < 3; ++i) {
    CHECK(dgns::space_norm(zero.component(i), 2.0) == 0.0);
  }

  CHECK_THROWS_AS(dgns::make_field(grid,
                                   [](double x, double, double) -> std::array<double, 3> {
                                     return {x == 0.0 ? 0.0 : 1.0 / (x - x), 0.0, 0.0};
                                   }),
                  dgns::FieldError);
  CHECK_THROWS_AS(
      dgns::make_scalar_field(grid, [](double, double, double) { return std::nan(""); }),
      dgns::FieldError);
}

TEST_CASE("single sine component has the textbook L2 norm") {
  const dgns::GridSpec grid = small_grid();
  const dgns::VectorField u = dgns::make_field(
      grid, [](double, double y, double) -> std::array<double, 3> {
        return {std::sin(y), 0.0, 0.0};
      });
  // int sin^2 over the box is L^3 / 2 = 4 pi^3; the rectangle rule is exact
  // for this trigonometric polynomial.
  CHECK(dgns::space_norm(u, 2.0) ==
        doctest::Approx(std::sqrt(4.0 * kPi * kPi * kPi)).epsilon(1e-13));
}

TEST_CASE("gradient of a constant vanishes and of sin is cos") {
  const dgns::GridSpec grid = small_grid();
  const dgns::ScalarField c(grid, 3.25);
  const dgns::VectorField gc = dgns::gradient(c);
  for (int i = 0; i < 3; ++i) CHECK(dgns::space_norm(gc.component(i), 2.0) <= 1e-13);

  const dgns::ScalarField s = dgns::make_scalar_field(
      grid, [](double x, double, double) { return std::sin(x); });
  const dgns::VectorField gs = dgns::gradient(s);
  const dgns::ScalarField cosx = dgns::make_scalar_field(
      grid, [](double x, double, double) { return std::cos(x); });
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    worst = std::max(worst, std::abs(gs.component(0)[i] - cosx[i]));
  }
  CHECK(worst <= 1e-12);
  CHECK(dgns::space_norm(gs.component(1), 2.0) <= 1e-13);
  CHECK(dgns::space_norm(gs.component(2), 2.0) <= 1e-13);
}

TEST_CASE("spectral gradient agrees with a 6th-order finite difference oracle") {
  const dgns::GridSpec grid = small_grid(64);
  const std::vector<WaveMode> modes = random_modes(2024);
  const dgns::ScalarField f = field_from_modes(grid, modes);
  const dgns::VectorField g = dgns::gradient(f);

  // The central 6th-order stencil truncates at |f^(7)| h^6 / 140 per axis;
  // the spectral derivative is exact on these modes, so the gap must stay
  // inside that bound (plus rounding room).
  const double kappa = 2.0 * kPi / grid.box_length;
  const double h = grid.spacing();
  std::array<double, 3> bound = {1e-9, 1e-9, 1e-9};
  for (const WaveMode& m : modes) {
    const double axes[3] = {m.ax, m.ay, m.az};
    for (int axis = 0; axis < 3; ++axis) {
      bound[static_cast<std::size_t>(axis)] +=
          std::abs(m.amp) * std::pow(kappa * std::abs(axes[axis]), 7.0) * std::pow(h, 6.0) /
          140.0;
    }
  }

  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> pick(0, grid.n - 1);
  for (int trial = 0; trial < 200; ++trial) {
    const int ix = pick(rng), iy = pick(rng), iz = pick(rng);
    for (int axis = 0; axis < 3; ++axis) {
      const double fd = fd6(f, ix, iy, iz, axis);
      const double sp = g.component(axis)(ix, iy, iz);
      CHECK(std::abs(fd - sp) <= bound[static_cast<std::size_t>(axis)]);
    }
  }
}

TEST_CASE("divergence and curl match hand-differentiated fields") {
  const dgns::GridSpec grid = small_grid();
  const dgns::VectorField u = dgns::make_field(
      grid, [](double x, double y, double z) -> std::array<double, 3> {
        return {std::sin(x), std::sin(y), std::sin(z)};
      });
  const dgns::ScalarField div = dgns::divergence(u);
  const dgns::ScalarField expected = dgns::make_scalar_field(
      grid, [](double x, double y, double z) { return std::cos(x) + std::cos(y) + std::cos(z); });
  double worst = 0.0;
  for (std::size_t i = 0; i < div.size(); ++i) {
    worst = std::max(worst, std::abs(div[i] - expected[i]));
  }
  CHECK(worst <= 1e-12);

  const dgns::VectorField shear = dgns::make_field(
      grid, [](double, double y, double) -> std::array<double, 3> {
        return {std::sin(y), 0.0, 0.0};
      });
  const dgns::VectorField w = dgns::curl(shear);
  const dgns::ScalarField wz = dgns::make_scalar_field(
      grid, [](double, double y, double) { return -std::cos(y); });
  worst = 0.0;
  for (std::size_t i = 0; i < wz.size(); ++i) {
    worst = std::max(worst, std::abs(w.component(2)[i] - wz[i]));
  }
  CHECK(worst <= 1e-12);
  CHECK(dgns::space_norm(w.component(0), 2.0) <= 1e-13);
  CHECK(dgns::space_norm(w.component(1), 2.0) <= 1e-13);
}

TEST_CASE("taylor_green is spectrally divergence-free") {
  const dgns::GridSpec grid = small_grid();
  const dgns::VectorField u = dgns::taylor_green(grid, 1.0);
  CHECK(dgns::space_norm(dgns::divergence(u), 2.0) <= 1e-12 * dgns::space_norm(u, 2.0));
}

TEST_CASE("leray_project fixes divergence-free fields and is idempotent") {
  const dgns::GridSpec grid = small_grid();
  const dgns::VectorField u = dgns::taylor_green(grid, 1.0);
  const dgns::VectorField pu = dgns::leray_project(u);
  for (int i = 0; i < 3; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < u.component(i).size(); ++j) {
      worst = std::max(worst, std::abs(pu.component(i)[j] - u.component(i)[j]));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("space_norm closed forms") {
  const dgns::GridSpec grid = small_grid();
  const dgns::ScalarField c(grid, -2.0);
  // |c|_p = |c| * L^{3/p}.
  CHECK(dgns::space_norm(c, 2.0) ==
        doctest::Approx(2.0 * std::pow(2.0 * kPi, 1.5)).epsilon(1e-13));
  CHECK(dgns::space_norm(c, 3.0) ==
        doctest::Approx(2.0 * std::pow(2.0 * kPi, 1.0)).epsilon(1e-13));
  CHECK(dgns::space_norm(c, std::numeric_limits<double>::infinity()) == 2.0);

  const dgns::ScalarField s = dgns::make_scalar_field(
      grid, [](double, double y, double) { return std::sin(y); });
  CHECK(dgns::space_norm(s, 2.0) ==
        doctest::Approx(std::sqrt(4.0 * kPi * kPi * kPi)).epsilon(1e-13));

  CHECK_THROWS_AS(dgns::space_norm(s, 0.5), std::invalid_argument);
}

TEST_CASE("space_norm is positively homogeneous") {
  const dgns::GridSpec grid = small_grid(8);
  dgns::ScalarField f = random_low_mode_scalar(grid, 3);
  dgns::ScalarField scaled = f;
  for (double& v : scaled.values()) v *= -5.5;
  for (const double p : {1.0, 2.0, 10.0 / 3.0, std::numeric_limits<double>::infinity()}) {
    CHECK(dgns::space_norm(scaled, p) ==
          doctest::Approx(5.5 * dgns::space_norm(f, p)).epsilon(1e-13));
  }
}

TEST_CASE("box_integral of a constant is the box volume times the constant") {
  const dgns::GridSpec grid = small_grid(8, 3.0);
  const dgns::ScalarField c(grid, 1.5);
  CHECK(dgns::box_integral(c) == doctest::Approx(1.5 * 27.0).epsilon(1e-14));
}

TEST_CASE("slab_norm of a constant-in-time snapshot separates into powers") {
  const dgns::GridSpec grid = small_grid();
  const dgns::VectorField u = dgns::make_field(
      grid, [](double, double y, double) -> std::array<double, 3> {
        return {std::sin(y), 0.0, 0.0};
      });
  dgns::Trajectory traj;
  traj.grid = grid;
  traj.dt = 0.25;
  for (int j = 0; j <= 8; ++j) {
    traj.times.push_back(0.25 * j);
    traj.snapshots.push_back(u);
  }
  const double space2 = dgns::space_norm(u, 2.0);
  // L^p in time of a constant is T^{1/p} times the constant.
  CHECK(dgns::slab_norm(traj, 0.0, 2.0, 4.0, 2.0) ==
        doctest::Approx(std::pow(2.0, 0.25) * space2).epsilon(1e-12));
  // p == q goes through the joint space-time quadrature and must agree.
  const double space4 = dgns::space_norm(u, 4.0);
  CHECK(dgns::slab_norm(traj, 0.0, 2.0, 4.0, 4.0) ==
        doctest::Approx(std::pow(2.0, 0.25) * space4).epsilon(1e-12));
  // p = infinity takes the in-window sup.
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(dgns::slab_norm(traj, 0.0, 2.0, inf, 2.0) == doctest::Approx(space2).epsilon(1e-12));
}

TEST_CASE("slab_norm of a zero trajectory vanishes") {
  const dgns::GridSpec grid = small_grid(8);
  dgns::Trajectory traj;
  traj.grid = grid;
  traj.dt = 1.0;
  for (int j = 0; j < 3; ++j) {
    traj.times.push_back(static_cast<double>(j));
    traj.snapshots.push_back(dgns::VectorField(grid));
  }
  CHECK(dgns::slab_norm(traj, 0.0, 2.0, 4.0, 6.0) == 0.0);
}

TEST_CASE("slab_norm matches the separated closed form of a modulated mode") {
  // f(x, t) = (1 + t^2) sin(x) on [0, 1]:
  //   |f|_{L^4_t L^2_x}^4 = int_0^1 (1+t^2)^4 dt * (L^3/2)^2,
  // and int_0^1 (1+t^2)^4 dt = 1328/315. The trapezoid rule at 65 samples
  // carries the only discretization error (about 8e-5 after the 1/4 root).
  const dgns::GridSpec grid = small_grid();
  std::vector<dgns::ScalarField> fields;
  std::vector<double> times;
  for (int j = 0; j <= 64; ++j) {
    const double t = static_cast<double>(j) / 64.0;
    times.push_back(t);
    fields.push_back(dgns::make_scalar_field(
        grid, [t](double x, double, double) { return (1.0 + t * t) * std::sin(x); }));
  }
  const double l3 = std::pow(2.0 * kPi, 3.0);
  const double closed = std::pow(1328.0 / 315.0, 0.25) * std::sqrt(l3 / 2.0);
  CHECK(dgns::slab_norm_scalar(fields, times, 0.0, 1.0, 4.0, 2.0) ==
        doctest::Approx(closed).epsilon(1e-4));
}

TEST_CASE("slab_norm rejects bad windows") {
  const dgns::GridSpec grid = small_grid(8);
  dgns::Trajectory traj;
  traj.grid = grid;
  traj.dt = 1.0;
  for (int j = 0; j < 3; ++j) {
    traj.times.push_back(static_cast<double>(j));
    traj.snapshots.push_back(dgns::VectorField(grid));
  }
  CHECK_THROWS_AS(dgns::slab_norm(traj, 1.0, 1.0, 2.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(dgns::slab_norm(traj, -1.0, 1.0, 2.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(dgns::slab_norm(traj, 0.0, 5.0, 2.0, 2.0), std::invalid_argument);
}

TEST_CASE("the algebraic gradient of |u| is dominated by the full gradient") {
  const dgns::GridSpec grid = small_grid();
  const dgns::VectorField u = dgns::random_divergence_free(grid, 17, 0.5, -2.0);
  const dgns::TensorField g = dgns::gradient(u);
  const dgns::ScalarField mag = dgns::magnitude(u);
  for (std::size_t idx = 0; idx < mag.size(); ++idx) {
    const double s = mag[idx];
    if (s <= 1e-30) continue;
    double fro2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) fro2 += g.comp(i, j)[idx] * g.comp(i, j)[idx];
    }
    double grad_abs2 = 0.0;
    for (int j = 0; j < 3; ++j) {
      double dj = 0.0;
      for (int i = 0; i < 3; ++i) dj += u.component(i)[idx] * g.comp(i, j)[idx];
      dj /= s;
      grad_abs2 += dj * dj;
    }
    CHECK(grad_abs2 <= fro2 * (1.0 + 1e-12) + 1e-300);
  }
}
