#pragma once

#include <array>
#include <optional>
#include <vector>

#include "dgns/grid.hpp"

namespace dgns {

/// Magnitudes at or below this floor are treated as exactly zero when they
/// appear in denominators (the ratios v_k/|u|, c_k/|u|, grad|u| all have
/// removable singularities there).
inline constexpr double kMagnitudeFloor = 1e-30;

/// Additive floor used when fitting ratios of slab energies, so that a run
/// whose truncation energies vanish identically reports "no fit" instead of
/// 0/0 noise.
inline constexpr double kFitFloor = 1e-14;

/// Truncation threshold c_k = 1 - 2^-k for level k >= 0.
double level_threshold(int k);

/// Parabolic slab Q_k = [T_k, 1] with T_k = -(1/2)(1 + 2^-k); T_0 = -1 is
/// the full diagnostic window and T_k increases toward -1/2.
struct SlabSpec {
  int level = 0;
  double t_start = -1.0;
  double t_end = 1.0;

  static SlabSpec for_level(int k);
};

/// Truncated magnitude v_k = max(|u| - c_k, 0).
ScalarField truncate(const VelocityField& u, int k);

/// Dissipation density d_k with
///   d_k^2 = (c_k/|u|) 1_{|u| >= c_k} |grad|u||^2 + (v_k/|u|) |grad u|^2,
/// where grad|u| is computed algebraically from the spectral gradient of u
/// (never by differencing |u| itself) and both ratios vanish at |u| = 0.
ScalarField dissipation(const VelocityField& u, int k);

/// Maximum violation of the five pointwise inequalities tying the
/// truncation layer together, evaluated at every grid node:
///   [0] |(1 - v_k/|u|) u|            <= c_k
///   [1] (v_k/|u|) |grad u|           <= d_k
///   [2] 1_{v_k > 0} |grad |u||       <= d_k
///   [3] |grad v_k|                   <= d_k
///   [4] |grad((v_k/|u|) u)|_F        <= 3 d_k
/// Violations are max(0, lhs - rhs); max_d records the largest d_k seen.
struct PointwiseReport {
  int level = 0;
  std::array<double, 5> max_violation{};
  double max_d = 0.0;
};
PointwiseReport pointwise_suite(const VelocityField& u, int k);

/// Slab energy U_k = (1/2) sup_{t in slab} |v_k(t)|_2^2 + int_slab |d_k|_2^2 dt,
/// with the sup over stored snapshots and the time integral taken against
/// the piecewise-linear interpolant of the per-snapshot dissipation.
double slab_energy(const Trajectory& traj, const SlabSpec& slab);

/// Chebyshev comparison on Q_{k-1}: the space-time measure of {v_k > 0}
/// against 2^{10k/3} int int v_{k-1}^{10/3}. The nodewise inequality is
/// exact in floating point, so lhs <= rhs must hold with zero tolerance.
struct ChebyshevPair {
  int level = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};
ChebyshevPair chebyshev_check(const Trajectory& traj, int k);

/// Parabolic interpolation ratio for a scalar time series F on a slab:
///   |F|_{L^{10/3}(Q)} / ( |F|_{L^inf L^2(Q)}^{2/5} *
///                         (|grad F|_{L^2(Q)} + L^-1 |F|_{L^2(Q)})^{3/5} ),
/// using the zero-mode-corrected torus form of the Sobolev factor.
/// Returns nothing when the denominator vanishes.
std::optional<double> interpolation_ratio(const std::vector<ScalarField>& fields,
                                          const std::vector<double>& times,
                                          const SlabSpec& slab);

/// Integrated level-k energy inequality over all ordered snapshot pairs
/// (sigma, t) with sigma in [T_{k-1}, T_k] and t in [T_k, 1]:
///   (1/2)|v_k(t)|_2^2 + int_sigma^t |d_k|_2^2
///     <= (1/2)|v_k(sigma)|_2^2 + int_sigma^t |(v_k/|u|) u . grad P| dx ds.
/// max_residual is the largest positive defect; scale is the natural size
/// of the inequality (dissipation + sup truncation energy + floor) used to
/// normalize it.
struct LevelEnergyReport {
  int level = 0;
  double max_residual = 0.0;
  double scale = 0.0;
  int pair_count = 0;
};
LevelEnergyReport level_energy_inequality(const Trajectory& traj, int k);

/// Everything the iteration lemma consumes, measured on a diagnostic
/// trajectory covering [-1, 1].
struct EnergyLedger {
  int levels = 0;
  double beta = 19.0 / 18.0;
  std::vector<double> u_seq;             // U_1 .. U_levels
  double slab_l6 = 0.0;                  // |u|_{L^6(Q_0)}
  std::optional<double> measured_a;      // U_1 / slab_l6^6
  std::optional<double> measured_b;      // max_k U_k / (2^{7k/3} U_{k-1}^beta)
  double terminal_excess = 0.0;          // max_{t >= -1/2} (1/2) int (|u|-1)_+^2
  double max_abs_u_late = 0.0;           // max |u| over snapshots with t >= -1/2
  int snapshot_count = 0;
  double snapshot_dt = 0.0;
};
EnergyLedger build_ledger(const Trajectory& traj, int levels);

}  // namespace dgns
