#include "dgns/degiorgi.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "dgns/operators.hpp"
#include "dgns/pressure.hpp"
#include "dgns/util.hpp"

namespace dgns {
namespace {

constexpr double kTimeSlack = 1e-9;

/// Nodes are summed in fixed blocks of this size and the block partials are
/// combined in index order, so box sums are bit-identical for any thread
/// count.
constexpr std::size_t kReduceBlock = 4096;

void require_level(int k, int lo) {
  if (k < lo || k > 60) {
    throw std::invalid_argument("truncation level must be in [" + std::to_string(lo) + ", 60]");
  }
}

/// Magnitude and gradient scalars entering every level quantity at a node:
/// s = |u|, gn2 = |grad|u||^2 (algebraic chain rule, zero below the
/// magnitude floor), fro2 = |grad u|_F^2.
struct NodeGrad {
  double s = 0.0;
  double gn2 = 0.0;
  double fro2 = 0.0;
  double grad_abs[3] = {0.0, 0.0, 0.0};
  double uu[3] = {0.0, 0.0, 0.0};
};

inline NodeGrad node_grad(const VelocityField& u, const TensorField& grad, std::size_t m) {
  NodeGrad ng;
  double g[3][3];
  for (int i = 0; i < 3; ++i) {
    ng.uu[i] = u.component(i).values()[m];
    for (int j = 0; j < 3; ++j) {
      g[i][j] = grad.comp(i, j).values()[m];
      ng.fro2 += g[i][j] * g[i][j];
    }
  }
  ng.s = std::sqrt(ng.uu[0] * ng.uu[0] + ng.uu[1] * ng.uu[1] + ng.uu[2] * ng.uu[2]);
  if (ng.s > kMagnitudeFloor) {
    for (int j = 0; j < 3; ++j) {
      ng.grad_abs[j] = (ng.uu[0] * g[0][j] + ng.uu[1] * g[1][j] + ng.uu[2] * g[2][j]) / ng.s;
      ng.gn2 += ng.grad_abs[j] * ng.grad_abs[j];
    }
  }
  return ng;
}

inline double trunc_at(double s, double c) { return s > c ? s - c : 0.0; }

inline double diss2_at(const NodeGrad& ng, double c, double v) {
  if (ng.s <= kMagnitudeFloor) return 0.0;
  const double term1 = (ng.s >= c) ? (c / ng.s) * ng.gn2 : 0.0;
  const double term2 = (v / ng.s) * ng.fro2;
  return term1 + term2;
}

/// All box sums a single snapshot contributes to the ledger, already
/// multiplied by the cell volume. v2/d2/chi are indexed by level 1..K,
/// w103[k] holds int v_k^{10/3} for k = 0..K-1 (the Chebyshev right sides).
struct SnapshotLevels {
  double s6 = 0.0;
  double excess2 = 0.0;
  double smax = 0.0;
  std::vector<double> v2;
  std::vector<double> d2;
  std::vector<double> chi;
  std::vector<double> w103;
};

SnapshotLevels measure_snapshot(const VelocityField& u, int levels) {
  const GridSpec& grid = u.grid();
  const std::size_t nodes = grid.node_count();
  const TensorField grad = gradient(u);

  std::vector<double> thresholds(static_cast<std::size_t>(levels) + 1);
  for (int k = 0; k <= levels; ++k) thresholds[k] = level_threshold(k);

  // Per-block partial sums: s6, excess2, then v2/d2/chi for k=1..K and
  // w103 for k=0..K-1, flattened per block.
  const std::size_t width = 2 + 4 * static_cast<std::size_t>(levels);
  const std::size_t nblocks = (nodes + kReduceBlock - 1) / kReduceBlock;
  std::vector<long double> partial(nblocks * width, 0.0L);
  std::vector<double> block_max(nblocks, 0.0);

  parallel_for(nblocks, [&](std::size_t blo, std::size_t bhi) {
    for (std::size_t b = blo; b < bhi; ++b) {
      long double* acc = partial.data() + b * width;
      double smax = 0.0;
      const std::size_t mlo = b * kReduceBlock;
      const std::size_t mhi = std::min(nodes, mlo + kReduceBlock);
      for (std::size_t m = mlo; m < mhi; ++m) {
        const NodeGrad ng = node_grad(u, grad, m);
        const double s2 = ng.s * ng.s;
        acc[0] += static_cast<long double>(s2 * s2 * s2);
        const double e = trunc_at(ng.s, 1.0);
        acc[1] += static_cast<long double>(e * e);
        smax = std::max(smax, ng.s);
        for (int k = 0; k < levels; ++k) {
          // w103[k] = v_k^{10/3}; stop once the node drops below the level.
          const double vprev = trunc_at(ng.s, thresholds[k]);
          if (vprev > 0.0) acc[2 + 4 * k + 3] += static_cast<long double>(std::pow(vprev, 10.0 / 3.0));
          const double c = thresholds[k + 1];
          if (ng.s < c && vprev <= 0.0) break;
          const double v = trunc_at(ng.s, c);
          acc[2 + 4 * k + 0] += static_cast<long double>(v * v);
          acc[2 + 4 * k + 1] += static_cast<long double>(diss2_at(ng, c, v));
          if (v > 0.0) acc[2 + 4 * k + 2] += 1.0L;
        }
      }
      block_max[b] = smax;
    }
  });

  SnapshotLevels out;
  out.v2.assign(static_cast<std::size_t>(levels) + 1, 0.0);
  out.d2.assign(static_cast<std::size_t>(levels) + 1, 0.0);
  out.chi.assign(static_cast<std::size_t>(levels) + 1, 0.0);
  out.w103.assign(static_cast<std::size_t>(levels), 0.0);
  const double vol = grid.cell_volume();
  long double s6 = 0.0L, excess2 = 0.0L;
  std::vector<long double> sums(width - 2, 0.0L);
  for (std::size_t b = 0; b < nblocks; ++b) {
    const long double* acc = partial.data() + b * width;
    s6 += acc[0];
    excess2 += acc[1];
    for (std::size_t q = 0; q + 2 < width; ++q) sums[q] += acc[q + 2];
    out.smax = std::max(out.smax, block_max[b]);
  }
  out.s6 = static_cast<double>(s6) * vol;
  out.excess2 = static_cast<double>(excess2) * vol;
  for (int k = 0; k < levels; ++k) {
    out.v2[k + 1] = static_cast<double>(sums[4 * k + 0]) * vol;
    out.d2[k + 1] = static_cast<double>(sums[4 * k + 1]) * vol;
    out.chi[k + 1] = static_cast<double>(sums[4 * k + 2]) * vol;
    out.w103[k] = static_cast<double>(sums[4 * k + 3]) * vol;
  }
  return out;
}

void require_slab_coverage(const Trajectory& traj, double t_start, double t_end,
                           const char* what) {
  if (traj.times.empty() || traj.times.front() > t_start + kTimeSlack ||
      traj.times.back() < t_end - kTimeSlack) {
    throw std::invalid_argument(std::string(what) +
                                ": trajectory snapshots do not cover the requested slab");
  }
}

/// Signed pressure work int (v_k/|u|) u . grad P dx for one snapshot.
double pressure_work(const VelocityField& u, int k) {
  const GridSpec& grid = u.grid();
  const std::size_t nodes = grid.node_count();
  const VectorField grad_p = solve_pressure_gradient(u);
  const double c = level_threshold(k);

  const std::size_t nblocks = (nodes + kReduceBlock - 1) / kReduceBlock;
  std::vector<long double> partial(nblocks, 0.0L);
  parallel_for(nblocks, [&](std::size_t blo, std::size_t bhi) {
    for (std::size_t b = blo; b < bhi; ++b) {
      long double acc = 0.0L;
      const std::size_t mlo = b * kReduceBlock;
      const std::size_t mhi = std::min(nodes, mlo + kReduceBlock);
      for (std::size_t m = mlo; m < mhi; ++m) {
        double uu[3];
        double s2 = 0.0;
        for (int i = 0; i < 3; ++i) {
          uu[i] = u.component(i).values()[m];
          s2 += uu[i] * uu[i];
        }
        const double s = std::sqrt(s2);
        if (s <= kMagnitudeFloor) continue;
        const double v = trunc_at(s, c);
        if (v <= 0.0) continue;
        double dot = 0.0;
        for (int i = 0; i < 3; ++i) dot += uu[i] * grad_p.component(i).values()[m];
        acc += static_cast<long double>((v / s) * dot);
      }
      partial[b] = acc;
    }
  });
  long double total = 0.0L;
  for (long double p : partial) total += p;
  return static_cast<double>(total) * grid.cell_volume();
}

/// Trapezoid prefix sums matching pwl_integral over full cells:
/// cum[j] = integral of the interpolant from times[0] to times[j].
std::vector<double> prefix_integral(const std::vector<double>& times,
                                    const std::vector<double>& values) {
  std::vector<double> cum(times.size(), 0.0);
  for (std::size_t j = 1; j < times.size(); ++j) {
    cum[j] = cum[j - 1] + 0.5 * (values[j - 1] + values[j]) * (times[j] - times[j - 1]);
  }
  return cum;
}

}  // namespace

double level_threshold(int k) {
  require_level(k, 0);
  return 1.0 - std::ldexp(1.0, -k);
}

SlabSpec SlabSpec::for_level(int k) {
  require_level(k, 0);
  SlabSpec slab;
  slab.level = k;
  slab.t_start = -0.5 * (1.0 + std::ldexp(1.0, -k));
  slab.t_end = 1.0;
  return slab;
}

ScalarField truncate(const VelocityField& u, int k) {
  require_level(k, 0);
  const double c = level_threshold(k);
  const std::size_t nodes = u.grid().node_count();
  ScalarField v(u.grid());
  parallel_for(nodes, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t m = lo; m < hi; ++m) {
      const double s = std::sqrt(u.component(0).values()[m] * u.component(0).values()[m] +
                                 u.component(1).values()[m] * u.component(1).values()[m] +
                                 u.component(2).values()[m] * u.component(2).values()[m]);
      v.values()[m] = trunc_at(s, c);
    }
  });
  return v;
}

ScalarField dissipation(const VelocityField& u, int k) {
  require_level(k, 0);
  const double c = level_threshold(k);
  const TensorField grad = gradient(u);
  const std::size_t nodes = u.grid().node_count();
  ScalarField d(u.grid());
  parallel_for(nodes, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t m = lo; m < hi; ++m) {
      const NodeGrad ng = node_grad(u, grad, m);
      d.values()[m] = std::sqrt(diss2_at(ng, c, trunc_at(ng.s, c)));
    }
  });
  return d;
}

PointwiseReport pointwise_suite(const VelocityField& u, int k) {
  require_level(k, 1);
  const double c = level_threshold(k);
  const TensorField grad = gradient(u);
  const std::size_t nodes = u.grid().node_count();

  PointwiseReport report;
  report.level = k;
  std::mutex merge_mutex;
  parallel_for(nodes, [&](std::size_t lo, std::size_t hi) {
    std::array<double, 5> viol{};
    double dmax = 0.0;
    for (std::size_t m = lo; m < hi; ++m) {
      const NodeGrad ng = node_grad(u, grad, m);
      const double v = trunc_at(ng.s, c);
      const double a = (ng.s > kMagnitudeFloor) ? v / ng.s : 0.0;
      const double d = std::sqrt(diss2_at(ng, c, v));
      dmax = std::max(dmax, d);

      viol[0] = std::max(viol[0], (1.0 - a) * ng.s - c);
      viol[1] = std::max(viol[1], a * std::sqrt(ng.fro2) - d);
      const double grad_v = (v > 0.0) ? std::sqrt(ng.gn2) : 0.0;
      viol[2] = std::max(viol[2], grad_v - d);
      viol[3] = std::max(viol[3], grad_v - d);
      double fro_w2 = 0.0;
      if (v > 0.0) {
        // grad((v_k/|u|) u)_ij = a grad(u)_ij + (c/|u|^2) u_i grad|u|_j.
        const double scale = c / (ng.s * ng.s);
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            const double mij = a * grad.comp(i, j).values()[m] + scale * ng.uu[i] * ng.grad_abs[j];
            fro_w2 += mij * mij;
          }
        }
      }
      viol[4] = std::max(viol[4], std::sqrt(fro_w2) - 3.0 * d);
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    for (int i = 0; i < 5; ++i) {
      report.max_violation[i] = std::max(report.max_violation[i], std::max(0.0, viol[i]));
    }
    report.max_d = std::max(report.max_d, dmax);
  });
  return report;
}

double slab_energy(const Trajectory& traj, const SlabSpec& slab) {
  require_level(slab.level, 0);
  require_slab_coverage(traj, slab.t_start, slab.t_end, "slab_energy");
  const std::size_t count = traj.snapshots.size();
  std::vector<double> half_v2(count, 0.0);
  std::vector<double> d2(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    const double vn = space_norm(truncate(traj.snapshots[j], slab.level), 2.0);
    const double dn = space_norm(dissipation(traj.snapshots[j], slab.level), 2.0);
    half_v2[j] = 0.5 * vn * vn;
    d2[j] = dn * dn;
  }
  double sup_part = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    if (traj.times[j] >= slab.t_start - kTimeSlack && traj.times[j] <= slab.t_end + kTimeSlack) {
      sup_part = std::max(sup_part, half_v2[j]);
    }
  }
  return sup_part + pwl_integral(traj.times, d2, slab.t_start, slab.t_end);
}

ChebyshevPair chebyshev_check(const Trajectory& traj, int k) {
  require_level(k, 1);
  const SlabSpec slab = SlabSpec::for_level(k - 1);
  require_slab_coverage(traj, slab.t_start, slab.t_end, "chebyshev_check");

  const std::size_t count = traj.snapshots.size();
  const double vol = traj.grid.cell_volume();
  const double ck = level_threshold(k);
  std::vector<double> chi(count, 0.0);
  std::vector<double> rhs_density(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    const VelocityField& u = traj.snapshots[j];
    const std::size_t nodes = u.grid().node_count();
    const std::size_t nblocks = (nodes + kReduceBlock - 1) / kReduceBlock;
    std::vector<long double> pchi(nblocks, 0.0L), prhs(nblocks, 0.0L);
    parallel_for(nblocks, [&](std::size_t blo, std::size_t bhi) {
      for (std::size_t b = blo; b < bhi; ++b) {
        long double ac = 0.0L, ar = 0.0L;
        const std::size_t mlo = b * kReduceBlock;
        const std::size_t mhi = std::min(nodes, mlo + kReduceBlock);
        for (std::size_t m = mlo; m < mhi; ++m) {
          const double s = std::sqrt(u.component(0).values()[m] * u.component(0).values()[m] +
                                     u.component(1).values()[m] * u.component(1).values()[m] +
                                     u.component(2).values()[m] * u.component(2).values()[m]);
          if (trunc_at(s, ck) > 0.0) ac += 1.0L;
          const double vprev = trunc_at(s, level_threshold(k - 1));
          if (vprev > 0.0) {
            // 2^{10k/3} v_{k-1}^{10/3} evaluated as (2^k v)^{10/3}: the
            // scaling by an exact power of two keeps the nodewise
            // comparison against the indicator exact in floating point.
            ar += static_cast<long double>(std::pow(std::ldexp(vprev, k), 10.0 / 3.0));
          }
        }
        pchi[b] = ac;
        prhs[b] = ar;
      }
    });
    long double c = 0.0L, r = 0.0L;
    for (std::size_t b = 0; b < nblocks; ++b) {
      c += pchi[b];
      r += prhs[b];
    }
    chi[j] = static_cast<double>(c) * vol;
    rhs_density[j] = static_cast<double>(r) * vol;
  }

  ChebyshevPair pair;
  pair.level = k;
  pair.lhs = pwl_integral(traj.times, chi, slab.t_start, slab.t_end);
  pair.rhs = pwl_integral(traj.times, rhs_density, slab.t_start, slab.t_end);
  return pair;
}

std::optional<double> interpolation_ratio(const std::vector<ScalarField>& fields,
                                          const std::vector<double>& times,
                                          const SlabSpec& slab) {
  if (fields.size() != times.size() || fields.size() < 2) {
    throw std::invalid_argument("interpolation_ratio: need matching fields and times");
  }
  if (times.front() > slab.t_start + kTimeSlack || times.back() < slab.t_end - kTimeSlack) {
    throw std::invalid_argument("interpolation_ratio: snapshots do not cover the slab");
  }
  const GridSpec& grid = fields.front().grid();
  const std::size_t count = fields.size();
  std::vector<double> l2sq(count, 0.0), grad2(count, 0.0), p103(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    const ScalarField& f = fields[j];
    const VectorField g = gradient(f);
    long double sl2 = 0.0L, sg2 = 0.0L, sp = 0.0L;
    for (std::size_t m = 0; m < f.values().size(); ++m) {
      const double fv = f.values()[m];
      sl2 += static_cast<long double>(fv * fv);
      sp += static_cast<long double>(std::pow(std::abs(fv), 10.0 / 3.0));
      for (int c = 0; c < 3; ++c) {
        const double gv = g.component(c).values()[m];
        sg2 += static_cast<long double>(gv * gv);
      }
    }
    l2sq[j] = static_cast<double>(sl2) * grid.cell_volume();
    grad2[j] = static_cast<double>(sg2) * grid.cell_volume();
    p103[j] = static_cast<double>(sp) * grid.cell_volume();
  }

  const double num = std::pow(pwl_integral(times, p103, slab.t_start, slab.t_end), 0.3);
  double sup_l2 = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    if (times[j] >= slab.t_start - kTimeSlack && times[j] <= slab.t_end + kTimeSlack) {
      sup_l2 = std::max(sup_l2, std::sqrt(l2sq[j]));
    }
  }
  const double grad_l2 = std::sqrt(pwl_integral(times, grad2, slab.t_start, slab.t_end));
  const double l2_time = std::sqrt(pwl_integral(times, l2sq, slab.t_start, slab.t_end));
  const double den =
      std::pow(sup_l2, 0.4) * std::pow(grad_l2 + l2_time / grid.box_length, 0.6);
  if (!(den > 1e-300)) return std::nullopt;
  return num / den;
}

LevelEnergyReport level_energy_inequality(const Trajectory& traj, int k) {
  require_level(k, 1);
  const SlabSpec outer = SlabSpec::for_level(k - 1);
  const SlabSpec inner = SlabSpec::for_level(k);
  require_slab_coverage(traj, outer.t_start, outer.t_end, "level_energy_inequality");

  const std::size_t count = traj.snapshots.size();
  std::vector<double> half_v2(count, 0.0), d2(count, 0.0), work(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    const SnapshotLevels sl = measure_snapshot(traj.snapshots[j], k);
    half_v2[j] = 0.5 * sl.v2[k];
    d2[j] = sl.d2[k];
    // The right side carries the signed pressure work -int (v_k/|u|) u . grad P.
    work[j] = -pressure_work(traj.snapshots[j], k);
  }
  const std::vector<double> cum_d = prefix_integral(traj.times, d2);
  const std::vector<double> cum_w = prefix_integral(traj.times, work);

  LevelEnergyReport report;
  report.level = k;
  double sup_outer = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    if (traj.times[j] >= outer.t_start - kTimeSlack) {
      sup_outer = std::max(sup_outer, 2.0 * half_v2[j]);
    }
  }
  report.scale = pwl_integral(traj.times, d2, outer.t_start, outer.t_end) + sup_outer + kFitFloor;
  for (std::size_t i = 0; i < count; ++i) {
    const double sigma = traj.times[i];
    if (sigma < outer.t_start - kTimeSlack || sigma > inner.t_start + kTimeSlack) continue;
    for (std::size_t j = i; j < count; ++j) {
      const double t = traj.times[j];
      if (t < inner.t_start - kTimeSlack) continue;
      const double lhs = half_v2[j] + (cum_d[j] - cum_d[i]);
      const double rhs = half_v2[i] + (cum_w[j] - cum_w[i]);
      report.max_residual = std::max(report.max_residual, lhs - rhs);
      ++report.pair_count;
    }
  }
  report.max_residual = std::max(report.max_residual, 0.0);
  if (report.pair_count == 0) {
    throw std::invalid_argument("level_energy_inequality: no snapshot pairs in the slab");
  }
  return report;
}

EnergyLedger build_ledger(const Trajectory& traj, int levels) {
  require_level(levels, 1);
  require_slab_coverage(traj, -1.0, 1.0, "build_ledger");

  const std::size_t count = traj.snapshots.size();
  EnergyLedger ledger;
  ledger.levels = levels;
  ledger.snapshot_count = static_cast<int>(count);
  ledger.snapshot_dt = count > 1 ? traj.times[1] - traj.times[0] : 0.0;

  std::vector<double> s6(count, 0.0);
  std::vector<std::vector<double>> half_v2(levels + 1, std::vector<double>(count, 0.0));
  std::vector<std::vector<double>> d2(levels + 1, std::vector<double>(count, 0.0));
  for (std::size_t j = 0; j < count; ++j) {
    const SnapshotLevels sl = measure_snapshot(traj.snapshots[j], levels);
    s6[j] = sl.s6;
    for (int k = 1; k <= levels; ++k) {
      half_v2[k][j] = 0.5 * sl.v2[k];
      d2[k][j] = sl.d2[k];
    }
    if (traj.times[j] >= -0.5 - kTimeSlack) {
      ledger.terminal_excess = std::max(ledger.terminal_excess, 0.5 * sl.excess2);
      ledger.max_abs_u_late = std::max(ledger.max_abs_u_late, sl.smax);
    }
  }

  ledger.u_seq.resize(levels);
  for (int k = 1; k <= levels; ++k) {
    const SlabSpec slab = SlabSpec::for_level(k);
    double sup_part = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      if (traj.times[j] >= slab.t_start - kTimeSlack) {
        sup_part = std::max(sup_part, half_v2[k][j]);
      }
    }
    ledger.u_seq[k - 1] = sup_part + pwl_integral(traj.times, d2[k], slab.t_start, slab.t_end);
  }

  const double slab6 = pwl_integral(traj.times, s6, -1.0, 1.0);
  ledger.slab_l6 = std::pow(std::max(slab6, 0.0), 1.0 / 6.0);
  if (slab6 > kFitFloor) {
    ledger.measured_a = ledger.u_seq[0] / slab6;
  }
  std::optional<double> best_b;
  for (int k = 2; k <= levels; ++k) {
    const double prev = ledger.u_seq[k - 2];
    if (prev <= kFitFloor) continue;
    const double ratio =
        ledger.u_seq[k - 1] / (std::pow(2.0, 7.0 * k / 3.0) * std::pow(prev, ledger.beta));
    best_b = std::max(best_b.value_or(0.0), ratio);
  }
  ledger.measured_b = best_b;
  return ledger;
}

}  // namespace dgns
