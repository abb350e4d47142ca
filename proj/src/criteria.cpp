#include "dgns/criteria.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dgns/operators.hpp"
#include "dgns/util.hpp"

namespace dgns {
namespace {

constexpr double kPairingTol = 1e-12;
constexpr double kTimeSlack = 1e-9;

CriterionReport make_report(CriterionKind kind, const Trajectory& traj, double p, double q) {
  CriterionReport report;
  report.kind = kind;
  report.p = p;
  report.q = q;
  report.window_start = traj.t_start();
  report.window_end = traj.t_end();
  report.dt = traj.dt;
  report.n = traj.grid.n;
  report.box_length = traj.grid.box_length;
  return report;
}

void require_pairing(double p, double q, double target, const char* what) {
  if (!(p >= 1.0) || !(q >= 1.0) || !std::isfinite(p) || !std::isfinite(q)) {
    throw std::invalid_argument(std::string(what) + ": exponents must be finite and >= 1");
  }
  const double residual = 2.0 / p + 3.0 / q - target;
  if (std::abs(residual) > kPairingTol) {
    throw std::invalid_argument(std::string(what) + ": exponents violate 2/p + 3/q = " +
                                std::to_string(target) + " (residual " +
                                std::to_string(residual) + ")");
  }
}

std::vector<double> prefix_integral(const std::vector<double>& times,
                                    const std::vector<double>& values) {
  std::vector<double> cum(times.size(), 0.0);
  for (std::size_t j = 1; j < times.size(); ++j) {
    cum[j] = cum[j - 1] + 0.5 * (values[j - 1] + values[j]) * (times[j] - times[j - 1]);
  }
  return cum;
}

}  // namespace

const char* criterion_name(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::log_prodi_serrin: return "log_prodi_serrin";
    case CriterionKind::prodi_serrin: return "prodi_serrin";
    case CriterionKind::montgomery_smith: return "montgomery_smith";
    case CriterionKind::vorticity_l1: return "vorticity_l1";
    case CriterionKind::gradient_lpq: return "gradient_lpq";
  }
  return "unknown";
}

ScalarField log_ps_density(const VelocityField& u) {
  const std::size_t nodes = u.grid().node_count();
  ScalarField density(u.grid());
  parallel_for(nodes, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t m = lo; m < hi; ++m) {
      const double s = std::sqrt(u.component(0).values()[m] * u.component(0).values()[m] +
                                 u.component(1).values()[m] * u.component(1).values()[m] +
                                 u.component(2).values()[m] * u.component(2).values()[m]);
      density.values()[m] = s > 0.0 ? s * s * s * s * s / std::log1p(s) : 0.0;
    }
  });
  return density;
}

double log_ps_integral(const VelocityField& u) { return box_integral(log_ps_density(u)); }

CriterionReport log_prodi_serrin(const Trajectory& traj) {
  traj.validate();
  std::vector<double> g(traj.snapshots.size(), 0.0);
  for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
    g[j] = log_ps_integral(traj.snapshots[j]);
  }
  CriterionReport report = make_report(CriterionKind::log_prodi_serrin, traj, 0.0, 0.0);
  report.value = pwl_integral(traj.times, g, traj.t_start(), traj.t_end());
  return report;
}

CriterionReport prodi_serrin(const Trajectory& traj, double p, double q) {
  traj.validate();
  require_pairing(p, q, 1.0, "prodi_serrin");
  if (!(p >= 2.0)) throw std::invalid_argument("prodi_serrin: need p >= 2");
  CriterionReport report = make_report(CriterionKind::prodi_serrin, traj, p, q);
  report.value = slab_norm(traj, traj.t_start(), traj.t_end(), p, q);
  return report;
}

CriterionReport montgomery_smith(const Trajectory& traj, double p, double q) {
  traj.validate();
  require_pairing(p, q, 1.0, "montgomery_smith");
  std::vector<double> integrand(traj.snapshots.size(), 0.0);
  for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
    const double nq = space_norm(traj.snapshots[j], q);
    const double log_plus = std::max(0.0, std::log(std::max(nq, 1e-300)));
    integrand[j] = std::pow(nq, p) / (1.0 + log_plus);
  }
  CriterionReport report = make_report(CriterionKind::montgomery_smith, traj, p, q);
  report.value = pwl_integral(traj.times, integrand, traj.t_start(), traj.t_end());
  return report;
}

CriterionReport vorticity_criterion(const Trajectory& traj) {
  traj.validate();
  CriterionReport report = make_report(CriterionKind::vorticity_l1, traj, 0.0, 1.0);
  for (const VelocityField& u : traj.snapshots) {
    report.value = std::max(report.value, space_norm(curl(u), 1.0));
  }
  report.note =
      "sup-in-time of the L1 vorticity norm; the classical blow-up criterion "
      "controls the time integral of the L-infinity norm instead";
  return report;
}

CriterionReport gradient_criterion(const Trajectory& traj, double p, double q) {
  traj.validate();
  require_pairing(p, q, 2.0, "gradient_lpq");
  if (!(p > 1.0)) throw std::invalid_argument("gradient_lpq: need p > 1");
  std::vector<ScalarField> mags;
  mags.reserve(traj.snapshots.size());
  for (const VelocityField& u : traj.snapshots) {
    const TensorField grad = gradient(u);
    ScalarField mag(u.grid());
    const std::size_t nodes = u.grid().node_count();
    parallel_for(nodes, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t m = lo; m < hi; ++m) {
        double fro2 = 0.0;
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            const double gij = grad.comp(i, j).values()[m];
            fro2 += gij * gij;
          }
        }
        mag.values()[m] = std::sqrt(fro2);
      }
    });
    mags.push_back(std::move(mag));
  }
  CriterionReport report = make_report(CriterionKind::gradient_lpq, traj, p, q);
  report.value =
      slab_norm_scalar(mags, traj.times, traj.t_start(), traj.t_end(), p, q);
  return report;
}

Trajectory rescale(const Trajectory& traj, double eps) {
  traj.validate();
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("rescale: eps must be positive and finite");
  }
  Trajectory out;
  out.grid = traj.grid;
  out.grid.box_length = traj.grid.box_length / eps;
  out.dt = traj.dt / (eps * eps);
  out.times.reserve(traj.times.size());
  for (double t : traj.times) out.times.push_back(t / (eps * eps));
  out.snapshots.reserve(traj.snapshots.size());
  for (const VelocityField& u : traj.snapshots) {
    VelocityField v(out.grid);
    for (int c = 0; c < 3; ++c) {
      const std::span<const double> src = u.component(c).values();
      const std::span<double> dst = v.component(c).values();
      for (std::size_t m = 0; m < src.size(); ++m) dst[m] = eps * src[m];
    }
    out.snapshots.push_back(std::move(v));
  }
  out.series_times.reserve(traj.series_times.size());
  for (double t : traj.series_times) out.series_times.push_back(t / (eps * eps));
  for (double e : traj.series_kinetic_energy) {
    out.series_kinetic_energy.push_back(e / eps);
  }
  for (double z : traj.series_enstrophy) out.series_enstrophy.push_back(z * eps);
  return out;
}

AffineReport affine_linf_check(const Trajectory& traj, double lambda) {
  traj.validate();
  const double span = traj.t_end() - traj.t_start();
  if (!(lambda > 0.0) || !(lambda <= span)) {
    throw std::invalid_argument("affine_linf_check: lambda must lie in (0, window span]");
  }
  std::vector<double> s6(traj.snapshots.size(), 0.0);
  std::vector<double> sup(traj.snapshots.size(), 0.0);
  for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
    const ScalarField mag = magnitude(traj.snapshots[j]);
    long double acc = 0.0L;
    for (double v : mag.values()) {
      const double v2 = v * v;
      acc += static_cast<long double>(v2 * v2 * v2);
    }
    s6[j] = static_cast<double>(acc) * traj.grid.cell_volume();
    sup[j] = space_norm(traj.snapshots[j], std::numeric_limits<double>::infinity());
  }
  const std::vector<double> cum = prefix_integral(traj.times, s6);

  AffineReport report;
  report.lambda = lambda;
  const double t0 = traj.t_start();
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    const double ratio = sup[j] / (1.0 + cum[j]);
    if (traj.times[j] >= t0 + lambda - kTimeSlack) {
      report.a_measured = std::max(report.a_measured, ratio);
    }
    if (traj.times[j] >= t0 + 0.25 * lambda - kTimeSlack) {
      report.a_measured_quarter = std::max(report.a_measured_quarter, ratio);
    }
  }
  return report;
}

}  // namespace dgns
