#include "dgns/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "dgns/checkpoint.hpp"
#include "dgns/criteria.hpp"
#include "dgns/degiorgi.hpp"
#include "dgns/gronwall.hpp"
#include "dgns/iteration.hpp"
#include "dgns/operators.hpp"
#include "dgns/solver.hpp"
#include "dgns/svg.hpp"
#include "dgns/util.hpp"

namespace dgns {
namespace {

using nlohmann::json;

json sanitize(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json config_json(const RunConfig& config) {
  json j;
  j["grid"] = {{"n", config.grid.n},
               {"box_length", config.grid.box_length},
               {"dealias_fraction", config.grid.dealias_fraction}};
  j["solver"] = {{"dt", config.solver.dt},
                 {"t_end", config.solver.t_end},
                 {"snapshot_stride", config.solver.snapshot_stride},
                 {"viscosity", config.solver.viscosity}};
  j["initial_condition"] = {{"type", config.initial_condition.type},
                            {"amplitude", config.initial_condition.amplitude},
                            {"abc_a", config.initial_condition.abc_a},
                            {"abc_b", config.initial_condition.abc_b},
                            {"abc_c", config.initial_condition.abc_c},
                            {"seed", config.initial_condition.seed},
                            {"energy", config.initial_condition.energy},
                            {"spectrum_slope", config.initial_condition.spectrum_slope}};
  j["diagnostics"] = {{"levels", config.diagnostics.levels},
                      {"lambda", config.diagnostics.lambda},
                      {"window_a", config.diagnostics.window_a},
                      {"window_b", config.diagnostics.window_b}};
  j["output"] = {{"dir", config.output_dir}};
  return j;
}

struct SnapshotSeries {
  std::vector<double> times;
  std::vector<double> kinetic_energy;
  std::vector<double> enstrophy;
  std::vector<double> linf;
  std::vector<double> g;
  std::vector<double> s6;
};

SnapshotSeries measure_series(const Trajectory& traj) {
  SnapshotSeries series;
  const std::size_t count = traj.snapshots.size();
  series.times = traj.times;
  series.kinetic_energy.resize(count);
  series.enstrophy.resize(count);
  series.linf.resize(count);
  series.g.resize(count);
  series.s6.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const VelocityField& u = traj.snapshots[j];
    const double l2 = space_norm(u, 2.0);
    series.kinetic_energy[j] = 0.5 * l2 * l2;
    const double curl_l2 = space_norm(curl(u), 2.0);
    series.enstrophy[j] = curl_l2 * curl_l2;
    series.linf[j] = space_norm(u, std::numeric_limits<double>::infinity());
    series.g[j] = log_ps_integral(u);
    const ScalarField mag = magnitude(u);
    long double acc = 0.0L;
    for (double v : mag.values()) {
      const double v2 = v * v;
      acc += static_cast<long double>(v2 * v2 * v2);
    }
    series.s6[j] = static_cast<double>(acc) * traj.grid.cell_volume();
  }
  return series;
}

struct GronwallComputation {
  json section;
  std::vector<double> times;
  std::vector<double> f;
  std::vector<double> h;
};

GronwallComputation compute_gronwall(const Trajectory& traj) {
  const std::size_t count = traj.snapshots.size();
  if (count < 4) {
    throw std::invalid_argument("gronwall: need at least 4 snapshots");
  }
  const SnapshotSeries series = measure_series(traj);

  // tau1 and tau2 sit at roughly 10% and 30% of the window, leaving room
  // for the comparison phase after tau2.
  std::size_t j1 = count / 10;
  std::size_t j2 = std::max(j1 + 1, (3 * count) / 10);
  j2 = std::min(j2, count - 2);
  if (j1 >= j2) j1 = j2 - 1;

  // Affine constant: the largest ratio F(t) / (1 + int_tau1^t int |u|^6),
  // measured over the whole window from tau1 so the affine bound holds at
  // every sample by construction.
  std::vector<double> cum(count, 0.0);
  for (std::size_t j = j1 + 1; j < count; ++j) {
    cum[j] = cum[j - 1] +
             0.5 * (series.s6[j - 1] + series.s6[j]) * (series.times[j] - series.times[j - 1]);
  }
  double a_measured = 0.0;
  for (std::size_t j = j1; j < count; ++j) {
    a_measured = std::max(a_measured, series.linf[j] / (1.0 + cum[j]));
  }
  if (!(a_measured > 0.0)) {
    // Identically zero velocity: any positive constant works.
    a_measured = 1.0;
  }

  GronwallProblem problem;
  problem.a_affine = a_measured;
  problem.tau1 = series.times[j1];
  problem.tau2 = series.times[j2];
  problem.times = series.times;
  problem.g = series.g;
  problem.f = series.linf;
  const MajorantResult majorant = integrate_majorant(problem);
  const double comparison = comparison_check(problem, majorant);

  GronwallComputation comp;
  comp.section = {{"A_measured", sanitize(a_measured)},
                  {"H_final", sanitize(majorant.h_final)},
                  {"psi_check", sanitize(majorant.psi_max_violation)},
                  {"tau1", sanitize(problem.tau1)},
                  {"tau2", sanitize(problem.tau2)},
                  {"comparison_max", sanitize(comparison)}};
  comp.times = majorant.times;
  comp.h = majorant.h;
  comp.f.assign(series.linf.begin() + j1, series.linf.end());
  return comp;
}

json ledger_json(const EnergyLedger& ledger) {
  json u = json::array();
  for (double v : ledger.u_seq) u.push_back(sanitize(v));
  return {{"U", u},
          {"measured_A", ledger.measured_a ? sanitize(*ledger.measured_a) : json(nullptr)},
          {"measured_B", ledger.measured_b ? sanitize(*ledger.measured_b) : json(nullptr)},
          {"slab_l6", sanitize(ledger.slab_l6)},
          {"levels", ledger.levels},
          {"beta", ledger.beta},
          {"terminal_excess", sanitize(ledger.terminal_excess)},
          {"max_abs_u_late", sanitize(ledger.max_abs_u_late)},
          {"snapshot_count", ledger.snapshot_count}};
}

json pointwise_json(const Trajectory& rescaled, int levels) {
  const std::size_t count = rescaled.snapshots.size();
  const std::size_t samples = std::min<std::size_t>(count, 8);
  std::set<std::size_t> picks;
  for (std::size_t i = 0; i < samples; ++i) {
    picks.insert(samples == 1 ? 0 : i * (count - 1) / (samples - 1));
  }
  std::array<double, 5> worst{};
  for (std::size_t j : picks) {
    for (int k = 1; k <= levels; ++k) {
      const PointwiseReport report = pointwise_suite(rescaled.snapshots[j], k);
      for (int i = 0; i < 5; ++i) worst[i] = std::max(worst[i], report.max_violation[i]);
    }
  }
  json out = json::array();
  for (double v : worst) out.push_back(sanitize(v));
  return out;
}

json chebyshev_json(const Trajectory& rescaled, int levels) {
  json out = json::array();
  for (int k = 1; k <= levels; ++k) {
    const ChebyshevPair pair = chebyshev_check(rescaled, k);
    out.push_back({{"k", pair.level},
                   {"lhs", sanitize(pair.lhs)},
                   {"rhs", sanitize(pair.rhs)},
                   {"satisfied", pair.lhs <= pair.rhs}});
  }
  return out;
}

json gate_json(const GateVerdict& verdict) {
  return {{"C_star", sanitize(verdict.c_star)},
          {"log10_C_star", sanitize(verdict.log_c_star / std::log(10.0))},
          {"passed", verdict.passed ? json(*verdict.passed) : json(nullptr)},
          {"A_gate", sanitize(verdict.a_gate)},
          {"B_prime", sanitize(verdict.b_prime)},
          {"small_data", verdict.small_data},
          {"u_seq_vanishes", verdict.u_seq_vanishes},
          {"terminal_ok", verdict.terminal_ok},
          {"max_u_le_one", verdict.max_u_le_one}};
}

json criterion_json(const CriterionReport& report) {
  return {{"kind", criterion_name(report.kind)},
          {"p", report.p},
          {"q", report.q},
          {"value", sanitize(report.value)},
          {"window_start", report.window_start},
          {"window_end", report.window_end},
          {"dt", report.dt},
          {"n", report.n},
          {"box_length", report.box_length},
          {"note", report.note}};
}

void write_checkpoints(const Trajectory& traj, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
    char name[32];
    std::snprintf(name, sizeof(name), "snap_%06zu.dgns", j);
    write_checkpoint(traj.snapshots[j], traj.times[j], dir / name);
  }
}

}  // namespace

DiagnosedWindow diagnose_window(const Trajectory& traj, double a, double b) {
  traj.validate();
  if (!(a < b)) throw std::invalid_argument("diagnose_window: need a < b");

  // Snap the window to the nearest snapshot times so the rescaled
  // trajectory covers [-1, 1] exactly.
  const auto nearest = [&](double t) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < traj.times.size(); ++j) {
      if (std::abs(traj.times[j] - t) < std::abs(traj.times[best] - t)) best = j;
    }
    return best;
  };
  const std::size_t ja = nearest(a);
  const std::size_t jb = nearest(b);
  if (jb < ja + 2) {
    throw std::invalid_argument("diagnose_window: window holds fewer than 3 snapshots");
  }
  const double t_a = traj.times[ja];
  const double t_b = traj.times[jb];
  const double eps2 = 0.5 * (t_b - t_a);
  const double eps = std::sqrt(eps2);

  DiagnosedWindow out;
  out.eps = eps;
  out.window_a = t_a;
  out.window_b = t_b;
  out.traj.grid = traj.grid;
  out.traj.grid.box_length = traj.grid.box_length / eps;
  out.traj.dt = traj.dt / eps2;
  for (std::size_t j = ja; j <= jb; ++j) {
    out.traj.times.push_back((traj.times[j] - t_a) / eps2 - 1.0);
    VelocityField v(out.traj.grid);
    for (int c = 0; c < 3; ++c) {
      const std::span<const double> src = traj.snapshots[j].component(c).values();
      const std::span<double> dst = v.component(c).values();
      for (std::size_t m = 0; m < src.size(); ++m) dst[m] = eps * src[m];
    }
    out.traj.snapshots.push_back(std::move(v));
  }
  for (std::size_t i = 0; i < traj.series_times.size(); ++i) {
    const double t = traj.series_times[i];
    if (t < t_a - 1e-12 || t > t_b + 1e-12) continue;
    out.traj.series_times.push_back((t - t_a) / eps2 - 1.0);
    out.traj.series_kinetic_energy.push_back(traj.series_kinetic_energy[i] / eps);
    out.traj.series_enstrophy.push_back(traj.series_enstrophy[i] * eps);
  }
  out.traj.validate();
  return out;
}

void write_series_csv(const std::filesystem::path& path, const Trajectory& traj) {
  const SnapshotSeries series = measure_series(traj);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open series file for writing: " + path.string());
  out.precision(17);
  out << "time,kinetic_energy,enstrophy,linf,G,F\n";
  for (std::size_t j = 0; j < series.times.size(); ++j) {
    out << series.times[j] << "," << series.kinetic_energy[j] << "," << series.enstrophy[j]
        << "," << series.linf[j] << "," << series.g[j] << "," << series.linf[j] << "\n";
  }
  if (!out) throw std::runtime_error("write failed for series file: " + path.string());
}

json empty_report() {
  json report;
  report["config"] = nullptr;
  report["ledger"] = {{"U", nullptr},
                      {"measured_A", nullptr},
                      {"measured_B", nullptr},
                      {"slab_l6", nullptr},
                      {"levels", nullptr},
                      {"beta", nullptr},
                      {"terminal_excess", nullptr},
                      {"max_abs_u_late", nullptr},
                      {"snapshot_count", nullptr}};
  report["pointwise_max_violations"] = nullptr;
  report["chebyshev"] = nullptr;
  report["criteria"] = nullptr;
  report["gronwall"] = {{"A_measured", nullptr}, {"H_final", nullptr},
                        {"psi_check", nullptr},  {"tau1", nullptr},
                        {"tau2", nullptr},       {"comparison_max", nullptr}};
  report["gate"] = {{"C_star", nullptr},        {"log10_C_star", nullptr},
                    {"passed", nullptr},        {"A_gate", nullptr},
                    {"B_prime", nullptr},       {"small_data", nullptr},
                    {"u_seq_vanishes", nullptr}, {"terminal_ok", nullptr},
                    {"max_u_le_one", nullptr}};
  report["error"] = nullptr;
  return report;
}

json diagnostics_json(const Trajectory& rescaled, int levels) {
  const EnergyLedger ledger = build_ledger(rescaled, levels);
  json out;
  out["ledger"] = ledger_json(ledger);
  out["pointwise_max_violations"] = pointwise_json(rescaled, levels);
  out["chebyshev"] = chebyshev_json(rescaled, levels);
  out["gate"] = gate_json(smallness_gate(ledger));
  return out;
}

json criteria_json(const Trajectory& traj) {
  json out = json::array();
  out.push_back(criterion_json(log_prodi_serrin(traj)));
  out.push_back(criterion_json(prodi_serrin(traj, 4.0, 6.0)));
  out.push_back(criterion_json(montgomery_smith(traj, 4.0, 6.0)));
  out.push_back(criterion_json(vorticity_criterion(traj)));
  out.push_back(criterion_json(gradient_criterion(traj, 2.0, 3.0)));
  return out;
}

json gronwall_json(const Trajectory& traj) { return compute_gronwall(traj).section; }

json run_experiment(const RunConfig& config) {
  config.validate();
  const std::filesystem::path out_dir(config.output_dir);
  std::filesystem::create_directories(out_dir);
  std::filesystem::create_directories(out_dir / "plots");

  json report = empty_report();
  report["config"] = config_json(config);
  auto set_error = [&report](const char* stage, const std::string& message) {
    if (report["error"].is_null()) {
      report["error"] = {{"stage", stage}, {"message", message}};
    }
  };

  // Simulation: on blow-up keep the partial trajectory so the raw outputs
  // (checkpoints, series, plots) still get written.
  Trajectory traj;
  bool have_traj = false;
  try {
    const VelocityField u0 = build_initial_condition(config);
    traj = simulate(u0, config.solver);
    have_traj = true;
  } catch (const BlowUpError& e) {
    set_error("simulate", e.what());
    traj = e.partial();
    have_traj = traj.snapshots.size() >= 2;
  } catch (const std::exception& e) {
    set_error("simulate", e.what());
  }

  Trajectory rescaled;
  bool have_rescaled = false;
  if (have_traj && report["error"].is_null()) {
    try {
      const DiagnosedWindow window =
          diagnose_window(traj, config.resolved_window_a(), config.resolved_window_b());
      rescaled = window.traj;
      have_rescaled = true;
    } catch (const std::exception& e) {
      set_error("diagnose", e.what());
    }
  }

  std::optional<EnergyLedger> ledger;
  if (have_rescaled && report["error"].is_null()) {
    try {
      ledger = build_ledger(rescaled, config.diagnostics.levels);
      report["ledger"] = ledger_json(*ledger);
    } catch (const std::exception& e) {
      set_error("ledger", e.what());
    }
  }
  if (ledger && report["error"].is_null()) {
    try {
      report["pointwise_max_violations"] = pointwise_json(rescaled, config.diagnostics.levels);
    } catch (const std::exception& e) {
      set_error("pointwise", e.what());
    }
  }
  if (ledger && report["error"].is_null()) {
    try {
      report["chebyshev"] = chebyshev_json(rescaled, config.diagnostics.levels);
    } catch (const std::exception& e) {
      set_error("chebyshev", e.what());
    }
  }
  if (ledger && report["error"].is_null()) {
    try {
      report["gate"] = gate_json(smallness_gate(*ledger));
    } catch (const std::exception& e) {
      set_error("gate", e.what());
    }
  }
  if (have_traj && report["error"].is_null()) {
    try {
      report["criteria"] = criteria_json(traj);
    } catch (const std::exception& e) {
      set_error("criteria", e.what());
    }
  }
  std::optional<GronwallComputation> gronwall;
  if (have_traj && report["error"].is_null()) {
    try {
      gronwall = compute_gronwall(traj);
      report["gronwall"] = gronwall->section;
    } catch (const std::exception& e) {
      set_error("gronwall", e.what());
    }
  }

  // Raw outputs are written even when a diagnostic stage failed.
  if (have_traj) {
    try {
      write_checkpoints(traj, out_dir / "checkpoints");
      write_series_csv(out_dir / "series.csv", traj);

      const SnapshotSeries series = measure_series(traj);
      write_line_chart(out_dir / "plots" / "series.svg", "simulation series", "t", "value",
                       {{"kinetic energy", series.times, series.kinetic_energy},
                        {"enstrophy", series.times, series.enstrophy},
                        {"sup |u|", series.times, series.linf}},
                       true);
      if (ledger) {
        PlotSeries u_series;
        u_series.label = "U_k";
        for (std::size_t i = 0; i < ledger->u_seq.size(); ++i) {
          u_series.x.push_back(static_cast<double>(i + 1));
          u_series.y.push_back(ledger->u_seq[i]);
        }
        write_line_chart(out_dir / "plots" / "ledger.svg", "truncation energies", "level k",
                         "U_k", {u_series}, true);
      }
      if (gronwall) {
        write_line_chart(out_dir / "plots" / "gronwall.svg", "sup norm vs. majorant", "t",
                         "value",
                         {{"F", gronwall->times, gronwall->f},
                          {"H", gronwall->times, gronwall->h}},
                         false);
      }
    } catch (const std::exception& e) {
      set_error("outputs", e.what());
    }
  }

  std::ofstream out(out_dir / "report.json");
  if (out) {
    out << report.dump(2) << "\n";
  }
  return report;
}

}  // namespace dgns
