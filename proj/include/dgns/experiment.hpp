#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "dgns/grid.hpp"
#include "dgns/run_config.hpp"

namespace dgns {

/// Zoom onto a time window [a, b] (snapped to the nearest snapshot times)
/// and rescale it onto the canonical diagnostic window [-1, 1]: with
/// eps = sqrt((b - a)/2), velocities scale by eps, times map through
/// s = (t - a)/eps^2 - 1, and the box length divides by eps. The result is
/// again a solution trajectory, so every diagnostic applies verbatim.
struct DiagnosedWindow {
  Trajectory traj;
  double eps = 1.0;
  double window_a = 0.0;
  double window_b = 0.0;
};
DiagnosedWindow diagnose_window(const Trajectory& traj, double a, double b);

/// Per-snapshot series written alongside checkpoints: time, kinetic
/// energy, enstrophy, sup norm, the log-weighted density integral G and
/// the comparand F (= sup norm).
void write_series_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Runs the full pipeline for a config: simulate, checkpoint, rescale the
/// diagnostic window, measure the truncation ledger, gate, criteria and
/// the Osgood majorant; writes report.json, series.csv, checkpoints/ and
/// plots/ under the config's output dir. Every stage failure is captured
/// in the report's "error" object and later sections stay null, so the
/// report schema is identical on success and failure.
nlohmann::json run_experiment(const RunConfig& config);

/// Diagnostic sections (ledger, pointwise, chebyshev, gate) computed from
/// an already-rescaled trajectory; shared by run_experiment and the
/// checkpoint-driven CLI path.
nlohmann::json diagnostics_json(const Trajectory& rescaled, int levels);

/// Criterion reports for a raw trajectory with the default exponent pairs.
nlohmann::json criteria_json(const Trajectory& traj);

/// Osgood/Gronwall section computed from per-snapshot series.
nlohmann::json gronwall_json(const Trajectory& traj);

/// The stable all-null report skeleton.
nlohmann::json empty_report();

}  // namespace dgns
