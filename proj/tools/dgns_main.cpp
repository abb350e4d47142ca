#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dgns/checkpoint.hpp"
#include "dgns/criteria.hpp"
#include "dgns/experiment.hpp"
#include "dgns/gronwall.hpp"
#include "dgns/iteration.hpp"
#include "dgns/run_config.hpp"

namespace {

using nlohmann::json;

/// Parses "a:b" into a pair of doubles.
std::pair<double, double> parse_window(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw CLI::ValidationError("--window", "expected the form a:b");
  }
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--window", "expected numeric bounds a:b");
  }
}

struct SeriesFile {
  std::vector<double> times;
  std::vector<double> g;
  std::vector<double> f;
};

SeriesFile read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open series file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty series file: " + path);
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  int time_col = -1, g_col = -1, f_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "time") time_col = static_cast<int>(i);
    if (header[i] == "G") g_col = static_cast<int>(i);
    if (header[i] == "F") f_col = static_cast<int>(i);
  }
  if (time_col < 0 || g_col < 0 || f_col < 0) {
    throw std::runtime_error("series file needs time, G and F columns: " + path);
  }
  SeriesFile series;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("series line " + std::to_string(line_no) +
                                 ": bad number '" + cell + "'");
      }
    }
    if (row.size() != header.size()) {
      throw std::runtime_error("series line " + std::to_string(line_no) +
                               ": wrong column count");
    }
    series.times.push_back(row[time_col]);
    series.g.push_back(row[g_col]);
    series.f.push_back(row[f_col]);
  }
  if (series.times.size() < 3) {
    throw std::runtime_error("series file needs at least 3 rows: " + path);
  }
  return series;
}

double snap_to_sample(const std::vector<double>& times, double t) {
  double best = times.front();
  for (double s : times) {
    if (std::abs(s - t) < std::abs(best - t)) best = s;
  }
  return best;
}

int cmd_simulate(const std::string& config_path) {
  const dgns::RunConfig config = dgns::RunConfig::parse_file(config_path);
  const json report = dgns::run_experiment(config);
  if (!report["error"].is_null()) {
    std::cerr << "experiment failed at stage " << report["error"]["stage"] << ": "
              << report["error"]["message"] << "\n";
    std::cout << "report written to " << config.output_dir << "/report.json\n";
    return 1;
  }
  std::cout << "report written to " << config.output_dir << "/report.json\n";
  const auto& gate = report["gate"];
  std::cout << "gate: small_data=" << gate["small_data"] << " passed=" << gate["passed"]
            << "\n";
  return 0;
}

int cmd_diagnose(const std::string& dir, const std::string& window, int levels,
                 const std::string& out_path) {
  const auto [a, b] = parse_window(window);
  const dgns::Trajectory traj = dgns::load_checkpoint_dir(dir);
  const dgns::DiagnosedWindow diagnosed = dgns::diagnose_window(traj, a, b);
  json out = dgns::diagnostics_json(diagnosed.traj, levels);
  out["eps"] = diagnosed.eps;
  out["window"] = {diagnosed.window_a, diagnosed.window_b};
  std::ofstream file(out_path);
  if (!file) {
    std::cerr << "cannot open output file: " << out_path << "\n";
    return 1;
  }
  file << out.dump(2) << "\n";
  std::cout << "diagnostics written to " << out_path << "\n";
  return 0;
}

int cmd_recurrence(double b, double beta, double a1, int steps) {
  dgns::RecurrenceSpec spec;
  spec.b = b;
  spec.beta = beta;
  spec.a1 = a1;
  spec.max_steps = steps;
  const dgns::OrbitResult orbit = dgns::iterate(spec);
  std::cout << "k,log_a_k,a_k\n";
  for (std::size_t k = 0; k < orbit.log_values.size(); ++k) {
    std::cout << (k + 1) << "," << orbit.log_values[k] << "," << orbit.values[k] << "\n";
  }
  std::cout << (orbit.diverged ? "diverged" : orbit.converged ? "converged" : "undecided")
            << " after " << orbit.log_values.size() << " steps\n";
  const dgns::ThresholdEstimate est = dgns::estimate_threshold(b, beta, steps);
  std::cout << "threshold log a1*: analytic " << est.log_analytic << ", empirical "
            << est.log_empirical << "\n";
  return 0;
}

int cmd_gronwall(const std::string& series_path, double a, double tau1, double tau2) {
  const SeriesFile series = read_series_csv(series_path);
  dgns::GronwallProblem problem;
  problem.times = series.times;
  problem.g = series.g;
  problem.f = series.f;
  problem.tau1 = snap_to_sample(series.times, tau1);
  problem.tau2 = snap_to_sample(series.times, tau2);
  if (a > 0.0) {
    problem.a_affine = a;
  } else {
    // Measure the affine constant from the series itself: the largest
    // F / (1 + int_tau1^t psi(F) G) over the window.
    double accum = 0.0;
    double best = 0.0;
    bool started = false;
    for (std::size_t j = 0; j < series.times.size(); ++j) {
      if (series.times[j] < problem.tau1 - 1e-12) continue;
      if (started) {
        accum += 0.5 *
                 (dgns::psi(series.f[j - 1]) * series.g[j - 1] +
                  dgns::psi(series.f[j]) * series.g[j]) *
                 (series.times[j] - series.times[j - 1]);
      }
      started = true;
      best = std::max(best, series.f[j] / (1.0 + accum));
    }
    problem.a_affine = best > 0.0 ? best : 1.0;
  }
  const dgns::MajorantResult result = dgns::integrate_majorant(problem);
  std::cout << "A = " << problem.a_affine << ", tau1 = " << problem.tau1
            << ", tau2 = " << problem.tau2 << "\n";
  std::cout << "H_final = " << result.h_final << "\n";
  std::cout << "psi_check = " << result.psi_max_violation << "\n";
  std::cout << "max F - H = " << dgns::comparison_check(problem, result) << "\n";
  return result.finite ? 0 : 1;
}

int cmd_criteria(const std::string& dir, const std::string& which, double p, double q) {
  const dgns::Trajectory traj = dgns::load_checkpoint_dir(dir);
  json out = json::array();
  auto emit = [&out](const dgns::CriterionReport& report) {
    out.push_back({{"kind", dgns::criterion_name(report.kind)},
                   {"p", report.p},
                   {"q", report.q},
                   {"value", report.value},
                   {"window_start", report.window_start},
                   {"window_end", report.window_end},
                   {"dt", report.dt},
                   {"n", report.n},
                   {"box_length", report.box_length},
                   {"note", report.note}});
  };
  if (which == "all") {
    for (const auto& item : dgns::criteria_json(traj)) out.push_back(item);
  } else if (which == "log_prodi_serrin") {
    emit(dgns::log_prodi_serrin(traj));
  } else if (which == "prodi_serrin") {
    emit(dgns::prodi_serrin(traj, p, q));
  } else if (which == "montgomery_smith") {
    emit(dgns::montgomery_smith(traj, p, q));
  } else if (which == "vorticity") {
    emit(dgns::vorticity_criterion(traj));
  } else if (which == "gradient") {
    emit(dgns::gradient_criterion(traj, p, q));
  } else {
    std::cerr << "unknown criterion: " << which << "\n";
    return 1;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_report(const std::string& in_path) {
  std::ifstream in(in_path);
  if (!in) {
    std::cerr << "cannot open report: " << in_path << "\n";
    return 1;
  }
  json report;
  try {
    in >> report;
  } catch (const std::exception& e) {
    std::cerr << "invalid report json: " << e.what() << "\n";
    return 1;
  }
  for (const char* key :
       {"config", "ledger", "pointwise_max_violations", "chebyshev", "criteria", "gronwall",
        "gate", "error"}) {
    if (!report.contains(key)) {
      std::cerr << "report is missing the '" << key << "' section\n";
      return 1;
    }
  }
  std::cout << "== ledger ==\n";
  const auto& ledger = report["ledger"];
  std::cout << "  slab_l6:    " << ledger["slab_l6"] << "\n";
  std::cout << "  measured_A: " << ledger["measured_A"] << "\n";
  std::cout << "  measured_B: " << ledger["measured_B"] << "\n";
  if (ledger["U"].is_array()) {
    std::cout << "  U:";
    for (const auto& u : ledger["U"]) std::cout << " " << u;
    std::cout << "\n";
  }
  std::cout << "== gate ==\n";
  const auto& gate = report["gate"];
  std::cout << "  log10_C_star: " << gate["log10_C_star"] << "\n";
  std::cout << "  small_data:   " << gate["small_data"] << "\n";
  std::cout << "  passed:       " << gate["passed"] << "\n";
  std::cout << "== gronwall ==\n";
  const auto& gw = report["gronwall"];
  std::cout << "  A_measured: " << gw["A_measured"] << "\n";
  std::cout << "  H_final:    " << gw["H_final"] << "\n";
  std::cout << "  psi_check:  " << gw["psi_check"] << "\n";
  if (report["criteria"].is_array()) {
    std::cout << "== criteria ==\n";
    for (const auto& c : report["criteria"]) {
      std::cout << "  " << c["kind"].get<std::string>() << ": " << c["value"] << "\n";
    }
  }
  if (!report["error"].is_null()) {
    std::cout << "== error ==\n  stage " << report["error"]["stage"] << ": "
              << report["error"]["message"] << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodic-box Navier-Stokes truncation diagnostics"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* simulate = app.add_subcommand("simulate", "run a configured experiment");
  simulate->add_option("--config", config_path, "experiment config file")->required();

  std::string ckpt_dir, window = "0:1", diag_out = "diagnostics.json";
  int levels = 8;
  CLI::App* diagnose =
      app.add_subcommand("diagnose", "rescale a window of checkpoints and measure the ledger");
  diagnose->add_option("--checkpoints", ckpt_dir, "directory of .dgns files")->required();
  diagnose->add_option("--window", window, "time window a:b")->required();
  diagnose->add_option("--levels", levels, "number of truncation levels");
  diagnose->add_option("--out", diag_out, "output json path");

  double rec_b = 2.0, rec_beta = 19.0 / 18.0, rec_a1 = 1.0;
  int rec_steps = 10000;
  CLI::App* recurrence =
      app.add_subcommand("recurrence", "iterate the superlinear level recurrence");
  recurrence->add_option("--B", rec_b, "base B > 1")->required();
  recurrence->add_option("--beta", rec_beta, "exponent beta > 1");
  recurrence->add_option("--a1", rec_a1, "initial value")->required();
  recurrence->add_option("--steps", rec_steps, "maximum steps");

  std::string series_path;
  double gw_a = 0.0, gw_tau1 = 0.0, gw_tau2 = 0.0;
  CLI::App* gronwall =
      app.add_subcommand("gronwall", "integrate the Osgood majorant for a series file");
  gronwall->add_option("--series", series_path, "series.csv produced by simulate")->required();
  gronwall->add_option("--A", gw_a, "affine constant (<= 0 means measure it)");
  gronwall->add_option("--tau1", gw_tau1, "start of the affine window")->required();
  gronwall->add_option("--tau2", gw_tau2, "start of the comparison window")->required();

  std::string crit_dir, which = "all";
  double crit_p = 4.0, crit_q = 6.0;
  CLI::App* criteria =
      app.add_subcommand("criteria", "evaluate regularity criteria on checkpoints");
  criteria->add_option("--checkpoints", crit_dir, "directory of .dgns files")->required();
  criteria->add_option("--which", which,
                       "all|log_prodi_serrin|prodi_serrin|montgomery_smith|vorticity|gradient");
  criteria->add_option("--p", crit_p, "time exponent");
  criteria->add_option("--q", crit_q, "space exponent");

  std::string report_path;
  CLI::App* report = app.add_subcommand("report", "summarize a report.json");
  report->add_option("--in", report_path, "report.json path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(config_path);
    if (diagnose->parsed()) return cmd_diagnose(ckpt_dir, window, levels, diag_out);
    if (recurrence->parsed()) return cmd_recurrence(rec_b, rec_beta, rec_a1, rec_steps);
    if (gronwall->parsed()) return cmd_gronwall(series_path, gw_a, gw_tau1, gw_tau2);
    if (criteria->parsed()) return cmd_criteria(crit_dir, which, crit_p, crit_q);
    if (report->parsed()) return cmd_report(report_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
