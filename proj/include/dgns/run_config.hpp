#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dgns/grid.hpp"
#include "dgns/solver.hpp"

namespace dgns {

/// Full description of an experiment, parsed from an INI-style file with
/// [grid], [solver], [initial_condition], [diagnostics] and [output]
/// sections. Unknown sections or keys are rejected so typos fail loudly.
struct RunConfig {
  GridSpec grid;
  SolverConfig solver;

  struct InitialCondition {
    std::string type = "taylor_green";  // taylor_green | abc | random
    double amplitude = 1.0;             // taylor_green
    double abc_a = 1.0;                 // abc
    double abc_b = 1.0;
    double abc_c = 1.0;
    std::uint64_t seed = 1;             // random
    double energy = 0.5;
    double spectrum_slope = -2.0;
  } initial_condition;

  struct Diagnostics {
    int levels = 8;
    double lambda = 0.5;
    double window_a = 0.0;  // both 0 means "use [0, t_end]"
    double window_b = 0.0;
  } diagnostics;

  std::string output_dir = "out";

  void validate() const;
  /// Diagnostic window with the [0, t_end] default applied.
  double resolved_window_a() const;
  double resolved_window_b() const;

  static RunConfig parse_file(const std::filesystem::path& path);
  static RunConfig parse_string(const std::string& text);
};

VelocityField build_initial_condition(const RunConfig& config);

}  // namespace dgns
