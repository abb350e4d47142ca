#include "dgns/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dgns/initial_conditions.hpp"

namespace dgns {
namespace {

std::string trim(const std::string& s) {
  const std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail_at(int line, const std::string& message) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& value, int line) {
  std::size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &used);
  } catch (const std::exception&) {
    fail_at(line, "expected a number, got '" + value + "'");
  }
  if (used != value.size()) fail_at(line, "trailing characters in number '" + value + "'");
  return parsed;
}

long long parse_int(const std::string& value, int line) {
  std::size_t used = 0;
  long long parsed = 0;
  try {
    parsed = std::stoll(value, &used);
  } catch (const std::exception&) {
    fail_at(line, "expected an integer, got '" + value + "'");
  }
  if (used != value.size()) fail_at(line, "trailing characters in integer '" + value + "'");
  return parsed;
}

}  // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
  RunConfig config;
  std::istringstream stream(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const std::size_t comment = raw.find_first_of("#;");
    if (comment != std::string::npos) raw.erase(comment);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail_at(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "grid" && section != "solver" && section != "initial_condition" &&
          section != "diagnostics" && section != "output") {
        fail_at(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail_at(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail_at(line_no, "empty key or value");
    if (section.empty()) fail_at(line_no, "key '" + key + "' outside any section");

    if (section == "grid") {
      if (key == "n") {
        config.grid.n = static_cast<int>(parse_int(value, line_no));
      } else if (key == "box_length") {
        config.grid.box_length = parse_double(value, line_no);
      } else if (key == "dealias_fraction") {
        config.grid.dealias_fraction = parse_double(value, line_no);
      } else {
        fail_at(line_no, "unknown key '" + key + "' in [grid]");
      }
    } else if (section == "solver") {
      if (key == "dt") {
        config.solver.dt = parse_double(value, line_no);
      } else if (key == "t_end") {
        config.solver.t_end = parse_double(value, line_no);
      } else if (key == "snapshot_stride") {
        config.solver.snapshot_stride = static_cast<int>(parse_int(value, line_no));
      } else if (key == "viscosity") {
        config.solver.viscosity = parse_double(value, line_no);
      } else {
        fail_at(line_no, "unknown key '" + key + "' in [solver]");
      }
    } else if (section == "initial_condition") {
      if (key == "type") {
        config.initial_condition.type = value;
      } else if (key == "amplitude") {
        config.initial_condition.amplitude = parse_double(value, line_no);
      } else if (key == "abc_a") {
        config.initial_condition.abc_a = parse_double(value, line_no);
      } else if (key == "abc_b") {
        config.initial_condition.abc_b = parse_double(value, line_no);
      } else if (key == "abc_c") {
        config.initial_condition.abc_c = parse_double(value, line_no);
      } else if (key == "seed") {
        config.initial_condition.seed = static_cast<std::uint64_t>(parse_int(value, line_no));
      } else if (key == "energy") {
        config.initial_condition.energy = parse_double(value, line_no);
      } else if (key == "spectrum_slope") {
        config.initial_condition.spectrum_slope = parse_double(value, line_no);
      } else {
        fail_at(line_no, "unknown key '" + key + "' in [initial_condition]");
      }
    } else if (section == "diagnostics") {
      if (key == "levels") {
        config.diagnostics.levels = static_cast<int>(parse_int(value, line_no));
      } else if (key == "lambda") {
        config.diagnostics.lambda = parse_double(value, line_no);
      } else if (key == "window_a") {
        config.diagnostics.window_a = parse_double(value, line_no);
      } else if (key == "window_b") {
        config.diagnostics.window_b = parse_double(value, line_no);
      } else {
        fail_at(line_no, "unknown key '" + key + "' in [diagnostics]");
      }
    } else {  // output
      if (key == "dir") {
        config.output_dir = value;
      } else {
        fail_at(line_no, "unknown key '" + key + "' in [output]");
      }
    }
  }
  config.validate();
  return config;
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

double RunConfig::resolved_window_a() const { return diagnostics.window_a; }

double RunConfig::resolved_window_b() const {
  if (diagnostics.window_a == 0.0 && diagnostics.window_b == 0.0) return solver.t_end;
  return diagnostics.window_b;
}

void RunConfig::validate() const {
  grid.validate();
  solver.validate();
  const auto& ic = initial_condition;
  if (ic.type != "taylor_green" && ic.type != "abc" && ic.type != "random") {
    throw std::invalid_argument("initial_condition type must be taylor_green, abc or random");
  }
  if (!(ic.energy >= 0.0) || !std::isfinite(ic.energy)) {
    throw std::invalid_argument("initial_condition energy must be non-negative");
  }
  if (!std::isfinite(ic.amplitude) || !std::isfinite(ic.spectrum_slope)) {
    throw std::invalid_argument("initial_condition parameters must be finite");
  }
  if (diagnostics.levels < 2 || diagnostics.levels > 60) {
    throw std::invalid_argument("diagnostics levels must be in [2, 60]");
  }
  if (!(diagnostics.lambda > 0.0) || !(diagnostics.lambda < 2.0)) {
    throw std::invalid_argument("diagnostics lambda must lie in (0, 2)");
  }
  if (diagnostics.lambda > solver.t_end) {
    throw std::invalid_argument("diagnostics lambda exceeds the simulated time span");
  }
  const double wa = resolved_window_a();
  const double wb = resolved_window_b();
  if (!(wa >= 0.0) || !(wb <= solver.t_end + 1e-12) || !(wb > wa)) {
    throw std::invalid_argument("diagnostics window must satisfy 0 <= a < b <= t_end");
  }
  if (output_dir.empty()) {
    throw std::invalid_argument("output dir must not be empty");
  }
}

VelocityField build_initial_condition(const RunConfig& config) {
  const auto& ic = config.initial_condition;
  if (ic.type == "taylor_green") {
    return taylor_green(config.grid, ic.amplitude);
  }
  if (ic.type == "abc") {
    return abc_flow(config.grid, ic.abc_a, ic.abc_b, ic.abc_c);
  }
  return random_divergence_free(config.grid, ic.seed, ic.energy, ic.spectrum_slope);
}

}  // namespace dgns
