#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <limits>
#include <optional>
#include <vector>

#include "dgns/checkpoint.hpp"
#include "dgns/criteria.hpp"
#include "dgns/degiorgi.hpp"
#include "dgns/experiment.hpp"
#include "dgns/gronwall.hpp"
#include "dgns/initial_conditions.hpp"
#include "dgns/iteration.hpp"
#include "dgns/operators.hpp"
#include "dgns/pressure.hpp"
#include "dgns/run_config.hpp"
#include "dgns/solver.hpp"
#include "dgns/spectral.hpp"

namespace py = pybind11;
using dgns::GridSpec;
using dgns::ScalarField;
using dgns::Trajectory;
using dgns::VelocityField;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

ScalarField scalar_from(const GridSpec& grid, const DoubleArray& array) {
  if (array.ndim() != 3 || array.shape(0) != grid.n || array.shape(1) != grid.n ||
      array.shape(2) != grid.n) {
    throw std::invalid_argument("expected a (n, n, n) array matching the grid");
  }
  ScalarField field(grid);
  std::memcpy(field.values().data(), array.data(), sizeof(double) * grid.node_count());
  return field;
}

py::array_t<double> scalar_to(const ScalarField& field) {
  const int n = field.grid().n;
  py::array_t<double> array({n, n, n});
  std::memcpy(array.mutable_data(), field.values().data(),
              sizeof(double) * field.grid().node_count());
  return array;
}

VelocityField vector_from(const GridSpec& grid, const DoubleArray& array) {
  if (array.ndim() != 4 || array.shape(0) != 3 || array.shape(1) != grid.n ||
      array.shape(2) != grid.n || array.shape(3) != grid.n) {
    throw std::invalid_argument("expected a (3, n, n, n) array matching the grid");
  }
  VelocityField field(grid);
  const std::size_t nodes = grid.node_count();
  for (int c = 0; c < 3; ++c) {
    std::memcpy(field.component(c).values().data(), array.data() + c * nodes,
                sizeof(double) * nodes);
  }
  return field;
}

py::array_t<double> vector_to(const VelocityField& field) {
  const int n = field.grid().n;
  const std::size_t nodes = field.grid().node_count();
  py::array_t<double> array({3, n, n, n});
  for (int c = 0; c < 3; ++c) {
    std::memcpy(array.mutable_data() + c * nodes, field.component(c).values().data(),
                sizeof(double) * nodes);
  }
  return array;
}

Trajectory traj_from(const GridSpec& grid, const std::vector<double>& times,
                     const DoubleArray& snapshots) {
  if (snapshots.ndim() != 5 || snapshots.shape(1) != 3 || snapshots.shape(2) != grid.n ||
      snapshots.shape(3) != grid.n || snapshots.shape(4) != grid.n ||
      static_cast<std::size_t>(snapshots.shape(0)) != times.size()) {
    throw std::invalid_argument("expected times (J,) and snapshots (J, 3, n, n, n)");
  }
  Trajectory traj;
  traj.grid = grid;
  traj.times = times;
  traj.dt = times.size() > 1 ? times[1] - times[0] : 0.0;
  const std::size_t nodes = grid.node_count();
  for (py::ssize_t j = 0; j < snapshots.shape(0); ++j) {
    VelocityField u(grid);
    for (int c = 0; c < 3; ++c) {
      std::memcpy(u.component(c).values().data(),
                  snapshots.data() + (j * 3 + c) * static_cast<py::ssize_t>(nodes),
                  sizeof(double) * nodes);
    }
    traj.snapshots.push_back(std::move(u));
  }
  traj.validate();
  return traj;
}

py::dict trajectory_to_dict(const Trajectory& traj) {
  py::dict out;
  out["times"] = py::cast(traj.times);
  const py::ssize_t count = static_cast<py::ssize_t>(traj.snapshots.size());
  const int n = traj.grid.n;
  py::array_t<double> snaps({count, static_cast<py::ssize_t>(3), static_cast<py::ssize_t>(n),
                             static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(n)});
  const std::size_t nodes = traj.grid.node_count();
  for (py::ssize_t j = 0; j < count; ++j) {
    for (int c = 0; c < 3; ++c) {
      std::memcpy(snaps.mutable_data() + (j * 3 + c) * static_cast<py::ssize_t>(nodes),
                  traj.snapshots[j].component(c).values().data(), sizeof(double) * nodes);
    }
  }
  out["snapshots"] = snaps;
  out["box_length"] = traj.grid.box_length;
  out["dt"] = traj.dt;
  out["series_times"] = py::cast(traj.series_times);
  out["series_kinetic_energy"] = py::cast(traj.series_kinetic_energy);
  out["series_enstrophy"] = py::cast(traj.series_enstrophy);
  return out;
}

}  // namespace

PYBIND11_MODULE(_dgns, m) {
  m.doc() = "spectral Navier-Stokes truncation diagnostics";

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](int n, double box_length, double dealias_fraction) {
             GridSpec grid{n, box_length, dealias_fraction};
             grid.validate();
             return grid;
           }),
           py::arg("n"), py::arg("box_length"), py::arg("dealias_fraction") = 2.0 / 3.0)
      .def_readonly("n", &GridSpec::n)
      .def_readonly("box_length", &GridSpec::box_length)
      .def_readonly("dealias_fraction", &GridSpec::dealias_fraction)
      .def_property_readonly("spacing", &GridSpec::spacing);

  py::class_<dgns::EnergyLedger>(m, "EnergyLedger")
      .def_readonly("levels", &dgns::EnergyLedger::levels)
      .def_readonly("beta", &dgns::EnergyLedger::beta)
      .def_readonly("u_seq", &dgns::EnergyLedger::u_seq)
      .def_readonly("slab_l6", &dgns::EnergyLedger::slab_l6)
      .def_readonly("measured_a", &dgns::EnergyLedger::measured_a)
      .def_readonly("measured_b", &dgns::EnergyLedger::measured_b)
      .def_readonly("terminal_excess", &dgns::EnergyLedger::terminal_excess)
      .def_readonly("max_abs_u_late", &dgns::EnergyLedger::max_abs_u_late);

  m.def("taylor_green",
        [](const GridSpec& grid, double amplitude) {
          return vector_to(dgns::taylor_green(grid, amplitude));
        },
        py::arg("grid"), py::arg("amplitude") = 1.0);
  m.def("abc_flow",
        [](const GridSpec& grid, double a, double b, double c) {
          return vector_to(dgns::abc_flow(grid, a, b, c));
        },
        py::arg("grid"), py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("c") = 1.0);
  m.def("random_divergence_free",
        [](const GridSpec& grid, std::uint64_t seed, double energy, double slope) {
          return vector_to(dgns::random_divergence_free(grid, seed, energy, slope));
        },
        py::arg("grid"), py::arg("seed"), py::arg("energy"), py::arg("spectrum_slope") = -2.0);

  m.def("step",
        [](const GridSpec& grid, const DoubleArray& u, double dt, double viscosity) {
          return vector_to(dgns::step(vector_from(grid, u), dt, viscosity));
        },
        py::arg("grid"), py::arg("u"), py::arg("dt"), py::arg("viscosity") = 1.0);
  m.def("simulate",
        [](const GridSpec& grid, const DoubleArray& u, double dt, double t_end,
           double viscosity, int stride) {
          dgns::SolverConfig cfg;
          cfg.dt = dt;
          cfg.t_end = t_end;
          cfg.viscosity = viscosity;
          cfg.snapshot_stride = stride;
          return trajectory_to_dict(dgns::simulate(vector_from(grid, u), cfg));
        },
        py::arg("grid"), py::arg("u"), py::arg("dt"), py::arg("t_end"),
        py::arg("viscosity") = 1.0, py::arg("snapshot_stride") = 1);

  m.def("divergence",
        [](const GridSpec& grid, const DoubleArray& u) {
          return scalar_to(dgns::divergence(vector_from(grid, u)));
        },
        py::arg("grid"), py::arg("u"));
  m.def("curl",
        [](const GridSpec& grid, const DoubleArray& u) {
          return vector_to(dgns::curl(vector_from(grid, u)));
        },
        py::arg("grid"), py::arg("u"));
  m.def("leray_project",
        [](const GridSpec& grid, const DoubleArray& u) {
          return vector_to(dgns::leray_project(vector_from(grid, u)));
        },
        py::arg("grid"), py::arg("u"));
  m.def("space_norm",
        [](const GridSpec& grid, const DoubleArray& u, double p) {
          return dgns::space_norm(vector_from(grid, u), p);
        },
        py::arg("grid"), py::arg("u"), py::arg("p"));
  m.def("space_norm_inf", [](const GridSpec& grid, const DoubleArray& u) {
    return dgns::space_norm(vector_from(grid, u), std::numeric_limits<double>::infinity());
  });

  m.def("solve_pressure",
        [](const GridSpec& grid, const DoubleArray& u) {
          return scalar_to(dgns::solve_pressure(vector_from(grid, u)));
        },
        py::arg("grid"), py::arg("u"));
  m.def("riesz_apply",
        [](const GridSpec& grid, const DoubleArray& f, int i, int j) {
          return scalar_to(dgns::riesz_apply(scalar_from(grid, f), i, j));
        },
        py::arg("grid"), py::arg("f"), py::arg("i"), py::arg("j"));
  m.def("split_pressure",
        [](const GridSpec& grid, const DoubleArray& u, int k) {
          const dgns::PressureSplit split = dgns::split_pressure(vector_from(grid, u), k);
          py::dict out;
          out["level"] = split.level;
          out["p_k1"] = scalar_to(split.p_k1);
          out["p_k2"] = scalar_to(split.p_k2);
          out["grad_p_k2"] = vector_to(split.grad_p_k2);
          return out;
        },
        py::arg("grid"), py::arg("u"), py::arg("k"));

  m.def("truncate",
        [](const GridSpec& grid, const DoubleArray& u, int k) {
          return scalar_to(dgns::truncate(vector_from(grid, u), k));
        },
        py::arg("grid"), py::arg("u"), py::arg("k"));
  m.def("dissipation",
        [](const GridSpec& grid, const DoubleArray& u, int k) {
          return scalar_to(dgns::dissipation(vector_from(grid, u), k));
        },
        py::arg("grid"), py::arg("u"), py::arg("k"));
  m.def("pointwise_suite",
        [](const GridSpec& grid, const DoubleArray& u, int k) {
          const dgns::PointwiseReport report = dgns::pointwise_suite(vector_from(grid, u), k);
          py::dict out;
          out["level"] = report.level;
          out["max_violation"] = py::cast(std::vector<double>(report.max_violation.begin(),
                                                              report.max_violation.end()));
          out["max_d"] = report.max_d;
          return out;
        },
        py::arg("grid"), py::arg("u"), py::arg("k"));
  m.def("build_ledger",
        [](const GridSpec& grid, const std::vector<double>& times, const DoubleArray& snapshots,
           int levels) { return dgns::build_ledger(traj_from(grid, times, snapshots), levels); },
        py::arg("grid"), py::arg("times"), py::arg("snapshots"), py::arg("levels"));
  m.def("smallness_gate", [](const dgns::EnergyLedger& ledger) {
    const dgns::GateVerdict verdict = dgns::smallness_gate(ledger);
    py::dict out;
    out["log_c_star"] = verdict.log_c_star;
    out["c_star"] = verdict.c_star;
    out["a_gate"] = verdict.a_gate;
    out["b_prime"] = verdict.b_prime;
    out["small_data"] = verdict.small_data;
    out["u_seq_vanishes"] = verdict.u_seq_vanishes;
    out["terminal_ok"] = verdict.terminal_ok;
    out["max_u_le_one"] = verdict.max_u_le_one;
    out["passed"] = verdict.passed ? py::cast(*verdict.passed) : py::none();
    return out;
  });

  m.def("iterate_log", [](double log_b, double beta, double log_a1, int max_steps) {
    const dgns::OrbitResult orbit = dgns::iterate_log(log_b, beta, log_a1, max_steps);
    py::dict out;
    out["log_values"] = py::cast(orbit.log_values);
    out["values"] = py::cast(orbit.values);
    out["diverged"] = orbit.diverged;
    out["converged"] = orbit.converged;
    return out;
  });
  m.def("estimate_threshold", [](double b, double beta, int max_steps) {
    const dgns::ThresholdEstimate est = dgns::estimate_threshold(b, beta, max_steps);
    py::dict out;
    out["log_analytic"] = est.log_analytic;
    out["log_empirical"] = est.log_empirical;
    out["analytic"] = est.analytic;
    out["empirical"] = est.empirical;
    return out;
  }, py::arg("b"), py::arg("beta"), py::arg("max_steps") = 10000);

  m.def("psi", &dgns::psi);
  m.def("capital_psi", &dgns::capital_psi, py::arg("y"), py::arg("a"));

  m.def("log_ps_density",
        [](const GridSpec& grid, const DoubleArray& u) {
          return scalar_to(dgns::log_ps_density(vector_from(grid, u)));
        },
        py::arg("grid"), py::arg("u"));
  m.def("log_ps_integral", [](const GridSpec& grid, const DoubleArray& u) {
    return dgns::log_ps_integral(vector_from(grid, u));
  });

  m.def("write_checkpoint",
        [](const GridSpec& grid, const DoubleArray& u, double time, const std::string& path) {
          dgns::write_checkpoint(vector_from(grid, u), time, path);
        },
        py::arg("grid"), py::arg("u"), py::arg("time"), py::arg("path"));
  m.def("read_checkpoint", [](const std::string& path) {
    const dgns::Checkpoint cp = dgns::read_checkpoint(path);
    py::dict out;
    out["time"] = cp.time;
    out["n"] = cp.field.grid().n;
    out["box_length"] = cp.field.grid().box_length;
    out["u"] = vector_to(cp.field);
    return out;
  });

  m.def("run_experiment_file", [](const std::string& config_path) {
    const dgns::RunConfig config = dgns::RunConfig::parse_file(config_path);
    return dgns::run_experiment(config).dump();
  });
}
