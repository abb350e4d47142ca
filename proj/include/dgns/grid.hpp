#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dgns/util.hpp"

namespace dgns {

/// Uniform periodic grid on [0, box_length)^3 with n points per axis.
/// Node (ix, iy, iz) sits at (ix, iy, iz) * spacing(); storage index is
/// (ix * n + iy) * n + iz, i.e. z fastest.
struct GridSpec {
  int n = 0;
  double box_length = 0.0;
  double dealias_fraction = 2.0 / 3.0;

  double spacing() const { return box_length / n; }
  double cell_volume() const { return spacing() * spacing() * spacing(); }
  std::size_t node_count() const {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  }
  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(ix) * n + iy) * n + iz;
  }
  std::array<double, 3> node(int ix, int iy, int iz) const {
    const double h = spacing();
    return {ix * h, iy * h, iz * h};
  }

  /// Throws std::invalid_argument unless n is a power of two >= 8,
  /// box_length is positive and finite, and dealias_fraction is in (0, 1].
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

/// Real scalar samples on a GridSpec. Value semantics; operations on fields
/// return new fields.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid, double fill = 0.0);
  ScalarField(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator()(int ix, int iy, int iz) const { return values_[grid_.index(ix, iy, iz)]; }
  double& operator()(int ix, int iy, int iz) { return values_[grid_.index(ix, iy, iz)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Throws FieldError naming the first offending node if any sample is
  /// NaN or infinite.
  void require_finite(const char* context) const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Three scalar components on a shared grid. Used for velocities and for
/// generic vector quantities (gradients, vorticity).
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  ScalarField& component(int i) { return comp_[static_cast<std::size_t>(i)]; }
  const ScalarField& component(int i) const { return comp_[static_cast<std::size_t>(i)]; }

  void require_finite(const char* context) const;

 private:
  GridSpec grid_;
  std::array<ScalarField, 3> comp_;
};

using VelocityField = VectorField;

/// Nine components G(i,j) = d u_i / d x_j on a shared grid.
class TensorField {
 public:
  TensorField() = default;
  explicit TensorField(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  ScalarField& comp(int i, int j) { return comp_[static_cast<std::size_t>(3 * i + j)]; }
  const ScalarField& comp(int i, int j) const { return comp_[static_cast<std::size_t>(3 * i + j)]; }

 private:
  GridSpec grid_;
  std::array<ScalarField, 9> comp_;
};

/// Uniformly sampled velocity snapshots, plus the per-step kinetic energy
/// and enstrophy series the solver records (empty for synthetic
/// trajectories).
struct Trajectory {
  GridSpec grid;
  double dt = 0.0;  // snapshot spacing
  std::vector<double> times;
  std::vector<VelocityField> snapshots;

  std::vector<double> series_times;
  std::vector<double> series_kinetic_energy;
  std::vector<double> series_enstrophy;

  double t_start() const { return times.front(); }
  double t_end() const { return times.back(); }

  /// Throws std::invalid_argument unless times are uniformly spaced within
  /// 1e-12 and match snapshots in count (at least one snapshot).
  void validate() const;
};

}  // namespace dgns
