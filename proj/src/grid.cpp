#include "dgns/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dgns {

void GridSpec::validate() const {
  if (n < 8 || (n & (n - 1)) != 0) {
    std::ostringstream msg;
    msg << "GridSpec: n must be a power of two >= 8, got " << n;
    throw std::invalid_argument(msg.str());
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw std::invalid_argument("GridSpec: box_length must be positive and finite");
  }
  if (!(dealias_fraction > 0.0) || dealias_fraction > 1.0) {
    throw std::invalid_argument("GridSpec: dealias_fraction must lie in (0, 1]");
  }
}

ScalarField::ScalarField(const GridSpec& grid, double fill)
    : grid_(grid), values_(grid.node_count(), fill) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.node_count()) {
    throw std::invalid_argument("ScalarField: value count does not match grid");
  }
}

void ScalarField::require_finite(const char* context) const {
  const int n = grid_.n;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < n; ++iz) {
        const double v = values_[grid_.index(ix, iy, iz)];
        if (!std::isfinite(v)) {
          const auto xyz = grid_.node(ix, iy, iz);
          std::ostringstream msg;
          msg << context << ": non-finite value " << v << " at node (" << ix << ", " << iy << ", "
              << iz << ") = (" << xyz[0] << ", " << xyz[1] << ", " << xyz[2] << ")";
          throw FieldError(msg.str());
        }
      }
    }
  }
}

VectorField::VectorField(const GridSpec& grid)
    : grid_(grid), comp_{ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}

void VectorField::require_finite(const char* context) const {
  for (const auto& c : comp_) c.require_finite(context);
}

TensorField::TensorField(const GridSpec& grid) : grid_(grid) {
  for (auto& c : comp_) c = ScalarField(grid);
}

void Trajectory::validate() const {
  if (snapshots.empty() || times.size() != snapshots.size()) {
    throw std::invalid_argument("Trajectory: need matching, non-empty times and snapshots");
  }
  if (times.size() >= 2) {
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (std::abs((times[i] - times[i - 1]) - dt) > 1e-12) {
        throw std::invalid_argument("Trajectory: snapshot times are not uniformly spaced");
      }
    }
  }
  for (const auto& snap : snapshots) {
    if (!(snap.grid() == grid)) {
      throw std::invalid_argument("Trajectory: snapshot grid mismatch");
    }
  }
}

}  // namespace dgns
