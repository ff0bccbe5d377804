#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "kolmo/geometry.hpp"

namespace kolmo::fpk {

/// Cell-centred tensor grid on [-R, R]^d with n cells per axis and zero-flux
/// boundary. Cell (i, j) has flat index i + n j and centre
/// (-R + (i + 1/2) h, -R + (j + 1/2) h), h = 2R / n.
class GridSpec {
 public:
  GridSpec(int dimension, double radius, int cells);

  int dimension() const noexcept { return dimension_; }
  double radius() const noexcept { return radius_; }
  int cells() const noexcept { return cells_; }
  double h() const noexcept { return 2.0 * radius_ / cells_; }
  double cell_volume() const noexcept { return dimension_ == 1 ? h() : h() * h(); }
  std::size_t size() const noexcept;
  double coordinate(int i) const noexcept { return -radius_ + (i + 0.5) * h(); }
  Point center(std::size_t flat) const noexcept;
  Box box() const { return {dimension_, -radius_, radius_}; }
  bool on_boundary(std::size_t flat) const noexcept;
  /// Same box, twice the cells per axis.
  GridSpec refined() const { return GridSpec(dimension_, radius_, 2 * cells_); }

  bool operator==(const GridSpec& o) const noexcept {
    return dimension_ == o.dimension_ && radius_ == o.radius_ && cells_ == o.cells_;
  }
  std::string describe() const;

 private:
  int dimension_;
  double radius_;
  int cells_;
};

/// Bookkeeping attached to a density by the solver that produced it.
struct SolveDiagnostics {
  std::string method;
  double residual = 0.0;                 // normwise backward error of the final solve
  std::vector<double> residual_history;  // one entry per refinement step
  double clipped_mass = 0.0;             // mass removed by clipping negative values
  double boundary_mass_fraction = 0.0;
};

/// Nonnegative density with unit mass on a GridSpec.
class GridDensity {
 public:
  /// Takes cell values, rejects negative or non-finite entries and rescales to
  /// unit mass.
  static GridDensity from_values(const GridSpec& grid, std::vector<double> values);
  /// Samples f at cell centres and normalizes.
  static GridDensity sample(const GridSpec& grid, const std::function<double(const Point&)>& f);

  const GridSpec& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  Point center(std::size_t i) const noexcept { return grid_.center(i); }

  double mass() const;
  /// Share of the mass held by the outermost layer of cells.
  double boundary_mass_fraction() const;
  const SolveDiagnostics& diagnostics() const noexcept { return diagnostics_; }
  GridDensity with_diagnostics(SolveDiagnostics d) const;

 private:
  GridDensity(GridSpec grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {}

  GridSpec grid_;
  std::vector<double> values_;
  SolveDiagnostics diagnostics_;
};

/// Average of the 2^d fine cells covering each coarse cell.
std::vector<double> restrict_to_coarse(const GridSpec& fine, const std::vector<double>& values);

}  // namespace kolmo::fpk
