#include "kolmo/grid.hpp"

#include <cmath>
#include <sstream>

#include "kolmo/error.hpp"

namespace kolmo::fpk {

GridSpec::GridSpec(int dimension, double radius, int cells)
    : dimension_(dimension), radius_(radius), cells_(cells) {
  if (dimension != 1 && dimension != 2) {
    throw DomainError("grid dimension must be 1 or 2, got " + std::to_string(dimension));
  }
  if (cells < 16 || (cells & (cells - 1)) != 0) {
    throw DomainError("cells per axis must be a power of two >= 16, got " + std::to_string(cells));
  }
  if (!(radius >= 4.0) || !std::isfinite(radius)) {
    throw DomainError("truncation radius must be finite and >= 4");
  }
}

std::size_t GridSpec::size() const noexcept {
  const auto n = static_cast<std::size_t>(cells_);
  return dimension_ == 1 ? n : n * n;
}

Point GridSpec::center(std::size_t flat) const noexcept {
  const auto n = static_cast<std::size_t>(cells_);
  if (dimension_ == 1) return {coordinate(static_cast<int>(flat)), 0.0};
  return {coordinate(static_cast<int>(flat % n)), coordinate(static_cast<int>(flat / n))};
}

bool GridSpec::on_boundary(std::size_t flat) const noexcept {
  const auto n = static_cast<std::size_t>(cells_);
  const std::size_t i = flat % n;
  if (i == 0 || i == n - 1) return true;
  if (dimension_ == 1) return false;
  const std::size_t j = flat / n;
  return j == 0 || j == n - 1;
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << "d=" << dimension_ << " R=" << radius_ << " n=" << cells_;
  return os.str();
}

GridDensity GridDensity::from_values(const GridSpec& grid, std::vector<double> values) {
  if (values.size() != grid.size()) {
    throw ShapeError("density has " + std::to_string(values.size()) + " values, grid has " +
                     std::to_string(grid.size()) + " cells");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw PositivityError("density value at cell " + std::to_string(i) +
                            " is negative or not finite");
    }
    total += values[i];
  }
  total *= grid.cell_volume();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DegenerateDensityError("density has zero or infinite mass");
  }
  for (double& v : values) v /= total;
  GridDensity out(grid, std::move(values));
  out.diagnostics_.boundary_mass_fraction = out.boundary_mass_fraction();
  return out;
}

GridDensity GridDensity::sample(const GridSpec& grid,
                                const std::function<double(const Point&)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.center(i));
  return from_values(grid, std::move(v));
}

double GridDensity::mass() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.cell_volume();
}

double GridDensity::boundary_mass_fraction() const {
  double edge = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    total += values_[i];
    if (grid_.on_boundary(i)) edge += values_[i];
  }
  return total > 0.0 ? edge / total : 0.0;
}

GridDensity GridDensity::with_diagnostics(SolveDiagnostics d) const {
  GridDensity out = *this;
  out.diagnostics_ = std::move(d);
  return out;
}

std::vector<double> restrict_to_coarse(const GridSpec& fine, const std::vector<double>& values) {
  if (values.size() != fine.size()) throw ShapeError("values do not match the fine grid");
  const int n = fine.cells() / 2;
  const int nf = fine.cells();
  if (fine.dimension() == 1) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = 0.5 * (values[2 * i] + values[2 * i + 1]);
    return out;
  }
  std::vector<double> out(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t f0 = static_cast<std::size_t>(2 * j) * nf + 2 * i;
      out[static_cast<std::size_t>(j) * n + i] =
          0.25 * (values[f0] + values[f0 + 1] + values[f0 + nf] + values[f0 + nf + 1]);
    }
  }
  return out;
}

}  // namespace kolmo::fpk
