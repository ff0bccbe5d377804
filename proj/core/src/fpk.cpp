#include "kolmo/fpk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kolmo/error.hpp"
#include "kolmo/quadrature.hpp"
#include "operator_assembly.hpp"

namespace kolmo::fpk {

namespace {

void enforce_truncation(const GridDensity& rho, const SolveOptions& options) {
  const double frac = rho.boundary_mass_fraction();
  if (options.strict && frac >= kBoundaryMassLimit) {
    throw TruncationError("boundary cells hold " + std::to_string(frac) +
                          " of the mass; enlarge the truncation radius");
  }
}

}  // namespace

GridDensity solve_exact_1d(const ScalarField& a, const DriftField& b, const GridSpec& grid,
                           const QuadratureSpec& quadrature, const SolveOptions& options) {
  if (grid.dimension() != 1 || a.dimension() != 1 || b.dimension() != 1) {
    throw ShapeError("solve_exact_1d needs one-dimensional fields and grid");
  }
  const int sub = quadrature.subdivisions;
  if (sub < 2 || sub % 2 != 0) throw DomainError("quadrature subdivisions must be even and >= 2");
  const int n = grid.cells();
  const double hs = grid.h() / sub;
  const int m = n * sub + 1;
  std::vector<double> ratio(m);
  std::vector<double> avals(m);
  for (int k = 0; k < m; ++k) {
    const Point s{-grid.radius() + k * hs, 0.0};
    const double av = a(s);
    if (!(av > 0.0) || !std::isfinite(av)) {
      throw EllipticityError("diffusion coefficient is not positive at " + kolmo::to_string(s, 1));
    }
    avals[k] = av;
    ratio[k] = b(s)[0] / av;
    if (!std::isfinite(ratio[k])) {
      throw EvaluationError("drift is not finite at " + kolmo::to_string(s, 1), s);
    }
  }
  const std::vector<double> phi = cumulative_integral(ratio, hs);
  double peak = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) peak = std::max(peak, phi[i * sub + sub / 2]);
  std::vector<double> rho(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const int k = i * sub + sub / 2;
    rho[i] = std::exp(phi[k] - peak) / avals[k];
    total += rho[i];
  }
  if (!std::isfinite(total) || !(total > 0.0)) {
    throw ConfinementError("normalization integral of the exact density is not finite");
  }
  GridDensity out = GridDensity::from_values(grid, std::move(rho));
  SolveDiagnostics diag;
  diag.method = "exact-1d";
  diag.boundary_mass_fraction = out.boundary_mass_fraction();
  out = out.with_diagnostics(diag);
  enforce_truncation(out, options);
  return out;
}

GridDensity solve_grid(const DiffusionMatrixField& a, const DriftField& b, const GridSpec& grid,
                       const SolveOptions& options) {
  if (a.dimension() != grid.dimension() || b.dimension() != grid.dimension()) {
    throw ShapeError("field dimensions do not match the grid");
  }
  detail::require_positive_diffusion(grid, a);
  const auto m = detail::assemble_fpk_matrix(grid, a, b);
  const int pin = detail::center_cell(grid);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  rhs[pin] = 1.0;
  const auto solved = detail::solve_pinned(m, rhs, pin, options.refinement_steps);
  if (!(solved.residual <= options.residual_tolerance)) {
    throw ConvergenceError("linear solve residual " + std::to_string(solved.residual) +
                               " exceeds " + std::to_string(options.residual_tolerance),
                           solved.history);
  }
  std::vector<double> values(grid.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = solved.x[static_cast<Eigen::Index>(i)];
    total += values[i];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw ConvergenceError("discrete stationary solution has non-positive mass", solved.history);
  }
  const double scale = 1.0 / (total * grid.cell_volume());
  double clipped = 0.0;
  for (double& v : values) {
    v *= scale;
    if (v < 0.0) {
      if (v < -kClipThreshold) clipped += -v;
      v = 0.0;
    }
  }
  clipped *= grid.cell_volume();
  if (options.strict && clipped > kClippedMassLimit) {
    throw PositivityError("scheme produced negative density with mass " + std::to_string(clipped));
  }
  GridDensity out = GridDensity::from_values(grid, std::move(values));
  SolveDiagnostics diag;
  diag.method = "finite-volume";
  diag.residual = solved.residual;
  diag.residual_history = solved.history;
  diag.clipped_mass = clipped;
  diag.boundary_mass_fraction = out.boundary_mass_fraction();
  out = out.with_diagnostics(diag);
  enforce_truncation(out, options);
  return out;
}

double moment(const GridDensity& rho, double k) {
  if (!(k >= 0.0)) throw DomainError("moment order must be >= 0");
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += std::pow(norm(rho.center(i)), k) * rho[i];
  return s * rho.grid().cell_volume();
}

MomentReport moments(const GridDensity& rho, const std::vector<double>& ks) {
  MomentReport r{{}, rho.grid()};
  for (double k : ks) r.moments.emplace_back(k, moment(rho, k));
  return r;
}

double weighted_lp_norm(const GridDensity& rho, double k, double p) {
  if (!(p > 1.0)) throw DomainError("weighted_lp_norm needs p > 1");
  if (!std::isfinite(p)) throw DomainError("p must be finite; use weighted_sup_norm for p = infinity");
  if (!(k >= 0.0)) throw DomainError("weight order must be >= 0");
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    s += std::pow((1.0 + norm(rho.center(i))), k * p) * std::pow(rho[i], p);
  }
  return std::pow(s * rho.grid().cell_volume(), 1.0 / p);
}

double weighted_sup_norm(const GridDensity& rho, double k) {
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    s = std::max(s, std::pow(1.0 + norm(rho.center(i)), k) * rho[i]);
  }
  return s;
}

double harnack_ratio(const GridDensity& rho, double radius) {
  if (!(radius > 0.0)) throw DomainError("Harnack radius must be positive");
  if (radius > rho.grid().radius()) throw DomainError("Harnack ball leaves the grid box");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (norm(rho.center(i)) >= radius) continue;
    lo = std::min(lo, rho[i]);
    hi = std::max(hi, rho[i]);
  }
  if (!std::isfinite(lo)) throw DomainError("no cell centre lies in the Harnack ball");
  if (!(lo > 0.0)) throw DegenerateDensityError("density vanishes inside the Harnack ball");
  return hi / lo;
}

double discretization_error(const GridDensity& coarse, const GridDensity& fine) {
  if (!(fine.grid() == coarse.grid().refined())) {
    throw ShapeError("fine grid must be the refinement of the coarse grid");
  }
  const auto avg = restrict_to_coarse(fine.grid(), fine.values());
  double s = 0.0;
  for (std::size_t i = 0; i < avg.size(); ++i) s += std::abs(coarse[i] - avg[i]);
  return s * coarse.grid().cell_volume();
}

std::pair<GridDensity, double> solve_with_error_estimate(const DiffusionMatrixField& a,
                                                         const DriftField& b,
                                                         const GridSpec& grid,
                                                         const SolveOptions& options) {
  GridDensity coarse = solve_grid(a, b, grid, options);
  const GridDensity fine = solve_grid(a, b, grid.refined(), options);
  const double err = discretization_error(coarse, fine);
  return {std::move(coarse), err};
}

double weak_form_residual(const GridDensity& rho, const DiffusionMatrixField& a,
                          const DriftField& b, const TestFunction& phi) {
  if (phi.is_zero()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] == 0.0) continue;
    const Point x = rho.center(i);
    s += rho[i] * phi.apply(a(x), b(x), x);
  }
  return s * rho.grid().cell_volume();
}

double sup_generator(const GridSpec& grid, const DiffusionMatrixField& a, const DriftField& b,
                     const TestFunction& phi) {
  if (phi.is_zero()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.center(i);
    s = std::max(s, std::abs(phi.apply(a(x), b(x), x)));
  }
  return s;
}

}  // namespace kolmo::fpk
