#pragma once

#include <utility>
#include <vector>

#include "kolmo/field.hpp"
#include "kolmo/grid.hpp"
#include "kolmo/test_function.hpp"

namespace kolmo::fpk {

/// Sub-sampling of b/a used by the exact 1D solver: the cumulative integral is
/// taken on a grid with spacing h / subdivisions (even, so cell faces and
/// centres are both nodes).
struct QuadratureSpec {
  int subdivisions = 2;
};

struct SolveOptions {
  /// Escalate clipped mass > 1e-6 and boundary mass fraction >= 1e-4 to errors.
  bool strict = false;
  int refinement_steps = 3;
  double residual_tolerance = 1e-10;
};

inline constexpr double kClipThreshold = 1e-10;
inline constexpr double kClippedMassLimit = 1e-6;
inline constexpr double kBoundaryMassLimit = 1e-4;

/// rho(x) = C exp(int_0^x b/a) / a(x) at cell centres, C fixing unit mass.
GridDensity solve_exact_1d(const ScalarField& a, const DriftField& b, const GridSpec& grid,
                           const QuadratureSpec& quadrature = {}, const SolveOptions& options = {});

/// Stationary density of the finite-volume discretization of
/// d_i d_j (a^{ij} rho) - d_i (b^i rho) = 0 with zero flux on the box.
GridDensity solve_grid(const DiffusionMatrixField& a, const DriftField& b, const GridSpec& grid,
                       const SolveOptions& options = {});

struct MomentReport {
  std::vector<std::pair<double, double>> moments;  // (k, int |x|^k rho)
  GridSpec grid;
};

double moment(const GridDensity& rho, double k);
MomentReport moments(const GridDensity& rho, const std::vector<double>& ks);

/// (int (1 + |x|)^{kp} rho^p dx)^{1/p} for finite p > 1.
double weighted_lp_norm(const GridDensity& rho, double k, double p);
/// max over cells of (1 + |x|)^k rho, the p = infinity member of the family.
double weighted_sup_norm(const GridDensity& rho, double k);

/// max / min of rho over cells whose centre lies in B(0, R).
double harnack_ratio(const GridDensity& rho, double radius);

/// L1 distance between rho_n and the cell averages of rho_2n.
double discretization_error(const GridDensity& coarse, const GridDensity& fine);

/// Solves on `grid` and on its refinement and returns the coarse density
/// together with the measured discretization error.
std::pair<GridDensity, double> solve_with_error_estimate(const DiffusionMatrixField& a,
                                                         const DriftField& b,
                                                         const GridSpec& grid,
                                                         const SolveOptions& options = {});

/// int rho L_{A,b} phi dx by cell quadrature, derivatives of phi analytic.
double weak_form_residual(const GridDensity& rho, const DiffusionMatrixField& a,
                          const DriftField& b, const TestFunction& phi);

/// max over cells of |L_{A,b} phi|.
double sup_generator(const GridSpec& grid, const DiffusionMatrixField& a, const DriftField& b,
                     const TestFunction& phi);

}  // namespace kolmo::fpk
