#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kolmo/field.hpp"
#include "kolmo/grid.hpp"

namespace kolmo::poisson {

/// Constants with L_{A,b}(|x|^{2k}) <= -M0 (1 + |x|^{2k}) for |x| > R0, i.e. a
/// Lyapunov function V(x) = 1 + |x|^{2k}.
struct LyapunovWitness {
  double k = 1.0;
  double m0 = 0.0;
  double r0 = 0.0;
  std::string branch;  // "sampled" or "parameter-formula"
  std::string lyapunov_function = "1+|x|^{2k}";
};

/// L_{A,b}(|x|^{2k}) at x:
/// 2k |x|^{2k-2} [tr A + (2k-2) <Ax, x> / |x|^2 + <b, x>].
double lyapunov_generator(const DiffusionMatrixField& a, const DriftField& b, double k,
                          const Point& x);

/// Sampled branch: evaluates the generator along rays on a radius grid inside
/// `box`, takes R0 as the last radius where M0 = 1 fails (refined by
/// bisection) and M0 as the smallest ratio -L V / V over sampled |x| >= R0.
/// Throws ConfinementError when the inequality still fails at the box edge.
LyapunovWitness lyapunov_constants(const DiffusionMatrixField& a, const DriftField& b, double k,
                                   const Box& box);

/// Parameter-formula branch: the same construction applied to the radial
/// upper bound 2k r^{2k-2} [(d + 2k - 2) / lambda + beta1 - beta2 r^2], which
/// depends only on (d, k, lambda, beta1, beta2).
LyapunovWitness lyapunov_constants_from_params(int dimension, double k, double lambda,
                                               const DriftParams& params, double max_radius);

struct PoissonProblem {
  DiffusionMatrixField a;
  DriftField b;
  ScalarField psi;
  fpk::GridDensity rho;         // stationary density of (A, b); fixes the grid
  double k = 1.0;               // growth order of psi
  double p = 0.0;               // 0 selects 2d
  std::optional<double> s;      // weight exponent of H; defaults to (2 beta + k) p + d + 1
  bool center = true;           // subtract int psi rho before solving
  double normalization_radius = 0.0;  // 0 selects 2 R0 from the sampled Lyapunov witness

  double effective_p() const;
  double effective_s() const;
};

struct PoissonSolution {
  explicit PoissonSolution(const fpk::GridSpec& g) : grid(g) {}

  fpk::GridSpec grid;
  std::vector<double> u;
  std::vector<Point> du;
  std::vector<SymMatrix2> d2u;
  std::vector<double> psi_tilde;   // centred right-hand side at cell centres
  std::vector<double> residual;    // L u - psi_tilde per cell (0 outside the interior)
  double g0 = 0.0;
  double g1 = 0.0;
  double h_integral = 0.0;
  double p = 0.0;
  double s = 0.0;
  double psi_mean = 0.0;           // int psi rho dx
  double projection = 0.0;         // constant removed to reach the discrete range
  double max_interior_residual = 0.0;
  double normalization_radius = 0.0;
  std::optional<LyapunovWitness> lyapunov;
  std::string method;
};

/// Cells with |x|_inf <= R / 2, where residuals and analytic comparisons are
/// taken; the outer half feels the truncated boundary.
bool is_interior(const fpk::GridSpec& grid, std::size_t cell);

/// d = 1: u'(x) from the first-integral formula (a stable forward recurrence
/// for x < 0, backward for x >= 0), u by fourth-order cumulative integration.
/// Throws TruncationError when |int psi_tilde rho| > 1e-6 on the grid.
PoissonSolution solve_poisson_1d(const PoissonProblem& problem);

/// d in {1, 2}: solves L_h u = psi_tilde - c where L_h is the adjoint of the
/// finite-volume density operator and c projects onto its range. Throws
/// IncompatibilityError when |c| > 10 h^2 (1 + int |psi_tilde| rho).
PoissonSolution solve_poisson_grid(const PoissonProblem& problem);

struct RadiusQuotients {
  double radius = 0.0;
  double g0 = 0.0;
  double g1 = 0.0;
  double h_integral = 0.0;
  double psi_bound = 0.0;
  double q0 = 0.0;  // g0 / Psi
  double q1 = 0.0;
  double qh = 0.0;
};

struct BoundReport {
  double g0 = 0.0;
  double g1 = 0.0;
  double h_integral = 0.0;
  double psi_bound = 0.0;  // Psi = sup |psi| / (1 + |x|^k)
  double q0 = 0.0;
  double q1 = 0.0;
  double qh = 0.0;
  std::vector<RadiusQuotients> per_radius;  // sups restricted to |x|_inf <= radius
};

BoundReport verify_growth_bounds(const PoissonSolution& solution, const PoissonProblem& problem,
                                 const std::vector<double>& radii);

}  // namespace kolmo::poisson
