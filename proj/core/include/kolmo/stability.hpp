#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kolmo/field.hpp"
#include "kolmo/fpk.hpp"
#include "kolmo/grid.hpp"
#include "kolmo/test_function.hpp"

namespace kolmo::stability {

/// Two coefficient pairs (A_mu, b_mu) and (A_sigma, b_sigma).
struct CoefficientPair {
  DiffusionMatrixField a_mu;
  DriftField b_mu;
  DiffusionMatrixField a_sigma;
  DriftField b_sigma;

  int dimension() const noexcept { return a_mu.dimension(); }
};

/// Throws DomainError unless both pairs declare the same (lambda, beta,
/// beta1, beta2, beta3), then runs check_condition_h on each over `box`.
void verify_pair(const CoefficientPair& pair, const Box& box);

/// int (1 + |x|^k) |rho1 - rho2| dx on a shared grid.
double weighted_l1_distance(const fpk::GridDensity& rho1, const fpk::GridDensity& rho2, double k);

struct RhsTerms {
  double diffusion = 0.0;  // (int |A_mu - A_sigma|_F^r rho_sigma)^{1/r}
  double drift = 0.0;      // int |b_mu - b_sigma| (1 + |x|^{beta + k}) rho_sigma
};

/// Beta is the growth exponent declared by b_sigma.
RhsTerms rhs_discrepancy(const CoefficientPair& pair, const fpk::GridDensity& rho_sigma, double r,
                         double k);

/// |int (rho_mu - rho_sigma) L_mu v + int [tr((A_mu - A_sigma) D^2 v) + <b_mu - b_sigma, grad v>] rho_sigma|.
/// Throws SupportError when the support of v reaches the grid boundary.
double duality_check(const CoefficientPair& pair, const fpk::GridDensity& rho_mu,
                     const fpk::GridDensity& rho_sigma, const TestFunction& v);

struct StabilityReport {
  double delta = 0.0;
  double k = 1.0;
  double r = 2.0;
  double r_conjugate = 2.0;
  double lhs = 0.0;
  double rhs_diffusion = 0.0;
  double rhs_drift = 0.0;
  double c_hat = 0.0;  // empirical ratio lhs / (rhs_diffusion + rhs_drift); 0 when both vanish
  bool ok = true;
  std::string error;   // solver failure annotated with delta (lenient sweeps only)
};

StabilityReport stability_report(const CoefficientPair& pair, const fpk::GridDensity& rho_mu,
                                 const fpk::GridDensity& rho_sigma, double r, double k,
                                 double delta = 0.0);

struct SweepResult {
  std::vector<StabilityReport> reports;  // ordered by delta
  double slope = 0.0;                    // least-squares slope of log lhs against log delta
  double intercept = 0.0;
  double fit_residual = 0.0;             // RMS residual of that fit
  int fitted_points = 0;
  double c_hat_max = 0.0;
  double c_hat_min = 0.0;
};

using PairFamily = std::function<CoefficientPair(double delta)>;

struct SweepOptions {
  double r = 2.0;
  double k = 1.0;
  fpk::SolveOptions solve;
  /// Record failing points and continue instead of rethrowing.
  bool lenient = false;
  /// Check Condition (H) on the grid box for every instantiated pair.
  bool verify_condition_h = false;
};

/// Solves both stationary equations for each delta on `grid`, builds the
/// reports and fits the log-log slope over points with delta > 0 and lhs > 0.
SweepResult stability_sweep(const PairFamily& family, std::vector<double> deltas,
                            const fpk::GridSpec& grid, const SweepOptions& options = {});

/// b_sigma = -x, b_mu = -(1 + delta) x, A = I; shared beta3 = 2 so delta <= 1.
PairFamily ou_drift_family(int dimension);
/// a_mu = 1 + delta, a_sigma = 1, b = -x; shared lambda = 1/2 so delta <= 1.
PairFamily ou_diffusion_family(int dimension);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  double r_squared = 0.0;
};
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kolmo::stability
