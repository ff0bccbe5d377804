#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kolmo/expression.hpp"
#include "kolmo/field.hpp"
#include "kolmo/fpk.hpp"
#include "kolmo/grid.hpp"

namespace kolmo::meanfield {

/// Bounded interaction kernels: a symmetric matrix kernel q(x, y) and a vector
/// kernel h(x, y), each with a declared sup bound.
class InteractionKernel {
 public:
  using Function = std::function<double(const Point& x, const Point& y)>;

  /// q entries are (q11) for d = 1 and (q11, q12, q22) for d = 2; h has d
  /// components. An empty list means the zero kernel.
  InteractionKernel(int dimension, std::vector<Function> q, std::vector<Function> h,
                    double q_bound, double h_bound, bool x_independent = false);

  /// Entries parsed from expressions in x, y (and x1, x2, y1, y2, r, s).
  static InteractionKernel from_expressions(int dimension, const std::vector<std::string>& q,
                                            const std::vector<std::string>& h,
                                            const ParameterMap& params, double q_bound,
                                            double h_bound);
  static InteractionKernel zero(int dimension);

  int dimension() const noexcept { return dimension_; }
  double q_bound() const noexcept { return q_bound_; }
  double h_bound() const noexcept { return h_bound_; }
  bool has_q() const noexcept { return !q_.empty(); }
  bool has_h() const noexcept { return !h_.empty(); }
  /// Neither kernel depends on x, so nonlocal offsets are constant vectors.
  bool x_independent() const noexcept { return x_independent_; }

  SymMatrix2 q(const Point& x, const Point& y) const;
  Point h(const Point& x, const Point& y) const;

  /// Samples the kernels on a lattice of box x box and throws DomainError when
  /// a declared bound is exceeded by more than 1e-6.
  void validate(const Box& box) const;

 private:
  int dimension_;
  std::vector<Function> q_;
  std::vector<Function> h_;
  double q_bound_;
  double h_bound_;
  bool x_independent_;
};

struct MeanFieldModel {
  DiffusionMatrixField a0;
  DriftField b0;
  InteractionKernel kernel;
  double epsilon = 0.0;
  double lipschitz_n = 1.0;  // N
  double lipschitz_m = 0.0;  // m
  double k = 1.0;            // weight order of the P_k metric
  fpk::GridSpec grid;
  /// Use the exact first-integral solver in d = 1 instead of the grid solver.
  bool exact_1d = true;
  fpk::SolveOptions solve;

  MeanFieldModel with_epsilon(double eps) const;
};

struct NonlocalCoefficients {
  DiffusionMatrixField a;
  DriftField b;
};

/// A(x) = A0(x) + eps int q(x, y) rho(y) dy and b(x) = b0(x) + eps int h(x, y) rho(y) dy,
/// with lambda' = lambda - eps sup|q| and drift constants
/// beta1' = beta1 + (eps sup|h|)^2 / (2 beta2), beta2' = beta2 / 2, beta3' = beta3 + eps sup|h|.
/// Throws EllipticityError when eps sup|q| >= lambda / 2.
NonlocalCoefficients nonlocal_coefficients(const MeanFieldModel& model, const fpk::GridDensity& rho);

/// Stationary density of the equation with coefficients frozen at rho.
fpk::GridDensity apply_phi(const MeanFieldModel& model, const fpk::GridDensity& rho);

/// P_k distance int (1 + |x|^k) |rho1 - rho2| dx.
double pk_distance(const fpk::GridDensity& rho1, const fpk::GridDensity& rho2, double k);

struct FixedPointTrace {
  std::vector<fpk::GridDensity> iterates;  // rho_0 .. rho_T
  std::vector<double> gaps;                // dist(rho_{t+1}, rho_t)
  std::vector<double> factors;             // gaps[t+1] / gaps[t]
  bool converged = false;
  double tolerance = 0.0;
  double moment_bound = 0.0;               // max_t int (1 + |x|)^{2m + beta + k} rho_t, t >= 1
  /// eps N C (sqrt(M) + M) with C = 1 and M the measured moment bound.
  double threshold_record = 0.0;
};

/// Picard iteration rho_{t+1} = Phi(rho_t). Stops once a gap is <= tol. When
/// max_iter is hit with a non-monotone gap sequence, throws NonContractionError.
FixedPointTrace iterate(const MeanFieldModel& model, const fpk::GridDensity& rho0, double tol,
                        int max_iter);

struct ContractionEstimate {
  double factor = 0.0;                 // max over pairs of dist(Phi rho1, Phi rho2) / dist(rho1, rho2)
  std::vector<double> pair_factors;
  double moment_bound = 0.0;           // M_hat
  double c_hat = 0.0;                  // empirical stability ratio over the probe pairs
  double bound_form = 0.0;             // eps N C_hat (sqrt(M_hat) + M_hat)
};

/// Throws DivisionGuardError for a coincident probe pair.
ContractionEstimate contraction_estimate(const MeanFieldModel& model,
                                         const std::vector<std::pair<fpk::GridDensity, fpk::GridDensity>>& probes);

/// Normal densities N(mean e1, scale^2 I) for every (mean, scale) combination.
std::vector<fpk::GridDensity> gaussian_probe_family(const fpk::GridSpec& grid,
                                                    const std::vector<double>& means,
                                                    const std::vector<double>& scales);
/// Consecutive pairs of the Gaussian probe family.
std::vector<std::pair<fpk::GridDensity, fpk::GridDensity>> gaussian_probe_pairs(
    const fpk::GridSpec& grid);

struct LipschitzReport {
  double max_ratio = 0.0;  // max over pairs and cells of coefficient gap / ((1 + |x|^m) dist)
  double bound = 0.0;      // eps N
  bool holds = true;
};

/// Checks |A(x, rho1) - A(x, rho2)|_F + |b(x, rho1) - b(x, rho2)| <= eps N (1 + |x|^m) dist + 1e-9.
LipschitzReport lipschitz_check(const MeanFieldModel& model,
                                const std::vector<std::pair<fpk::GridDensity, fpk::GridDensity>>& probes);

struct ThresholdEstimate {
  bool reached = false;    // the factor reached 1 below eps_max
  double epsilon = 0.0;    // bisection estimate of the crossing, eps_max when not reached
  double factor_at_max = 0.0;
};

/// Bisection on eps in [0, eps_max] for the contraction factor crossing 1.
ThresholdEstimate empirical_threshold(const MeanFieldModel& model,
                                      const std::vector<std::pair<fpk::GridDensity, fpk::GridDensity>>& probes,
                                      double eps_max = 1.0, int steps = 12);

}  // namespace kolmo::meanfield
