#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kolmo/field.hpp"

namespace kolmo::coeffs {

/// How ball centers and in-ball quadrature points are chosen when estimating
/// the mean oscillation modulus.
struct SamplingSpec {
  Box box{1, -1.0, 1.0};      // centers are drawn uniformly from here
  int centers = 128;
  int points_per_ball = 64;   // midpoint nodes in d = 1; about this many polar nodes in d = 2
  std::uint64_t seed = 1;
  /// Points near which the field is known to be worst (e.g. a singularity).
  /// For every radius r, `focus_centers` extra centers are drawn in the cube of
  /// half-width r around each focus point.
  std::vector<Point> focus;
  int focus_centers = 16;
};

/// Dini integral estimate of int_0^{t0} omega(t) / t dt.
struct DiniEstimate {
  enum class TailModel { zero, power, log };
  double value = 0.0;          // +inf when divergent
  bool finite = true;
  TailModel tail_model = TailModel::zero;
  double exponent = 0.0;       // alpha of c t^alpha, or gamma of c |ln t|^{-gamma}
  double tail = 0.0;           // extrapolated contribution of (0, r_1]
  double body = 0.0;           // quadrature in ln t over [r_1, t0]
};

std::string to_string(DiniEstimate::TailModel model);

/// Sampled mean oscillation modulus omega(r) of a scalar field.
struct OscillationModulus {
  std::vector<double> radii;
  std::vector<double> omega;
  /// Quadrature error estimate per radius: |omega_P - omega_{P/2}| on the same
  /// centers, where P is the in-ball node count.
  std::vector<double> stderr_estimate;
  SamplingSpec sampling;
  double t0 = 1.0;
  std::optional<DiniEstimate> dini;
};

/// omega(r) = max over sampled centers x of the ball average of |f - f_B(x, r)|.
/// Radii must be positive and strictly increasing. Throws EvaluationError
/// when f is non-finite inside a sampled ball.
OscillationModulus dini_mean_oscillation(const ScalarField& f, const std::vector<double>& radii,
                                         const SamplingSpec& sampling, double t0 = 0.5);

/// Mean oscillation of f over the single ball B(center, r), with the same
/// quadrature as `dini_mean_oscillation`.
double ball_oscillation(const ScalarField& f, const Point& center, double r, int points_per_ball);

/// Estimates int_0^{t0} omega(t)/t dt: logarithmic-mean rule in ln t over the sampled
/// radii in [r_1, t0], plus a tail over (0, r_1] extrapolated from a fit to the
/// smallest decade of samples. The fit compares a power law c t^alpha against a
/// log law c |ln t|^{-gamma} by residual; the tail is finite iff alpha > 0 or
/// gamma > 1 (with a 1e-3 margin). Needs at least 4 radii below t0.
DiniEstimate dini_integral(const OscillationModulus& omega);

/// Log-spaced radii from `lo` to `hi` inclusive.
std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace kolmo::coeffs
