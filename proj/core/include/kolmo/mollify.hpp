#pragma once

#include "kolmo/field.hpp"

namespace kolmo::coeffs {

/// Standard bump kernel g(z) = c exp(-1 / (1 - |z|^2)) on the open unit ball,
/// scaled as g_eps(z) = eps^{-d} g(z / eps).
class MollifierSpec {
 public:
  MollifierSpec(int dimension, double epsilon);

  int dimension() const noexcept { return dimension_; }
  double epsilon() const noexcept { return epsilon_; }
  /// Unscaled kernel g(z); zero outside the open unit ball.
  double kernel(const Point& z) const;
  /// Normalization constant c such that g integrates to one.
  double normalization() const noexcept { return normalization_; }

 private:
  int dimension_;
  double epsilon_;
  double normalization_;
};

/// x -> sum_q w_q f(x - eps z_q): a fixed-order rule over the kernel support
/// (64-node Gauss-Legendre in d = 1; 24 Gauss-Legendre radii times 48 angles in
/// d = 2) whose weights are renormalized to sum to exactly one, so constants
/// and, by node symmetry, affine functions are reproduced. The result is
/// tagged smooth.
ScalarField mollify(const ScalarField& f, const MollifierSpec& spec);

}  // namespace kolmo::coeffs
