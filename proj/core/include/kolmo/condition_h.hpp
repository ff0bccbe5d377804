#pragma once

#include <string>
#include <vector>

#include "kolmo/field.hpp"
#include "kolmo/oscillation.hpp"

namespace kolmo::coeffs {

struct ClauseVerdict {
  std::string clause;  // "H_a.ellipticity", "H_a.dini", "H_b.confinement", "H_b.growth"
  bool pass = true;
  double worst_margin = 0.0;  // most negative slack seen (negative means violated)
  Point witness{};            // violating sample nearest the origin
};

/// Outcome of sampling Condition (H) on a box.
struct ConditionHParams {
  double lambda = 1.0;
  DriftParams drift;
  /// Tightest constants supported by the samples.
  double min_admissible_beta3 = 0.0;
  double max_admissible_beta2 = 0.0;
  std::vector<OscillationModulus> entry_moduli;  // one per distinct a^{ij}
  std::vector<ClauseVerdict> clauses;
  bool pass() const;
};

/// Absolute slack allowed in every sampled inequality.
inline constexpr double kConditionTolerance = 1e-6;

/// Samples (H_a) and (H_b) on a lattice of the box plus `sampling.centers`
/// random points, and attaches the oscillation modulus of every diffusion
/// entry. Throws ConditionViolation naming the first failed clause (in the
/// order listed in ClauseVerdict) with its witness point.
ConditionHParams check_condition_h(const DiffusionMatrixField& a, const DriftField& b,
                                   const Box& box, const SamplingSpec& sampling);

/// Same sampling, but returns the verdicts instead of throwing.
ConditionHParams evaluate_condition_h(const DiffusionMatrixField& a, const DriftField& b,
                                      const Box& box, const SamplingSpec& sampling);

}  // namespace kolmo::coeffs
