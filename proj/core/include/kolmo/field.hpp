#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kolmo/expression.hpp"
#include "kolmo/geometry.hpp"

namespace kolmo {

/// Regularity class a field declares about itself. Tests use the tag to pick
/// which oscillation properties to expect.
struct Smoothness {
  enum class Kind { smooth, holder, dini_log, rough };
  Kind kind = Kind::smooth;
  double exponent = 0.0;  // alpha for holder, gamma for dini_log

  static Smoothness smooth() { return {}; }
  static Smoothness holder(double alpha) { return {Kind::holder, alpha}; }
  static Smoothness dini_log(double gamma) { return {Kind::dini_log, gamma}; }
  static Smoothness rough() { return {Kind::rough, 0.0}; }

  std::string to_string() const;
};

/// Real-valued field on R^d, d in {1, 2}. Immutable and cheap to copy; copies
/// share the evaluation rule.
class ScalarField {
 public:
  using Evaluator = std::function<double(const Point&)>;

  static ScalarField closed_form(int dimension, Evaluator f, Smoothness smoothness,
                                 std::string description);
  static ScalarField from_expression(int dimension, const Expression& e,
                                     Smoothness smoothness = Smoothness::smooth());
  static ScalarField constant(int dimension, double value);

  /// Samples on the uniform node grid `lo + i * (hi - lo) / (count - 1)` per
  /// axis, interpolated (bi)linearly and clamped outside the grid. Values for
  /// d = 2 are stored with the first coordinate varying fastest.
  static ScalarField sampled(int dimension, double lo, double hi, int count,
                             std::vector<double> values, Smoothness smoothness);

  double operator()(const Point& x) const { return (*eval_)(x); }

  int dimension() const noexcept { return dimension_; }
  const Smoothness& smoothness() const noexcept { return smoothness_; }
  const std::string& description() const noexcept { return description_; }
  /// Set when the field is identically constant (lets solvers skip work).
  std::optional<double> constant_value() const noexcept { return constant_; }

 private:
  ScalarField() = default;

  std::shared_ptr<const Evaluator> eval_;
  int dimension_ = 1;
  Smoothness smoothness_;
  std::string description_;
  std::optional<double> constant_;
};

/// Symmetric diffusion matrix A(x) with ellipticity constant lambda:
/// lambda I <= A(x) <= lambda^{-1} I is the declared bound.
class DiffusionMatrixField {
 public:
  static DiffusionMatrixField scalar(ScalarField a, double lambda);
  static DiffusionMatrixField matrix(ScalarField a11, ScalarField a12, ScalarField a22,
                                     double lambda);
  static DiffusionMatrixField identity(int dimension);

  SymMatrix2 operator()(const Point& x) const;

  int dimension() const noexcept { return dimension_; }
  double lambda() const noexcept { return lambda_; }
  /// Entry a^{ij}; (i, j) and (j, i) return the same field.
  const ScalarField& entry(int i, int j) const;
  /// The distinct entries: a11 for d = 1, then a12, a22 for d = 2.
  const std::vector<ScalarField>& distinct_entries() const noexcept { return entries_; }
  bool is_constant() const;

  DiffusionMatrixField with_lambda(double lambda) const;

 private:
  DiffusionMatrixField() = default;

  int dimension_ = 1;
  std::vector<ScalarField> entries_;
  double lambda_ = 1.0;
};

/// Growth and confinement constants of Condition (H_b):
/// <b(x), x> <= beta1 - beta2 |x|^2 and |b(x)| <= beta3 (1 + |x|)^beta.
struct DriftParams {
  double beta = 1.0;
  double beta1 = 1.0;
  double beta2 = 1.0;
  double beta3 = 1.0;
};

class DriftField {
 public:
  DriftField(std::vector<ScalarField> components, DriftParams params);

  Point operator()(const Point& x) const;

  int dimension() const noexcept { return static_cast<int>(components_.size()); }
  const std::vector<ScalarField>& components() const noexcept { return components_; }
  const DriftParams& params() const noexcept { return params_; }

  DriftField with_params(DriftParams params) const;

 private:
  std::vector<ScalarField> components_;
  DriftParams params_;
};

/// Drift with every component shifted by a constant vector.
DriftField shifted(const DriftField& b, const Point& offset);

}  // namespace kolmo
