#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "kolmo/condition_h.hpp"
#include "kolmo/error.hpp"
#include "kolmo/expression.hpp"
#include "kolmo/field_library.hpp"
#include "kolmo/mollify.hpp"
#include "kolmo/oscillation.hpp"
#include "oracles.hpp"

namespace kolmo {
namespace {

using coeffs::SamplingSpec;

ScalarField expr_field(int d, const std::string& text) {
  return ScalarField::from_expression(d, Expression::parse(text));
}

// ---------------------------------------------------------------- expressions

TEST(Expression, ArithmeticAndFunctions) {
  EXPECT_DOUBLE_EQ(Expression::parse("1 + 2 * 3 ^ 2")({0, 0}), 19.0);
  EXPECT_DOUBLE_EQ(Expression::parse("-x^2")({3, 0}), -9.0);
  EXPECT_NEAR(Expression::parse("sin(pi / 2) + exp(0) + tanh(0)")({0, 0}), 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(Expression::parse("r")({3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(Expression::parse("x1 * x2")({3, 4}), 12.0);
  EXPECT_DOUBLE_EQ(Expression::parse("max(x, 2) + min(x, 2)")({5, 0}), 7.0);
}

TEST(Expression, ParametersAndVariableFlags) {
  const auto e = Expression::parse("-c * x + y", {{"c", 2.0}});
  EXPECT_DOUBLE_EQ(e.evaluate({1, 0}, {0.5, 0}), -1.5);
  EXPECT_TRUE(e.uses_x());
  EXPECT_TRUE(e.uses_y());
  EXPECT_EQ(Expression::parse("x2")({0, 0}), 0.0);
  EXPECT_EQ(Expression::parse("x2").max_x_index(), 1);
  EXPECT_FALSE(Expression::parse("tanh(y)").uses_x());
}

TEST(Expression, MalformedInputThrowsParseError) {
  EXPECT_THROW(Expression::parse("1 +"), ParseError);
  EXPECT_THROW(Expression::parse("(x"), ParseError);
  EXPECT_THROW(Expression::parse("foo(x)"), ParseError);
  EXPECT_THROW(Expression::parse("unknown_param * x"), ParseError);
  EXPECT_THROW(Expression::parse(""), ParseError);
}

// ---------------------------------------------------------------- fields

TEST(Field, SampledInterpolatesItsOwnNodes) {
  std::vector<double> v{0.0, 1.0, 4.0, 9.0, 16.0};
  const auto f = ScalarField::sampled(1, -2.0, 2.0, 5, v, Smoothness::rough());
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(f({-2.0 + i, 0}), v[i]);
  EXPECT_DOUBLE_EQ(f({-1.5, 0}), 0.5);
  EXPECT_DOUBLE_EQ(f({10.0, 0}), 16.0);  // clamped
}

TEST(Field, SampledTwoDimensionalNodes) {
  std::vector<double> v(9);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) v[i + 3 * j] = i + 10.0 * j;
  const auto f = ScalarField::sampled(2, 0.0, 2.0, 3, v, Smoothness::rough());
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(f({double(i), double(j)}), i + 10.0 * j);
  EXPECT_DOUBLE_EQ(f({0.5, 0.5}), 5.5);
}

TEST(Field, SampledRejectsBadShapes) {
  EXPECT_THROW(ScalarField::sampled(1, 0.0, 1.0, 3, {1.0, 2.0}, Smoothness::rough()), ShapeError);
  EXPECT_THROW(ScalarField::sampled(1, 1.0, 0.0, 2, {1.0, 2.0}, Smoothness::rough()), DomainError);
  EXPECT_THROW(ScalarField::constant(3, 1.0), DomainError);
}

TEST(Field, DiffusionMatrixIsSymmetricAndValidated) {
  const auto a = DiffusionMatrixField::matrix(ScalarField::constant(2, 1.0), ScalarField::constant(2, 0.25),
                                              ScalarField::constant(2, 2.0), 0.4);
  EXPECT_EQ(&a.entry(0, 1), &a.entry(1, 0));
  EXPECT_DOUBLE_EQ(a({0, 0}).xy, 0.25);
  EXPECT_TRUE(a.is_constant());
  EXPECT_THROW(DiffusionMatrixField::scalar(ScalarField::constant(1, 1.0), 1.5), DomainError);
  EXPECT_THROW(DiffusionMatrixField::scalar(ScalarField::constant(2, 1.0), 0.5).entry(0, 2),
               std::exception);
}

TEST(Field, DriftComponentsMustMatchDimension) {
  EXPECT_THROW(DriftField({ScalarField::constant(1, 0.0), ScalarField::constant(2, 0.0)}, {}),
               ShapeError);
  EXPECT_THROW(DriftField({}, {}), ShapeError);
  const auto b = shifted(coeffs::ou_drift(1), {0.5, 0.0});
  EXPECT_DOUBLE_EQ(b({2.0, 0})[0], -1.5);
}

TEST(Field, EvaluationIsFiniteOnBoxes) {
  testing::Gen gen(11);
  std::vector<ScalarField> fields{coeffs::log_modulus_field(1, 0.5), coeffs::weierstrass_field(1, 0.5, 0.5),
                                  coeffs::log_modulus_field(2, 0.3), coeffs::weierstrass_field(2, 0.7, 0.5)};
  for (const auto& f : fields) {
    for (int i = 0; i < 500; ++i) {
      const Point x{gen.uniform(-5, 5), f.dimension() == 2 ? gen.uniform(-5, 5) : 0.0};
      EXPECT_TRUE(std::isfinite(f(x)));
    }
  }
}

// ---------------------------------------------------------------- example fields

TEST(ExampleFields, DocumentedValues) {
  const auto c = std::get<ScalarField>(coeffs::make_example_field("constant", {{"c", 1.0}}));
  EXPECT_DOUBLE_EQ(c({0.3, 0}), 1.0);
  const auto lm = std::get<ScalarField>(coeffs::make_example_field("log-modulus", {{"gamma", 0.5}}));
  EXPECT_NEAR(lm({0.5, 0}), std::pow(std::log(2.0), -0.5), 1e-14);
  EXPECT_DOUBLE_EQ(lm({0.0, 0}), 0.0);
  const auto ou = std::get<DriftField>(coeffs::make_example_field("ou-drift", {}));
  EXPECT_DOUBLE_EQ(ou({2.0, 0})[0], -2.0);
}

TEST(ExampleFields, WeierstrassStaysInEllipticityBand) {
  const auto w = coeffs::weierstrass_field(1, 0.5, 0.5);
  for (int i = 0; i <= 2000; ++i) {
    const double v = w({-4.0 + 8.0 * i / 2000.0, 0});
    EXPECT_GE(v, 0.5 - 1e-12);
    EXPECT_LE(v, 2.0 + 1e-12);
  }
}

TEST(ExampleFields, UnknownNamesAndParameters) {
  EXPECT_THROW(coeffs::make_example_field("nope", {}), UnknownNameError);
  EXPECT_THROW(coeffs::make_example_field("constant", {{"gamma", 1.0}}), UnknownNameError);
  EXPECT_THROW(coeffs::make_example_field("log-modulus", {{"gamma", 1.5}}), DomainError);
}

// ---------------------------------------------------------------- oscillation

TEST(Oscillation, ConstantHasZeroModulus) {
  const auto m = coeffs::dini_mean_oscillation(ScalarField::constant(1, 5.0), {0.01, 0.1, 0.5}, {});
  for (double w : m.omega) EXPECT_EQ(w, 0.0);
}

TEST(Oscillation, LinearFieldGivesHalfRadius) {
  const auto m = coeffs::dini_mean_oscillation(expr_field(1, "x"), {0.5}, {});
  EXPECT_NEAR(m.omega[0], 0.25, 1e-12);
}

TEST(Oscillation, ScaleEquivarianceProperty) {
  testing::Gen gen(5);
  const auto radii = coeffs::log_spaced(1e-3, 0.5, 8);
  for (int trial = 0; trial < 10; ++trial) {
    const double c = gen.uniform(-10, 10);
    const auto f = ScalarField::closed_form(1, [c](const Point& x) { return c * x[0]; }, Smoothness::smooth(), "cx");
    SamplingSpec s;
    s.seed = static_cast<std::uint64_t>(trial + 1);
    const auto m = coeffs::dini_mean_oscillation(f, radii, s);
    for (std::size_t j = 0; j < radii.size(); ++j) {
      EXPECT_NEAR(m.omega[j], std::abs(c) * radii[j] / 2.0, 1e-10 * (1 + std::abs(c)));
    }
  }
}

TEST(Oscillation, SmoothFieldModulusVanishes) {
  SamplingSpec s;
  s.box = {2, -1, 1};
  const auto m = coeffs::dini_mean_oscillation(expr_field(2, "sin(3*x1) * cos(x2)"),
                                               coeffs::log_spaced(1e-4, 0.5, 10), s);
  EXPECT_LT(m.omega.front(), 1e-3);
  for (double w : m.omega) EXPECT_GE(w, 0.0);
}

TEST(Oscillation, HolderSlopeProperty) {
  for (double alpha : {0.3, 0.5, 0.7}) {
    const auto f = coeffs::weierstrass_field(1, alpha, 0.5);
    const auto radii = coeffs::log_spaced(1e-4, 1e-2, 9);  // the two smallest decades
    SamplingSpec s;
    s.centers = 256;
    const auto m = coeffs::dini_mean_oscillation(f, radii, s, 0.5);
    std::vector<double> lx, ly;
    for (std::size_t j = 0; j < radii.size(); ++j) {
      lx.push_back(std::log(radii[j]));
      ly.push_back(std::log(m.omega[j]));
    }
    double mx = 0, my = 0;
    for (std::size_t j = 0; j < lx.size(); ++j) {
      mx += lx[j] / lx.size();
      my += ly[j] / ly.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t j = 0; j < lx.size(); ++j) {
      sxy += (lx[j] - mx) * (ly[j] - my);
      sxx += (lx[j] - mx) * (lx[j] - mx);
    }
    EXPECT_NEAR(sxy / sxx, alpha, 0.1) << "alpha " << alpha;
  }
}

TEST(Oscillation, LogModulusDecaysLikeLogPower) {
  SamplingSpec s;
  s.focus = {Point{0, 0}};
  const auto radii = coeffs::log_spaced(1e-8, 1e-2, 7);
  const auto m = coeffs::dini_mean_oscillation(coeffs::log_modulus_field(1, 0.5), radii, s);
  // omega(r) |ln r|^{3/2} stays bounded as r -> 0.
  std::vector<double> scaled;
  for (std::size_t j = 0; j < radii.size(); ++j) scaled.push_back(m.omega[j] * std::pow(-std::log(radii[j]), 1.5));
  for (double v : scaled) EXPECT_LE(v, 1.25 * scaled.back());
  EXPECT_GT(scaled.front(), 0.0);
}

TEST(Oscillation, RejectsBadRadiiAndNonFiniteFields) {
  EXPECT_THROW(coeffs::dini_mean_oscillation(expr_field(1, "x"), {0.1, 0.05}, {}), DomainError);
  EXPECT_THROW(coeffs::dini_mean_oscillation(expr_field(1, "x"), {0.0, 0.1}, {}), DomainError);
  EXPECT_THROW(coeffs::dini_mean_oscillation(expr_field(1, "sqrt(x)"), {0.1, 0.5}, {}), EvaluationError);
}

TEST(Oscillation, DeterministicForSeed) {
  const auto f = coeffs::weierstrass_field(1, 0.5, 0.5);
  SamplingSpec s;
  s.seed = 42;
  const auto r = coeffs::log_spaced(1e-3, 0.5, 6);
  EXPECT_EQ(coeffs::dini_mean_oscillation(f, r, s).omega, coeffs::dini_mean_oscillation(f, r, s).omega);
}

// ---------------------------------------------------------------- dini integral

coeffs::OscillationModulus synthetic(const std::function<double(double)>& w, double lo, double t0, int n) {
  coeffs::OscillationModulus m;
  m.radii = coeffs::log_spaced(lo, t0, n);
  for (double r : m.radii) {
    m.omega.push_back(w(r));
    m.stderr_estimate.push_back(0.0);
  }
  m.t0 = t0;
  return m;
}

TEST(DiniIntegral, LinearModulus) {
  const auto est = coeffs::dini_integral(synthetic([](double t) { return t; }, 1e-6, 1.0, 61));
  EXPECT_TRUE(est.finite);
  EXPECT_NEAR(est.value, 1.0, 1e-3);
}

TEST(DiniIntegral, InverseLogDiverges) {
  const auto est = coeffs::dini_integral(synthetic([](double t) { return 1.0 / std::abs(std::log(t)); }, 1e-12, 0.5, 61));
  EXPECT_FALSE(est.finite);
  EXPECT_TRUE(std::isinf(est.value));
}

TEST(DiniIntegral, LogPowerModulus) {
  // Antiderivative of |ln t|^{-3/2} / t is 2 |ln t|^{-1/2}.
  const double expected = 2.0 / std::sqrt(std::log(2.0));
  const auto est = coeffs::dini_integral(synthetic([](double t) { return std::pow(-std::log(t), -1.5); }, 1e-12, 0.5, 121));
  EXPECT_TRUE(est.finite);
  EXPECT_EQ(est.tail_model, coeffs::DiniEstimate::TailModel::log);
  EXPECT_NEAR(est.value, expected, 0.02 * expected);
}

TEST(DiniIntegral, ZeroModulusAndTooFewRadii) {
  const auto zero = coeffs::dini_integral(synthetic([](double) { return 0.0; }, 1e-4, 0.5, 10));
  EXPECT_TRUE(zero.finite);
  EXPECT_EQ(zero.value, 0.0);
  EXPECT_THROW(coeffs::dini_integral(synthetic([](double t) { return t; }, 0.1, 0.5, 3)),
               InsufficientResolutionError);
}

// ---------------------------------------------------------------- mollify

TEST(Mollify, KernelHasUnitMass) {
  for (int d : {1, 2}) {
    const coeffs::MollifierSpec spec(d, 0.1);
    if (d == 1) {
      const double mass = testing::integrate([&](double z) { return spec.kernel({z, 0}); }, -1, 1);
      EXPECT_NEAR(mass, 1.0, 1e-10);
    } else {
      const double mass = testing::integrate(
          [&](double r) { return 2 * M_PI * r * spec.kernel({r, 0}); }, 0, 1);
      EXPECT_NEAR(mass, 1.0, 1e-10);
    }
  }
}

TEST(Mollify, ReproducesConstantsAndAffineFunctions) {
  for (int d : {1, 2}) {
    const auto c = coeffs::mollify(ScalarField::constant(d, 3.5), coeffs::MollifierSpec(d, 0.2));
    const auto lin = coeffs::mollify(expr_field(d, d == 1 ? "2*x - 1" : "x1 - 3*x2"), coeffs::MollifierSpec(d, 0.2));
    testing::Gen gen(3);
    for (int i = 0; i < 50; ++i) {
      const Point x{gen.uniform(-3, 3), d == 2 ? gen.uniform(-3, 3) : 0.0};
      EXPECT_NEAR(c(x), 3.5, 1e-13);
      EXPECT_NEAR(lin(x), d == 1 ? 2 * x[0] - 1 : x[0] - 3 * x[1], 1e-12);
    }
    EXPECT_EQ(lin.smoothness().kind, Smoothness::Kind::smooth);
  }
}

TEST(Mollify, SupGapShrinksForRoughField) {
  const auto f = coeffs::weierstrass_field(1, 0.5, 0.5);
  double previous = std::numeric_limits<double>::infinity();
  for (double eps : {0.1, 0.01, 0.001}) {
    const auto g = coeffs::mollify(f, coeffs::MollifierSpec(1, eps));
    double gap = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const Point x{-1.0 + 2.0 * i / 2000.0, 0};
      gap = std::max(gap, std::abs(g(x) - f(x)));
    }
    EXPECT_LT(gap, previous) << "eps " << eps;
    previous = gap;
  }
}

TEST(Mollify, ModulusPreservationProperty) {
  for (int d : {1, 2}) {
    const auto radii = coeffs::log_spaced(1e-3, 0.5, d == 1 ? 8 : 4);
    std::vector<ScalarField> fields{coeffs::weierstrass_field(d, 0.5, 0.5), coeffs::log_modulus_field(d, 0.5),
                                    expr_field(d, "sin(4*x)")};
    for (const auto& f : fields) {
      for (double eps : {0.1, 0.01}) {
        SamplingSpec s;
        s.box = {d, -1, 1};
        s.centers = d == 1 ? 128 : 12;
        s.points_per_ball = d == 1 ? 64 : 24;
        s.focus = {Point{0, 0}};  // the log-modulus singularity
        s.focus_centers = d == 1 ? 16 : 4;
        const auto base = coeffs::dini_mean_oscillation(f, radii, s);
        const auto moll = coeffs::dini_mean_oscillation(coeffs::mollify(f, coeffs::MollifierSpec(d, eps)), radii, s);
        for (std::size_t j = 0; j < radii.size(); ++j) {
          EXPECT_LE(moll.omega[j], base.omega[j] + 2.0 * base.stderr_estimate[j] + 1e-12)
              << f.description() << " d=" << d << " eps=" << eps << " r=" << radii[j];
        }
      }
    }
  }
}

TEST(Mollify, RejectsBadEpsilon) {
  EXPECT_THROW(coeffs::MollifierSpec(1, 0.0), DomainError);
  EXPECT_THROW(coeffs::MollifierSpec(3, 0.1), DomainError);
}

// ---------------------------------------------------------------- condition (H)

TEST(ConditionH, OrnsteinUhlenbeckPasses) {
  const auto params = coeffs::check_condition_h(DiffusionMatrixField::identity(1), coeffs::ou_drift(1),
                                                {1, -4, 4}, {});
  EXPECT_TRUE(params.pass());
  EXPECT_DOUBLE_EQ(params.lambda, 1.0);
  EXPECT_DOUBLE_EQ(params.drift.beta, 1.0);
  EXPECT_DOUBLE_EQ(params.drift.beta2, 1.0);
  EXPECT_EQ(params.entry_moduli.size(), 1u);
}

TEST(ConditionH, CubicDriftPasses) {
  for (int d : {1, 2}) {
    EXPECT_NO_THROW(coeffs::check_condition_h(DiffusionMatrixField::identity(d),
                                              coeffs::polynomial_confining_drift(d, 3.0, 0.0), {d, -3, 3}, {}));
  }
}

TEST(ConditionH, ExpandingDriftFailsConfinementAtUnitRadius) {
  // <x, x> <= 1.5 - 0.5 |x|^2 holds exactly up to |x| = 1.
  const DriftField b({expr_field(1, "x")}, {1, 1.5, 0.5, 1});
  try {
    coeffs::check_condition_h(DiffusionMatrixField::identity(1), b, {1, -4, 4}, {});
    FAIL() << "expected a violation";
  } catch (const ConditionViolation& e) {
    EXPECT_EQ(e.clause(), "H_b.confinement");
    EXPECT_GT(std::abs(e.witness()[0]), 1.0);
    EXPECT_NEAR(std::abs(e.witness()[0]), 1.0, 0.02);
  }
}

TEST(ConditionH, EllipticityViolation) {
  const auto a = DiffusionMatrixField::scalar(expr_field(1, "1 + x^2"), 0.5);
  try {
    coeffs::check_condition_h(a, coeffs::ou_drift(1), {1, -4, 4}, {});
    FAIL() << "expected a violation";
  } catch (const ConditionViolation& e) {
    EXPECT_EQ(e.clause(), "H_a.ellipticity");
  }
}

TEST(ConditionH, GrowthViolation) {
  const DriftField b({expr_field(1, "-x^3")}, {1, 1, 1, 1});
  const auto params = coeffs::evaluate_condition_h(DiffusionMatrixField::identity(1), b, {1, -4, 4}, {});
  EXPECT_FALSE(params.pass());
  EXPECT_GT(params.min_admissible_beta3, 1.0);
}

TEST(ConditionH, MonotoneInBoxProperty) {
  testing::Gen gen(17);
  for (int trial = 0; trial < 12; ++trial) {
    const double c = gen.uniform(-1.5, 1.5);
    const double beta3 = gen.uniform(0.5, 3.0);
    const auto b = DriftField({ScalarField::closed_form(1, [c](const Point& x) { return -x[0] + c * std::sin(3 * x[0]); },
                                                        Smoothness::smooth(), "perturbed")},
                              {1, gen.uniform(0.0, 2.0), 1, beta3});
    const double half = gen.uniform(0.5, 4.0);
    const bool small = coeffs::evaluate_condition_h(DiffusionMatrixField::identity(1), b, {1, -half, half}, {}).pass();
    const bool large = coeffs::evaluate_condition_h(DiffusionMatrixField::identity(1), b, {1, -2 * half, 2 * half}, {}).pass();
    if (!small) EXPECT_FALSE(large) << "trial " << trial;
  }
}

}  // namespace
}  // namespace kolmo
