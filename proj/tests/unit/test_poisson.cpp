#include <cmath>

#include <gtest/gtest.h>

#include "kolmo/error.hpp"
#include "kolmo/expression.hpp"
#include "kolmo/field_library.hpp"
#include "kolmo/fpk.hpp"
#include "kolmo/models.hpp"
#include "kolmo/poisson.hpp"
#include "oracles.hpp"

namespace kolmo {
namespace {

using fpk::GridSpec;
using poisson::PoissonProblem;

ScalarField expr(int d, const std::string& text) { return ScalarField::from_expression(d, Expression::parse(text)); }

PoissonProblem ou_problem(int d, const std::string& psi, const GridSpec& grid, bool exact = true) {
  const auto a = DiffusionMatrixField::identity(d);
  const auto b = coeffs::ou_drift(d);
  auto rho = exact && d == 1 ? fpk::solve_exact_1d(ScalarField::constant(1, 1.0), b, grid) : fpk::solve_grid(a, b, grid);
  return PoissonProblem{.a = a, .b = b, .psi = expr(d, psi), .rho = rho, .k = 1.0, .p = 0.0, .s = std::nullopt,
                        .center = true, .normalization_radius = 0.0};
}

/// max over interior cells of |u - expected - c|, c the mean offset over the interior.
double interior_error(const poisson::PoissonSolution& sol, const std::function<double(const Point&)>& expected) {
  double offset = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < sol.u.size(); ++i) {
    if (!poisson::is_interior(sol.grid, i)) continue;
    offset += sol.u[i] - expected(sol.grid.center(i));
    ++count;
  }
  offset /= count;
  double err = 0.0;
  for (std::size_t i = 0; i < sol.u.size(); ++i) {
    if (!poisson::is_interior(sol.grid, i)) continue;
    err = std::max(err, std::abs(sol.u[i] - expected(sol.grid.center(i)) - offset));
  }
  return err;
}

// ---------------------------------------------------------------- Lyapunov witness

TEST(Lyapunov, OrnsteinUhlenbeckClosedForm) {
  // L(|x|^2) = 2 - 2|x|^2 <= -(1 + |x|^2) exactly when |x|^2 >= 3.
  const auto w = poisson::lyapunov_constants(DiffusionMatrixField::identity(1), coeffs::ou_drift(1), 1.0, {1, -8, 8});
  EXPECT_NEAR(w.r0, std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(w.m0, 1.0, 1e-9);
  EXPECT_EQ(w.branch, "sampled");
  EXPECT_DOUBLE_EQ(poisson::lyapunov_generator(DiffusionMatrixField::identity(1), coeffs::ou_drift(1), 1.0, {2, 0}), -6.0);
}

TEST(Lyapunov, ExpandingDriftHasNoWitness) {
  const DriftField b({expr(1, "x")}, {});
  EXPECT_THROW(poisson::lyapunov_constants(DiffusionMatrixField::identity(1), b, 1.0, {1, -8, 8}), ConfinementError);
}

TEST(Lyapunov, ParameterBranchDependsOnlyOnParameters) {
  const DriftParams params{1, 1, 1, 2};
  const DriftField b1({expr(1, "-x")}, params);
  const DriftField b2({expr(1, "-x + 0.5 * sin(x)")}, params);
  const auto w1 = poisson::lyapunov_constants_from_params(1, 1.0, 1.0, b1.params(), 8.0);
  const auto w2 = poisson::lyapunov_constants_from_params(1, 1.0, 1.0, b2.params(), 8.0);
  EXPECT_EQ(w1.r0, w2.r0);
  EXPECT_EQ(w1.m0, w2.m0);
  EXPECT_EQ(w1.branch, "parameter-formula");
  // B(r) = 2 [1 + 1 - r^2] <= -(1 + r^2) iff r^2 >= 5.
  EXPECT_NEAR(w1.r0, std::sqrt(5.0), 1e-9);
}

TEST(Lyapunov, InequalityHoldsBeyondR0Property) {
  for (int d : {1, 2}) {
    for (const auto& m : builtin_models(d)) {
      for (double k : {1.0, 2.0}) {
        const auto w = poisson::lyapunov_constants(m.a, m.b, k, {d, -8, 8});
        for (int i = 1; i <= 200; ++i) {
          const double r = w.r0 + (8.0 - w.r0) * i / 200.0;
          for (int ray = 0; ray < (d == 1 ? 2 : 16); ++ray) {
            const double th = d == 1 ? M_PI * ray : 2 * M_PI * ray / 16.0;
            const Point x{r * std::cos(th), d == 2 ? r * std::sin(th) : 0.0};
            const double lv = poisson::lyapunov_generator(m.a, m.b, k, x);
            EXPECT_LE(lv, -w.m0 * (1 + std::pow(r, 2 * k)) * (1 - 1e-9) + 1e-9)
                << m.name << " d=" << d << " k=" << k << " r=" << r;
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------- 1D quadrature solver

TEST(Poisson1d, LinearRightHandSide) {
  const auto prob = ou_problem(1, "x", GridSpec(1, 8, 2048));
  const auto sol = poisson::solve_poisson_1d(prob);
  EXPECT_LE(interior_error(sol, [](const Point& x) { return -x[0]; }), 1e-6);
  EXPECT_EQ(sol.method, "quadrature-1d");
}

TEST(Poisson1d, QuadraticRightHandSide) {
  const auto sol = poisson::solve_poisson_1d(ou_problem(1, "x^2 - 1", GridSpec(1, 8, 2048)));
  EXPECT_LE(interior_error(sol, [](const Point& x) { return -x[0] * x[0] / 2; }), 1e-6);
}

TEST(Poisson1d, TanhIsOddWithSmallResidual) {
  const auto sol = poisson::solve_poisson_1d(ou_problem(1, "tanh(x)", GridSpec(1, 8, 2048)));
  EXPECT_LE(sol.max_interior_residual, 1e-6);
  const std::size_t n = sol.u.size();
  for (std::size_t i = 0; i < n / 2; i += 31) {
    if (!poisson::is_interior(sol.grid, i)) continue;
    EXPECT_NEAR(sol.du[i][0], sol.du[n - 1 - i][0], 1e-8);  // u odd <=> u' even
  }
}

TEST(Poisson1d, CenteringIsNecessary) {
  auto prob = ou_problem(1, "x^2", GridSpec(1, 8, 1024));
  EXPECT_NO_THROW(poisson::solve_poisson_1d(prob));
  prob.center = false;
  EXPECT_THROW(poisson::solve_poisson_1d(prob), TruncationError);
}

TEST(Poisson1d, RejectsTwoDimensionalProblems) {
  EXPECT_THROW(poisson::solve_poisson_1d(ou_problem(2, "x1", GridSpec(2, 8, 32))), ShapeError);
}

// ---------------------------------------------------------------- grid solver

TEST(PoissonGrid, AgreesWithQuadratureSolver) {
  std::vector<double> gaps;
  for (int n : {512, 1024}) {
    const GridSpec g(1, 8, n);
    const auto prob = ou_problem(1, "tanh(x)", g, false);
    const auto quad = poisson::solve_poisson_1d(ou_problem(1, "tanh(x)", g));
    const auto grid = poisson::solve_poisson_grid(prob);
    double gap = 0.0;
    for (std::size_t i = 0; i < grid.u.size(); ++i) {
      if (poisson::is_interior(g, i)) gap = std::max(gap, std::abs(grid.du[i][0] - quad.du[i][0]));
    }
    gaps.push_back(gap);
    EXPECT_LE(gap, 20.0 * g.h() * g.h());
  }
  EXPECT_GT(gaps[0] / gaps[1], 3.0);
}

TEST(PoissonGrid, LinearRightHandSideBothDimensions) {
  const auto s1 = poisson::solve_poisson_grid(ou_problem(1, "x", GridSpec(1, 8, 1024), false));
  EXPECT_LE(interior_error(s1, [](const Point& x) { return -x[0]; }), 1e-6);
  const auto s2 = poisson::solve_poisson_grid(ou_problem(2, "x1", GridSpec(2, 8, 64)));
  EXPECT_LE(interior_error(s2, [](const Point& x) { return -x[0]; }), 1e-6);
}

TEST(PoissonGrid, ZeroRightHandSide) {
  const auto sol = poisson::solve_poisson_grid(ou_problem(2, "0", GridSpec(2, 8, 32)));
  for (double v : sol.u) EXPECT_EQ(v, 0.0);
  const auto sol1 = poisson::solve_poisson_1d(ou_problem(1, "0", GridSpec(1, 8, 256)));
  for (double v : sol1.u) EXPECT_EQ(v, 0.0);
}

TEST(PoissonGrid, ResidualIsSecondOrder) {
  std::vector<double> res;
  for (int n : {256, 512, 1024}) {
    res.push_back(poisson::solve_poisson_grid(ou_problem(1, "tanh(x)", GridSpec(1, 8, n), false)).max_interior_residual);
  }
  EXPECT_GE(std::log2(res[0] / res[1]), 1.8);
  EXPECT_GE(std::log2(res[1] / res[2]), 1.8);
}

TEST(PoissonGrid, MismatchedDensityIsIncompatible) {
  auto prob = ou_problem(1, "x", GridSpec(1, 8, 256), false);
  prob.rho = fpk::GridDensity::sample(prob.rho.grid(), [](const Point& x) { return testing::normal_pdf(x[0], 1.0); });
  EXPECT_THROW(poisson::solve_poisson_grid(prob), IncompatibilityError);
}

// ---------------------------------------------------------------- growth bounds

TEST(GrowthBounds, LinearCaseClosedForm) {
  const auto prob = ou_problem(1, "x", GridSpec(1, 8, 2048));
  const auto sol = poisson::solve_poisson_1d(prob);
  const auto report = poisson::verify_growth_bounds(sol, prob, {4.0, 8.0});
  // Psi = sup |x| / (1 + |x|) on the grid; u = -x + c gives quotients of order one.
  EXPECT_NEAR(report.psi_bound, 8.0 / 9.0, 1e-3);
  EXPECT_LE(report.q0, 2.0);
  EXPECT_LE(report.q1, 2.0);
  EXPECT_TRUE(std::isfinite(report.qh));
  ASSERT_EQ(report.per_radius.size(), 2u);
  EXPECT_LE(report.per_radius[0].g0, report.per_radius[1].g0);
}

TEST(GrowthBounds, ZeroRightHandSideGivesZeroQuotients) {
  const auto prob = ou_problem(1, "0", GridSpec(1, 8, 256));
  const auto report = poisson::verify_growth_bounds(poisson::solve_poisson_1d(prob), prob, {4.0});
  EXPECT_EQ(report.q0, 0.0);
  EXPECT_EQ(report.q1, 0.0);
  EXPECT_EQ(report.qh, 0.0);
}

TEST(GrowthBounds, StableUnderDomainDoubling) {
  std::vector<poisson::BoundReport> reports;
  for (auto [radius, cells] : {std::pair{8.0, 2048}, std::pair{16.0, 4096}}) {
    const auto prob = ou_problem(1, "tanh(x)", GridSpec(1, radius, cells));
    reports.push_back(poisson::verify_growth_bounds(poisson::solve_poisson_1d(prob), prob, {radius}));
  }
  EXPECT_LT(std::abs(reports[1].q0 / reports[0].q0 - 1), 0.05);
  EXPECT_LT(std::abs(reports[1].q1 / reports[0].q1 - 1), 0.05);
  EXPECT_LT(std::abs(reports[1].qh / reports[0].qh - 1), 0.05);
}

TEST(GrowthBounds, StiffDriftStableUnderDomainDoubling) {
  // b = -|x|^2 x changes phi by O(10) per sub-step near |x| = 16.
  const Model m = make_model("polynomial-confining", 1);
  std::vector<poisson::BoundReport> reports;
  std::vector<double> residuals;
  for (auto [radius, cells] : {std::pair{8.0, 2048}, std::pair{16.0, 4096}}) {
    const GridSpec g(1, radius, cells);
    const PoissonProblem prob{.a = m.a, .b = m.b, .psi = expr(1, "x^2 - 1"),
                              .rho = fpk::solve_exact_1d(m.a.entry(0, 0), m.b, g), .k = 2.0, .p = 0.0,
                              .s = std::nullopt, .center = true, .normalization_radius = 0.0};
    const auto sol = poisson::solve_poisson_1d(prob);
    residuals.push_back(sol.max_interior_residual);
    reports.push_back(poisson::verify_growth_bounds(sol, prob, {radius}));
  }
  EXPECT_LT(std::abs(reports[1].q0 / reports[0].q0 - 1), 0.05);
  EXPECT_LT(std::abs(reports[1].q1 / reports[0].q1 - 1), 0.05);
  EXPECT_LT(std::abs(reports[1].qh / reports[0].qh - 1), 0.05);
  EXPECT_LT(residuals[1], 0.1);
}

TEST(GrowthBounds, DefaultExponents) {
  const auto prob = ou_problem(2, "x1", GridSpec(2, 8, 32));
  EXPECT_DOUBLE_EQ(prob.effective_p(), 4.0);
  EXPECT_DOUBLE_EQ(prob.effective_s(), (2 * 1 + 1) * 4.0 + 2 + 1);
}

}  // namespace
}  // namespace kolmo
