#include "kolmo/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "kolmo/error.hpp"
#include "kolmo/fpk.hpp"
#include "kolmo/quadrature.hpp"
#include "operator_assembly.hpp"

namespace kolmo::poisson {

namespace {

constexpr int kRadiusSamples = 2000;
constexpr int kRayCount = 64;

std::vector<Point> rays(int d) {
  if (d == 1) return {Point{1.0, 0.0}, Point{-1.0, 0.0}};
  std::vector<Point> out;
  for (int i = 0; i < kRayCount; ++i) {
    const double t = 2.0 * std::numbers::pi * i / kRayCount;
    out.push_back({std::cos(t), std::sin(t)});
  }
  return out;
}

// Builds the witness from g(r) = max over rays of L V(r e) and requires
// g(r) <= -(1 + r^{2k}) beyond R0.
LyapunovWitness witness_from_profile(const std::function<double(double)>& g, double k,
                                     double max_radius, std::string branch) {
  if (!(k >= 1.0)) throw DomainError("Lyapunov weight order k must be >= 1");
  if (!(max_radius > 0.0)) throw DomainError("Lyapunov search radius must be positive");
  auto slack = [&](double r) { return g(r) + 1.0 + std::pow(r, 2.0 * k); };
  const double dr = max_radius / kRadiusSamples;
  int last_bad = 0;  // radius index; index 0 is r = 0, where V's generator is never negative enough
  std::vector<double> values(kRadiusSamples + 1);
  for (int j = 0; j <= kRadiusSamples; ++j) {
    values[j] = g(j * dr);
    if (values[j] + 1.0 + std::pow(j * dr, 2.0 * k) > 0.0) last_bad = j;
  }
  if (last_bad == kRadiusSamples) {
    throw ConfinementError("no radius R0 inside " + std::to_string(max_radius) +
                           " admits L(|x|^{2k}) <= -(1 + |x|^{2k}) beyond it for k = " +
                           std::to_string(k));
  }
  double lo = last_bad * dr;
  double hi = (last_bad + 1) * dr;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (slack(mid) > 0.0) lo = mid; else hi = mid;
  }
  LyapunovWitness w;
  w.k = k;
  w.r0 = hi;
  w.branch = std::move(branch);
  double m0 = -g(hi) / (1.0 + std::pow(hi, 2.0 * k));
  for (int j = last_bad + 1; j <= kRadiusSamples; ++j) {
    const double r = j * dr;
    m0 = std::min(m0, -values[j] / (1.0 + std::pow(r, 2.0 * k)));
  }
  w.m0 = m0;
  return w;
}

double psi_mean(const ScalarField& psi, const fpk::GridDensity& rho) {
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += psi(rho.center(i)) * rho[i];
  return s * rho.grid().cell_volume();
}

void check_problem(const PoissonProblem& prob) {
  const int d = prob.rho.grid().dimension();
  if (prob.a.dimension() != d || prob.b.dimension() != d || prob.psi.dimension() != d) {
    throw ShapeError("Poisson problem fields do not match the density grid");
  }
  if (!(prob.k >= 1.0)) throw DomainError("growth order k must be >= 1");
  if (!(prob.effective_p() > d)) throw DomainError("integrability exponent p must exceed d");
}

double normalization_radius(const PoissonProblem& prob, std::optional<LyapunovWitness>& witness) {
  if (prob.normalization_radius > 0.0) return prob.normalization_radius;
  witness = lyapunov_constants(prob.a, prob.b, prob.k, prob.rho.grid().box());
  return 2.0 * witness->r0;
}

void subtract_ball_average(const fpk::GridSpec& grid, std::vector<double>& u, double radius) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (norm(grid.center(i)) < radius) {
      sum += u[i];
      ++count;
    }
  }
  if (count == 0) {
    sum = u[static_cast<std::size_t>(fpk::detail::center_cell(grid))];
    count = 1;
  }
  const double avg = sum / count;
  for (double& v : u) v -= avg;
}

// Centred differences of cell values; stencils at the box edge are shifted
// one cell inwards.
void grid_derivatives(const fpk::GridSpec& grid, const std::vector<double>& u,
                      std::vector<Point>& du, std::vector<SymMatrix2>& d2u) {
  const int n = grid.cells();
  const double h = grid.h();
  du.assign(u.size(), Point{});
  d2u.assign(u.size(), SymMatrix2{});
  auto clamp = [n](int i) { return std::clamp(i, 1, n - 2); };
  if (grid.dimension() == 1) {
    for (int i = 0; i < n; ++i) {
      const int c = clamp(i);
      du[i][0] = (u[c + 1] - u[c - 1]) / (2.0 * h);
      d2u[i].xx = (u[c + 1] - 2.0 * u[c] + u[c - 1]) / (h * h);
    }
    return;
  }
  auto at = [&u, n](int i, int j) { return u[static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j]; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int ci = clamp(i);
      const int cj = clamp(j);
      const std::size_t idx = static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j;
      du[idx][0] = (at(ci + 1, j) - at(ci - 1, j)) / (2.0 * h);
      du[idx][1] = (at(i, cj + 1) - at(i, cj - 1)) / (2.0 * h);
      d2u[idx].xx = (at(ci + 1, j) - 2.0 * at(ci, j) + at(ci - 1, j)) / (h * h);
      d2u[idx].yy = (at(i, cj + 1) - 2.0 * at(i, cj) + at(i, cj - 1)) / (h * h);
      d2u[idx].xy = (at(ci + 1, cj + 1) - at(ci + 1, cj - 1) - at(ci - 1, cj + 1) +
                     at(ci - 1, cj - 1)) / (4.0 * h * h);
    }
  }
}

struct Bounds {
  double g0 = 0.0;
  double g1 = 0.0;
  double h_integral = 0.0;
  double psi_bound = 0.0;
};

Bounds bounds_within(const PoissonSolution& sol, const ScalarField* psi, double k, double beta,
                     double radius) {
  const auto& grid = sol.grid;
  const int d = grid.dimension();
  Bounds out;
  double hsum = 0.0;
  for (std::size_t i = 0; i < sol.u.size(); ++i) {
    const Point x = grid.center(i);
    if (std::max(std::abs(x[0]), std::abs(x[1])) > radius) continue;
    const double r = norm(x);
    out.g0 = std::max(out.g0, std::abs(sol.u[i]) / (1.0 + std::pow(r, k)));
    out.g1 = std::max(out.g1, norm(sol.du[i]) / (1.0 + std::pow(r, k + beta)));
    hsum += std::pow(sol.d2u[i].frobenius(d), sol.p) / (1.0 + std::pow(r, sol.s));
    if (psi != nullptr) out.psi_bound = std::max(out.psi_bound, std::abs((*psi)(x)) / (1.0 + std::pow(r, k)));
  }
  out.h_integral = std::pow(hsum * grid.cell_volume(), 1.0 / sol.p);
  return out;
}

void finish(PoissonSolution& sol, const PoissonProblem& prob) {
  const Bounds b = bounds_within(sol, nullptr, prob.k, prob.b.params().beta,
                                 std::numeric_limits<double>::infinity());
  sol.g0 = b.g0;
  sol.g1 = b.g1;
  sol.h_integral = b.h_integral;
}

// Largest |phi - phi_ref| over a stencil for which the polynomial rule is used.
constexpr double kFlatPhaseSpan = 0.25;

// (int_0^1 e^{ct} dt, int_0^1 t e^{ct} dt), by series near c = 0.
std::pair<double, double> exponential_moments(double c) {
  if (std::abs(c) < 1e-3) {
    return {1.0 + c / 2.0 + c * c / 6.0 + c * c * c / 24.0, 0.5 + c / 3.0 + c * c / 8.0 + c * c * c / 30.0};
  }
  const double e = std::exp(c);
  return {std::expm1(c) / c, (e * (c - 1.0) + 1.0) / (c * c)};
}

// int_0^1 (g0 (1 - t) + g1 t) e^{a + c t} dt, always expanded about the larger endpoint.
double exponential_linear_integral(double g0, double g1, double a, double c) {
  if (c <= 0.0) {
    const auto [i0, i1] = exponential_moments(c);
    return std::exp(a) * (g0 * (i0 - i1) + g1 * i1);
  }
  const auto [i0, i1] = exponential_moments(-c);
  return std::exp(a + c) * (g1 * (i0 - i1) + g0 * i1);
}

}  // namespace

double lyapunov_generator(const DiffusionMatrixField& a, const DriftField& b, double k,
                          const Point& x) {
  const int d = a.dimension();
  const double r2 = dot(x, x);
  if (r2 == 0.0) return k == 1.0 ? 2.0 * a(x).trace(d) : 0.0;
  const SymMatrix2 m = a(x);
  const double bracket = m.trace(d) + (2.0 * k - 2.0) * m.quadratic(x) / r2 + dot(b(x), x);
  return 2.0 * k * std::pow(r2, k - 1.0) * bracket;
}

LyapunovWitness lyapunov_constants(const DiffusionMatrixField& a, const DriftField& b, double k,
                                   const Box& box) {
  if (a.dimension() != b.dimension()) throw ShapeError("diffusion and drift dimensions differ");
  const auto dirs = rays(a.dimension());
  auto g = [&](double r) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const Point& e : dirs) worst = std::max(worst, lyapunov_generator(a, b, k, {r * e[0], r * e[1]}));
    return worst;
  };
  const double max_radius = std::min(std::abs(box.lo), std::abs(box.hi));
  return witness_from_profile(g, k, max_radius, "sampled");
}

LyapunovWitness lyapunov_constants_from_params(int dimension, double k, double lambda,
                                               const DriftParams& params, double max_radius) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in (0, 1]");
  auto g = [&](double r) {
    const double bracket = (dimension + 2.0 * k - 2.0) / lambda + params.beta1 - params.beta2 * r * r;
    return 2.0 * k * std::pow(r, 2.0 * k - 2.0) * bracket;
  };
  return witness_from_profile(g, k, max_radius, "parameter-formula");
}

double PoissonProblem::effective_p() const {
  return p > 0.0 ? p : 2.0 * rho.grid().dimension();
}

double PoissonProblem::effective_s() const {
  if (s) return *s;
  return (2.0 * b.params().beta + k) * effective_p() + rho.grid().dimension() + 1.0;
}

bool is_interior(const fpk::GridSpec& grid, std::size_t cell) {
  const Point x = grid.center(cell);
  return std::max(std::abs(x[0]), std::abs(x[1])) <= 0.5 * grid.radius();
}

PoissonSolution solve_poisson_1d(const PoissonProblem& prob) {
  const fpk::GridSpec& grid = prob.rho.grid();
  if (grid.dimension() != 1) throw ShapeError("solve_poisson_1d needs d = 1");
  check_problem(prob);

  PoissonSolution sol(grid);
  sol.method = "quadrature-1d";
  sol.p = prob.effective_p();
  sol.s = prob.effective_s();
  sol.psi_mean = psi_mean(prob.psi, prob.rho);
  const double shift = prob.center ? sol.psi_mean : 0.0;

  const int n = grid.cells();
  const int m = 2 * n + 1;
  const double hs = 0.5 * grid.h();
  std::vector<double> ratio(m), g(m), a_vals(m);
  for (int k = 0; k < m; ++k) {
    const Point s{-grid.radius() + k * hs, 0.0};
    a_vals[k] = prob.a.entry(0, 0)(s);
    if (!(a_vals[k] > 0.0)) throw EllipticityError("diffusion coefficient is not positive");
    ratio[k] = prob.b(s)[0] / a_vals[k];
    g[k] = (prob.psi(s) - shift) / a_vals[k];
  }
  const std::vector<double> phi = cumulative_integral(ratio, hs);

  double tail = 0.0;
  for (std::size_t i = 0; i < prob.rho.size(); ++i) {
    tail += (prob.psi(prob.rho.center(i)) - shift) * prob.rho[i];
  }
  tail *= grid.h();
  if (std::abs(tail) > 1e-6) {
    throw TruncationError("int psi_tilde rho over the truncated line is " + std::to_string(tail) +
                          "; the first integral does not vanish at the boundary");
  }

  // Integral of g e^{phi - phi_ref} over [s_k, s_{k+1}]: the four-point rule
  // while phi is nearly flat across the stencil, otherwise phi and g are taken
  // linear on the sub-interval and the exponential is integrated exactly.
  auto local = [&](int k, double phi_ref) {
    const int lo = k == 0 ? 0 : (k == m - 2 ? m - 4 : k - 1);
    double span = 0.0;
    for (int j = lo; j < lo + 4; ++j) span = std::max(span, std::abs(phi[j] - phi_ref));
    if (span <= kFlatPhaseSpan) {
      auto f = [&](int j) { return g[j] * std::exp(phi[j] - phi_ref); };
      const double w = hs / 24.0;
      if (k == 0) return w * (9.0 * f(0) + 19.0 * f(1) - 5.0 * f(2) + f(3));
      if (k == m - 2) return w * (9.0 * f(m - 1) + 19.0 * f(m - 2) - 5.0 * f(m - 3) + f(m - 4));
      return w * (-f(k - 1) + 13.0 * f(k) + 13.0 * f(k + 1) - f(k + 2));
    }
    // With t in [0, 1] from s_k, the integrand is (g_k (1 - t) + g_{k+1} t) e^{a + c t}.
    return hs * exponential_linear_integral(g[k], g[k + 1], phi[k] - phi_ref, phi[k + 1] - phi[k]);
  };
  std::vector<double> forward(m, 0.0), backward(m, 0.0);
  for (int k = 0; k + 1 < m; ++k) {
    forward[k + 1] = forward[k] * std::exp(phi[k] - phi[k + 1]) + local(k, phi[k + 1]);
  }
  for (int k = m - 2; k >= 0; --k) {
    backward[k] = backward[k + 1] * std::exp(phi[k + 1] - phi[k]) + local(k, phi[k]);
  }
  std::vector<double> du(m);
  for (int k = 0; k < m; ++k) {
    du[k] = (-grid.radius() + k * hs < 0.0) ? forward[k] : -backward[k];
  }
  const std::vector<double> u_sub = cumulative_integral(du, hs);

  sol.u.resize(n);
  sol.du.resize(n);
  sol.d2u.resize(n);
  sol.psi_tilde.resize(n);
  sol.residual.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int k = 2 * i + 1;
    sol.u[i] = u_sub[k];
    sol.du[i] = {du[k], 0.0};
    double second;
    if (k >= 2 && k + 2 < m) {
      second = (-du[k + 2] + 8.0 * du[k + 1] - 8.0 * du[k - 1] + du[k - 2]) / (12.0 * hs);
    } else {
      second = (du[k + 1] - du[k - 1]) / (2.0 * hs);
    }
    sol.d2u[i].xx = second;
    sol.psi_tilde[i] = g[k] * a_vals[k];
  }
  sol.normalization_radius = normalization_radius(prob, sol.lyapunov);
  subtract_ball_average(grid, sol.u, sol.normalization_radius);
  for (int i = 0; i < n; ++i) {
    if (!is_interior(grid, i)) continue;
    const int k = 2 * i + 1;
    const Point x = grid.center(i);
    sol.residual[i] = a_vals[k] * sol.d2u[i].xx + prob.b(x)[0] * sol.du[i][0] - sol.psi_tilde[i];
    sol.max_interior_residual = std::max(sol.max_interior_residual, std::abs(sol.residual[i]));
  }
  finish(sol, prob);
  return sol;
}

PoissonSolution solve_poisson_grid(const PoissonProblem& prob) {
  const fpk::GridSpec& grid = prob.rho.grid();
  check_problem(prob);
  const int d = grid.dimension();

  PoissonSolution sol(grid);
  sol.method = "finite-volume-adjoint";
  sol.p = prob.effective_p();
  sol.s = prob.effective_s();
  sol.psi_mean = psi_mean(prob.psi, prob.rho);
  const double shift = prob.center ? sol.psi_mean : 0.0;

  const std::size_t size = grid.size();
  sol.psi_tilde.resize(size);
  for (std::size_t i = 0; i < size; ++i) sol.psi_tilde[i] = prob.psi(grid.center(i)) - shift;

  // The range of the adjoint is the orthogonal complement of the discrete density.
  const fpk::GridDensity rho_h = fpk::solve_grid(prob.a, prob.b, grid);
  double c = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    c += sol.psi_tilde[i] * rho_h[i];
    scale += std::abs(sol.psi_tilde[i]) * rho_h[i];
  }
  c *= grid.cell_volume();
  scale *= grid.cell_volume();
  sol.projection = c;
  const double h2 = grid.h() * grid.h();
  if (std::abs(c) > 10.0 * h2 * (1.0 + scale)) {
    throw IncompatibilityError("projection onto the discrete range removed " + std::to_string(c) +
                               ", above the tolerance " + std::to_string(10.0 * h2 * (1.0 + scale)) +
                               "; the reference density does not match the operator");
  }

  const auto m = fpk::detail::assemble_fpk_matrix(grid, prob.a, prob.b);
  const fpk::detail::SparseMatrix mt = m.transpose();
  const int pin = fpk::detail::center_cell(grid);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < size; ++i) rhs[static_cast<Eigen::Index>(i)] = sol.psi_tilde[i] - c;
  rhs[pin] = 0.0;
  const auto solved = fpk::detail::solve_pinned(mt, rhs, pin, 3);
  if (!(solved.residual <= 1e-10)) {
    throw ConvergenceError("Poisson solve residual " + std::to_string(solved.residual) +
                               " exceeds 1e-10",
                           solved.history);
  }
  sol.u.resize(size);
  for (std::size_t i = 0; i < size; ++i) sol.u[i] = solved.x[static_cast<Eigen::Index>(i)];
  sol.normalization_radius = normalization_radius(prob, sol.lyapunov);
  subtract_ball_average(grid, sol.u, sol.normalization_radius);
  grid_derivatives(grid, sol.u, sol.du, sol.d2u);

  sol.residual.assign(size, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    if (!is_interior(grid, i)) continue;
    const Point x = grid.center(i);
    const double lu = prob.a(x).contract(sol.d2u[i], d) + dot(prob.b(x), sol.du[i]);
    sol.residual[i] = lu - sol.psi_tilde[i];
    sol.max_interior_residual = std::max(sol.max_interior_residual, std::abs(sol.residual[i]));
  }
  finish(sol, prob);
  return sol;
}

BoundReport verify_growth_bounds(const PoissonSolution& sol, const PoissonProblem& prob,
                                 const std::vector<double>& radii) {
  auto quotient = [](double g, double psi) { return psi > 0.0 ? g / psi : 0.0; };
  const double beta = prob.b.params().beta;
  const Bounds all = bounds_within(sol, &prob.psi, prob.k, beta,
                                   std::numeric_limits<double>::infinity());
  BoundReport out;
  out.g0 = all.g0;
  out.g1 = all.g1;
  out.h_integral = all.h_integral;
  out.psi_bound = all.psi_bound;
  out.q0 = quotient(all.g0, all.psi_bound);
  out.q1 = quotient(all.g1, all.psi_bound);
  out.qh = quotient(all.h_integral, all.psi_bound);
  for (double r : radii) {
    const Bounds b = bounds_within(sol, &prob.psi, prob.k, beta, r);
    out.per_radius.push_back({r, b.g0, b.g1, b.h_integral, b.psi_bound,
                              quotient(b.g0, b.psi_bound), quotient(b.g1, b.psi_bound),
                              quotient(b.h_integral, b.psi_bound)});
  }
  return out;
}

}  // namespace kolmo::poisson
