#include "kolmo/stability.hpp"

#include <algorithm>
#include <cmath>

#include "kolmo/condition_h.hpp"
#include "kolmo/error.hpp"
#include "kolmo/field_library.hpp"

namespace kolmo::stability {

namespace {

void require_same_grid(const fpk::GridDensity& a, const fpk::GridDensity& b) {
  if (!(a.grid() == b.grid())) {
    throw ShapeError("densities live on different grids (" + a.grid().describe() + " vs " +
                     b.grid().describe() + ")");
  }
}

bool same_params(const DriftParams& p, const DriftParams& q) {
  return p.beta == q.beta && p.beta1 == q.beta1 && p.beta2 == q.beta2 && p.beta3 == q.beta3;
}

}  // namespace

void verify_pair(const CoefficientPair& pair, const Box& box) {
  if (pair.a_mu.lambda() != pair.a_sigma.lambda() ||
      !same_params(pair.b_mu.params(), pair.b_sigma.params())) {
    throw DomainError("coefficient pair does not share one Condition (H) parameter set");
  }
  coeffs::SamplingSpec sampling;
  sampling.box = box;
  sampling.centers = 32;
  sampling.points_per_ball = 32;
  coeffs::check_condition_h(pair.a_mu, pair.b_mu, box, sampling);
  coeffs::check_condition_h(pair.a_sigma, pair.b_sigma, box, sampling);
}

double weighted_l1_distance(const fpk::GridDensity& rho1, const fpk::GridDensity& rho2, double k) {
  require_same_grid(rho1, rho2);
  double s = 0.0;
  for (std::size_t i = 0; i < rho1.size(); ++i) {
    s += (1.0 + std::pow(norm(rho1.center(i)), k)) * std::abs(rho1[i] - rho2[i]);
  }
  return s * rho1.grid().cell_volume();
}

RhsTerms rhs_discrepancy(const CoefficientPair& pair, const fpk::GridDensity& rho_sigma, double r,
                         double k) {
  if (!(r > 1.0)) throw DomainError("exponent r must exceed 1");
  const int d = pair.dimension();
  const double beta = pair.b_sigma.params().beta;
  RhsTerms out;
  double diff = 0.0;
  double drift = 0.0;
  for (std::size_t i = 0; i < rho_sigma.size(); ++i) {
    if (rho_sigma[i] == 0.0) continue;
    const Point x = rho_sigma.center(i);
    diff += std::pow((pair.a_mu(x) - pair.a_sigma(x)).frobenius(d), r) * rho_sigma[i];
    const Point bm = pair.b_mu(x);
    const Point bs = pair.b_sigma(x);
    const double gap = std::hypot(bm[0] - bs[0], bm[1] - bs[1]);
    drift += gap * (1.0 + std::pow(norm(x), beta + k)) * rho_sigma[i];
  }
  const double vol = rho_sigma.grid().cell_volume();
  out.diffusion = std::pow(diff * vol, 1.0 / r);
  out.drift = drift * vol;
  return out;
}

double duality_check(const CoefficientPair& pair, const fpk::GridDensity& rho_mu,
                     const fpk::GridDensity& rho_sigma, const TestFunction& v) {
  require_same_grid(rho_mu, rho_sigma);
  if (v.is_zero()) return 0.0;
  if (!v.support_inside(rho_mu.grid().box())) {
    throw SupportError("test function support reaches the grid boundary");
  }
  const int d = pair.dimension();
  double first = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < rho_mu.size(); ++i) {
    const Point x = rho_mu.center(i);
    if (norm(Point{x[0] - v.center()[0], d == 2 ? x[1] - v.center()[1] : 0.0}) >= v.radius()) {
      continue;
    }
    const SymMatrix2 am = pair.a_mu(x);
    const Point bm = pair.b_mu(x);
    const Point bs = pair.b_sigma(x);
    first += (rho_mu[i] - rho_sigma[i]) * v.apply(am, bm, x);
    second += v.apply(am - pair.a_sigma(x), Point{bm[0] - bs[0], bm[1] - bs[1]}, x) * rho_sigma[i];
  }
  const double vol = rho_mu.grid().cell_volume();
  return std::abs((first + second) * vol);
}

StabilityReport stability_report(const CoefficientPair& pair, const fpk::GridDensity& rho_mu,
                                 const fpk::GridDensity& rho_sigma, double r, double k,
                                 double delta) {
  StabilityReport rep;
  rep.delta = delta;
  rep.k = k;
  rep.r = r;
  rep.r_conjugate = r / (r - 1.0);
  rep.lhs = weighted_l1_distance(rho_mu, rho_sigma, k);
  const RhsTerms rhs = rhs_discrepancy(pair, rho_sigma, r, k);
  rep.rhs_diffusion = rhs.diffusion;
  rep.rhs_drift = rhs.drift;
  const double denom = rhs.diffusion + rhs.drift;
  rep.c_hat = denom > 0.0 ? rep.lhs / denom : 0.0;
  return rep;
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit fit;
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return fit;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += e * e;
  }
  fit.rms_residual = std::sqrt(ss / n);
  fit.r_squared = syy > 0.0 ? 1.0 - ss / syy : 1.0;
  return fit;
}

SweepResult stability_sweep(const PairFamily& family, std::vector<double> deltas,
                            const fpk::GridSpec& grid, const SweepOptions& options) {
  if (deltas.empty()) throw DomainError("delta grid is empty");
  for (double d : deltas) {
    if (!(d >= 0.0)) throw DomainError("delta values must be nonnegative");
  }
  std::sort(deltas.begin(), deltas.end());
  SweepResult out;
  for (double delta : deltas) {
    StabilityReport rep;
    try {
      const CoefficientPair pair = family(delta);
      if (options.verify_condition_h) verify_pair(pair, grid.box());
      const auto rho_mu = fpk::solve_grid(pair.a_mu, pair.b_mu, grid, options.solve);
      const auto rho_sigma = fpk::solve_grid(pair.a_sigma, pair.b_sigma, grid, options.solve);
      rep = stability_report(pair, rho_mu, rho_sigma, options.r, options.k, delta);
    } catch (const Error& e) {
      if (!options.lenient) throw;
      rep.delta = delta;
      rep.k = options.k;
      rep.r = options.r;
      rep.r_conjugate = options.r / (options.r - 1.0);
      rep.ok = false;
      rep.error = "delta = " + std::to_string(delta) + ": " + e.kind() + ": " + e.what();
    }
    out.reports.push_back(rep);
  }
  std::vector<double> lx;
  std::vector<double> ly;
  bool any = false;
  for (const auto& rep : out.reports) {
    if (!rep.ok) continue;
    if (rep.delta > 0.0 && rep.lhs > 0.0) {
      lx.push_back(std::log(rep.delta));
      ly.push_back(std::log(rep.lhs));
    }
    if (rep.delta > 0.0) {
      out.c_hat_max = any ? std::max(out.c_hat_max, rep.c_hat) : rep.c_hat;
      out.c_hat_min = any ? std::min(out.c_hat_min, rep.c_hat) : rep.c_hat;
      any = true;
    }
  }
  out.fitted_points = static_cast<int>(lx.size());
  const LineFit fit = least_squares(lx, ly);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.fit_residual = fit.rms_residual;
  return out;
}

PairFamily ou_drift_family(int dimension) {
  return [dimension](double delta) {
    if (delta > 1.0) throw DomainError("drift family supports delta <= 1");
    const DriftParams shared{1.0, 1.0, 1.0, 2.0};
    const auto a = DiffusionMatrixField::identity(dimension);
    return CoefficientPair{a, coeffs::ou_drift(dimension, 1.0 + delta).with_params(shared), a,
                           coeffs::ou_drift(dimension, 1.0).with_params(shared)};
  };
}

PairFamily ou_diffusion_family(int dimension) {
  return [dimension](double delta) {
    if (delta > 1.0) throw DomainError("diffusion family supports delta <= 1");
    const auto b = coeffs::ou_drift(dimension);
    return CoefficientPair{
        DiffusionMatrixField::scalar(ScalarField::constant(dimension, 1.0 + delta), 0.5), b,
        DiffusionMatrixField::scalar(ScalarField::constant(dimension, 1.0), 0.5), b};
  };
}

}  // namespace kolmo::stability
