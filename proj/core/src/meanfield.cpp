#include "kolmo/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "kolmo/error.hpp"
#include "kolmo/stability.hpp"

namespace kolmo::meanfield {

InteractionKernel::InteractionKernel(int dimension, std::vector<Function> q,
                                     std::vector<Function> h, double q_bound, double h_bound,
                                     bool x_independent)
    : dimension_(dimension), q_(std::move(q)), h_(std::move(h)), q_bound_(q_bound),
      h_bound_(h_bound), x_independent_(x_independent) {
  if (dimension != 1 && dimension != 2) throw DomainError("kernel dimension must be 1 or 2");
  const std::size_t q_entries = dimension == 1 ? 1 : 3;
  if (!q_.empty() && q_.size() != q_entries) {
    throw ShapeError("matrix kernel needs " + std::to_string(q_entries) + " entries");
  }
  if (!h_.empty() && h_.size() != static_cast<std::size_t>(dimension)) {
    throw ShapeError("vector kernel needs " + std::to_string(dimension) + " components");
  }
  if (!(q_bound >= 0.0) || !(h_bound >= 0.0)) throw DomainError("kernel bounds must be >= 0");
}

InteractionKernel InteractionKernel::from_expressions(int dimension,
                                                      const std::vector<std::string>& q,
                                                      const std::vector<std::string>& h,
                                                      const ParameterMap& params, double q_bound,
                                                      double h_bound) {
  bool uses_x = false;
  auto convert = [&](const std::vector<std::string>& texts) {
    std::vector<Function> out;
    for (const auto& t : texts) {
      const Expression e = Expression::parse(t, params);
      if (e.max_x_index() >= dimension) {
        throw DomainError("kernel expression '" + t + "' uses x2 in dimension 1");
      }
      uses_x = uses_x || e.uses_x();
      out.push_back([e](const Point& x, const Point& y) { return e.evaluate(x, y); });
    }
    return out;
  };
  auto qf = convert(q);
  auto hf = convert(h);
  return InteractionKernel(dimension, std::move(qf), std::move(hf), q_bound, h_bound, !uses_x);
}

InteractionKernel InteractionKernel::zero(int dimension) {
  return InteractionKernel(dimension, {}, {}, 0.0, 0.0, true);
}

SymMatrix2 InteractionKernel::q(const Point& x, const Point& y) const {
  if (q_.empty()) return {};
  if (dimension_ == 1) return {q_[0](x, y), 0.0, 0.0};
  return {q_[0](x, y), q_[1](x, y), q_[2](x, y)};
}

Point InteractionKernel::h(const Point& x, const Point& y) const {
  if (h_.empty()) return {};
  if (dimension_ == 1) return {h_[0](x, y), 0.0};
  return {h_[0](x, y), h_[1](x, y)};
}

void InteractionKernel::validate(const Box& box) const {
  const int per_axis = dimension_ == 1 ? 41 : 9;
  std::vector<Point> pts;
  const double w = box.hi - box.lo;
  for (int j = 0; j < (dimension_ == 1 ? 1 : per_axis); ++j) {
    for (int i = 0; i < per_axis; ++i) {
      pts.push_back({box.lo + w * i / (per_axis - 1),
                     dimension_ == 1 ? 0.0 : box.lo + w * j / (per_axis - 1)});
    }
  }
  for (const Point& x : pts) {
    for (const Point& y : pts) {
      const double qn = q(x, y).eigenvalues(dimension_)[1];
      const double ql = q(x, y).eigenvalues(dimension_)[0];
      if (std::max(std::abs(qn), std::abs(ql)) > q_bound_ + 1e-6) {
        throw DomainError("matrix kernel exceeds its declared bound at x = " +
                          kolmo::to_string(x, dimension_) + ", y = " + kolmo::to_string(y, dimension_));
      }
      if (norm(h(x, y)) > h_bound_ + 1e-6) {
        throw DomainError("vector kernel exceeds its declared bound at x = " +
                          kolmo::to_string(x, dimension_) + ", y = " + kolmo::to_string(y, dimension_));
      }
    }
  }
}

MeanFieldModel MeanFieldModel::with_epsilon(double eps) const {
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("coupling epsilon must lie in [0, 1]");
  MeanFieldModel m = *this;
  m.epsilon = eps;
  return m;
}

namespace {

struct Samples {
  std::vector<Point> y;
  std::vector<double> w;  // rho(y) h^d
};

std::shared_ptr<const Samples> samples_of(const fpk::GridDensity& rho) {
  auto s = std::make_shared<Samples>();
  const double vol = rho.grid().cell_volume();
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] == 0.0) continue;
    s->y.push_back(rho.center(i));
    s->w.push_back(rho[i] * vol);
  }
  return s;
}

SymMatrix2 q_average(const InteractionKernel& k, const Samples& s, const Point& x) {
  SymMatrix2 acc;
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const SymMatrix2 q = k.q(x, s.y[i]);
    acc.xx += s.w[i] * q.xx;
    acc.xy += s.w[i] * q.xy;
    acc.yy += s.w[i] * q.yy;
  }
  return acc;
}

Point h_average(const InteractionKernel& k, const Samples& s, const Point& x) {
  Point acc{};
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const Point h = k.h(x, s.y[i]);
    acc[0] += s.w[i] * h[0];
    acc[1] += s.w[i] * h[1];
  }
  return acc;
}

ScalarField add_entry(const ScalarField& base, double eps, const InteractionKernel& kernel,
                      std::shared_ptr<const Samples> samples, int which,
                      std::optional<double> constant_offset) {
  const int d = base.dimension();
  if (constant_offset) {
    if (base.constant_value()) return ScalarField::constant(d, *base.constant_value() + *constant_offset);
    const double off = *constant_offset;
    return ScalarField::closed_form(
        d, [base, off](const Point& x) { return base(x) + off; }, base.smoothness(),
        base.description() + " + nonlocal");
  }
  return ScalarField::closed_form(
      d,
      [base, eps, kernel, samples, which](const Point& x) {
        const SymMatrix2 q = q_average(kernel, *samples, x);
        const double v = which == 0 ? q.xx : which == 1 ? q.xy : q.yy;
        return base(x) + eps * v;
      },
      base.smoothness(), base.description() + " + nonlocal");
}

double weighted_moment(const fpk::GridDensity& rho, double order) {
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += std::pow(1.0 + norm(rho.center(i)), order) * rho[i];
  return s * rho.grid().cell_volume();
}

double moment_order(const MeanFieldModel& model) {
  return 2.0 * model.lipschitz_m + model.b0.params().beta + model.k;
}

}  // namespace

NonlocalCoefficients nonlocal_coefficients(const MeanFieldModel& model, const fpk::GridDensity& rho) {
  const int d = model.a0.dimension();
  if (model.kernel.dimension() != d || model.b0.dimension() != d) {
    throw ShapeError("mean-field model dimensions disagree");
  }
  if (std::abs(rho.mass() - 1.0) > 1e-8) throw DomainError("density must have unit mass");
  const double eps = model.epsilon;
  const double lambda = model.a0.lambda();
  if (eps * model.kernel.q_bound() >= 0.5 * lambda) {
    throw EllipticityError("eps sup|q| = " + std::to_string(eps * model.kernel.q_bound()) +
                           " reaches lambda / 2 = " + std::to_string(0.5 * lambda));
  }
  NonlocalCoefficients out{model.a0, model.b0};
  if (eps == 0.0) return out;
  const auto samples = samples_of(rho);

  if (model.kernel.has_q()) {
    std::optional<SymMatrix2> constant;
    if (model.kernel.x_independent()) constant = q_average(model.kernel, *samples, Point{});
    auto offset = [&](int which) -> std::optional<double> {
      if (!constant) return std::nullopt;
      const double v = which == 0 ? constant->xx : which == 1 ? constant->xy : constant->yy;
      return eps * v;
    };
    const double lambda_new = lambda - eps * model.kernel.q_bound();
    if (d == 1) {
      out.a = DiffusionMatrixField::scalar(
          add_entry(model.a0.entry(0, 0), eps, model.kernel, samples, 0, offset(0)), lambda_new);
    } else {
      out.a = DiffusionMatrixField::matrix(
          add_entry(model.a0.entry(0, 0), eps, model.kernel, samples, 0, offset(0)),
          add_entry(model.a0.entry(0, 1), eps, model.kernel, samples, 1, offset(1)),
          add_entry(model.a0.entry(1, 1), eps, model.kernel, samples, 2, offset(2)), lambda_new);
    }
  }
  if (model.kernel.has_h()) {
    const DriftParams p = model.b0.params();
    const double s = eps * model.kernel.h_bound();
    const DriftParams updated{p.beta, p.beta1 + s * s / (2.0 * p.beta2), 0.5 * p.beta2, p.beta3 + s};
    if (model.kernel.x_independent()) {
      const Point off = h_average(model.kernel, *samples, Point{});
      out.b = shifted(model.b0, {eps * off[0], eps * off[1]}).with_params(updated);
    } else {
      std::vector<ScalarField> comps;
      for (int i = 0; i < d; ++i) {
        const ScalarField base = model.b0.components()[i];
        const InteractionKernel kernel = model.kernel;
        comps.push_back(ScalarField::closed_form(
            d,
            [base, eps, kernel, samples, i](const Point& x) {
              return base(x) + eps * h_average(kernel, *samples, x)[i];
            },
            base.smoothness(), base.description() + " + nonlocal"));
      }
      out.b = DriftField(std::move(comps), updated);
    }
  }
  return out;
}

fpk::GridDensity apply_phi(const MeanFieldModel& model, const fpk::GridDensity& rho) {
  if (!(rho.grid() == model.grid)) throw ShapeError("density is not on the model grid");
  const NonlocalCoefficients c = nonlocal_coefficients(model, rho);
  if (model.grid.dimension() == 1 && model.exact_1d) {
    return fpk::solve_exact_1d(c.a.entry(0, 0), c.b, model.grid, {}, model.solve);
  }
  return fpk::solve_grid(c.a, c.b, model.grid, model.solve);
}

double pk_distance(const fpk::GridDensity& rho1, const fpk::GridDensity& rho2, double k) {
  return stability::weighted_l1_distance(rho1, rho2, k);
}

FixedPointTrace iterate(const MeanFieldModel& model, const fpk::GridDensity& rho0, double tol,
                        int max_iter) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  FixedPointTrace trace;
  trace.tolerance = tol;
  trace.iterates.push_back(rho0);
  const double order = moment_order(model);
  for (int t = 0; t < max_iter; ++t) {
    fpk::GridDensity next = apply_phi(model, trace.iterates.back());
    const double gap = pk_distance(next, trace.iterates.back(), model.k);
    trace.moment_bound = std::max(trace.moment_bound, weighted_moment(next, order));
    trace.iterates.push_back(std::move(next));
    trace.gaps.push_back(gap);
    if (trace.gaps.size() >= 2) {
      const double prev = trace.gaps[trace.gaps.size() - 2];
      trace.factors.push_back(prev > 0.0 ? gap / prev : 0.0);
    }
    if (gap <= tol) {
      trace.converged = true;
      break;
    }
  }
  const double m = trace.moment_bound;
  trace.threshold_record = model.epsilon * model.lipschitz_n * (std::sqrt(m) + m);
  if (!trace.converged) {
    const bool monotone = std::is_sorted(trace.gaps.rbegin(), trace.gaps.rend());
    if (!monotone) {
      throw NonContractionError("Picard iteration did not converge in " + std::to_string(max_iter) +
                                    " steps and the gaps are not monotone",
                                trace.gaps);
    }
  }
  return trace;
}

ContractionEstimate contraction_estimate(
    const MeanFieldModel& model,
    const std::vector<std::pair<fpk::GridDensity, fpk::GridDensity>>& probes) {
  ContractionEstimate out;
  const double order = moment_order(model);
  for (const auto& [r1, r2] : probes) {
    const double d0 = pk_distance(r1, r2, model.k);
    if (!(d0 > 0.0)) throw DivisionGuardError("probe pair densities coincide");
    const NonlocalCoefficients c1 = nonlocal_coefficients(model, r1);
    const NonlocalCoefficients c2 = nonlocal_coefficients(model, r2);
    const fpk::GridDensity p1 = apply_phi(model, r1);
    const fpk::GridDensity p2 = apply_phi(model, r2);
    const double f = pk_distance(p1, p2, model.k) / d0;
    out.pair_factors.push_back(f);
    out.factor = std::max(out.factor, f);
    out.moment_bound = std::max({out.moment_bound, weighted_moment(p1, order), weighted_moment(p2, order)});
    const stability::CoefficientPair pair{c1.a, c1.b, c2.a, c2.b};
    out.c_hat = std::max(out.c_hat, stability::stability_report(pair, p1, p2, 2.0, model.k).c_hat);
  }
  const double m = out.moment_bound;
  out.bound_form = model.epsilon * model.lipschitz_n * out.c_hat * (std::sqrt(m) + m);
  return out;
}

std::vector<fpk::GridDensity> gaussian_probe_family(const fpk::GridSpec& grid,
                                                    const std::vector<double>& means,
                                                    const std::vector<double>& scales) {
  std::vector<fpk::GridDensity> out;
  for (double s : scales) {
    if (!(s > 0.0)) throw DomainError("probe scales must be positive");
    for (double mu : means) {
      out.push_back(fpk::GridDensity::sample(grid, [mu, s](const Point& x) {
        const double dx = x[0] - mu;
        return std::exp(-0.5 * (dx * dx + x[1] * x[1]) / (s * s));
      }));
    }
  }
  return out;
}

std::vector<std::pair<fpk::GridDensity, fpk::GridDensity>> gaussian_probe_pairs(
    const fpk::GridSpec& grid) {
  const auto family = gaussian_probe_family(grid, {-0.5, 0.0, 0.5}, {0.8, 1.0, 1.25});
  std::vector<std::pair<fpk::GridDensity, fpk::GridDensity>> out;
  for (std::size_t i = 0; i + 1 < family.size(); ++i) out.emplace_back(family[i], family[i + 1]);
  return out;
}

LipschitzReport lipschitz_check(
    const MeanFieldModel& model,
    const std::vector<std::pair<fpk::GridDensity, fpk::GridDensity>>& probes) {
  LipschitzReport out;
  out.bound = model.epsilon * model.lipschitz_n;
  const int d = model.grid.dimension();
  for (const auto& [r1, r2] : probes) {
    const double dist = pk_distance(r1, r2, model.k);
    if (!(dist > 0.0)) throw DivisionGuardError("probe pair densities coincide");
    const NonlocalCoefficients c1 = nonlocal_coefficients(model, r1);
    const NonlocalCoefficients c2 = nonlocal_coefficients(model, r2);
    for (std::size_t i = 0; i < model.grid.size(); ++i) {
      const Point x = model.grid.center(i);
      const Point b1 = c1.b(x);
      const Point b2 = c2.b(x);
      const double gap = (c1.a(x) - c2.a(x)).frobenius(d) + std::hypot(b1[0] - b2[0], b1[1] - b2[1]);
      const double ratio = gap / ((1.0 + std::pow(norm(x), model.lipschitz_m)) * dist);
      out.max_ratio = std::max(out.max_ratio, ratio);
      if (gap > out.bound * (1.0 + std::pow(norm(x), model.lipschitz_m)) * dist + 1e-9) out.holds = false;
    }
  }
  return out;
}

ThresholdEstimate empirical_threshold(
    const MeanFieldModel& model,
    const std::vector<std::pair<fpk::GridDensity, fpk::GridDensity>>& probes, double eps_max,
    int steps) {
  if (model.kernel.has_q() && model.kernel.q_bound() > 0.0) {
    eps_max = std::min(eps_max, 0.999 * 0.5 * model.a0.lambda() / model.kernel.q_bound());
  }
  auto factor = [&](double eps) { return contraction_estimate(model.with_epsilon(eps), probes).factor; };
  ThresholdEstimate out;
  out.factor_at_max = factor(eps_max);
  out.epsilon = eps_max;
  if (out.factor_at_max < 1.0) return out;
  out.reached = true;
  double lo = 0.0;
  double hi = eps_max;
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (factor(mid) < 1.0) lo = mid; else hi = mid;
  }
  out.epsilon = 0.5 * (lo + hi);
  return out;
}

}  // namespace kolmo::meanfield
