#include "kolmo/mollify.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "kolmo/error.hpp"

namespace kolmo::coeffs {

namespace {

double bump_profile(double t2) { return t2 < 1.0 ? std::exp(-1.0 / (1.0 - t2)) : 0.0; }

// int_{|z|<1} exp(-1/(1-|z|^2)) dz in d = 1 or 2.
double bump_mass(int dimension) {
  using boost::math::quadrature::gauss_kronrod;
  if (dimension == 1) {
    return 2.0 * gauss_kronrod<double, 61>::integrate(
                     [](double t) { return bump_profile(t * t); }, 0.0, 1.0, 15, 1e-15);
  }
  return 2.0 * std::numbers::pi *
         gauss_kronrod<double, 61>::integrate(
             [](double t) { return t * bump_profile(t * t); }, 0.0, 1.0, 15, 1e-15);
}

struct KernelRule {
  std::vector<Point> nodes;
  std::vector<double> weights;
};

template <unsigned N>
void legendre_on_unit(std::vector<double>& x, std::vector<double>& w, double a, double b) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& abscissa = G::abscissa();
  const auto& weight = G::weights();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    if (abscissa[i] == 0.0) {
      x.push_back(mid);
      w.push_back(half * weight[i]);
      continue;
    }
    x.push_back(mid - half * abscissa[i]);
    w.push_back(half * weight[i]);
    x.push_back(mid + half * abscissa[i]);
    w.push_back(half * weight[i]);
  }
}

KernelRule make_rule(const MollifierSpec& spec) {
  KernelRule rule;
  double total = 0.0;
  if (spec.dimension() == 1) {
    std::vector<double> x, w;
    legendre_on_unit<64>(x, w, -1.0, 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double g = spec.kernel({x[i], 0.0}) * w[i];
      rule.nodes.push_back({x[i], 0.0});
      rule.weights.push_back(g);
      total += g;
    }
  } else {
    std::vector<double> radius, w;
    legendre_on_unit<24>(radius, w, 0.0, 1.0);
    constexpr int kAngles = 48;
    for (std::size_t i = 0; i < radius.size(); ++i) {
      for (int m = 0; m < kAngles; ++m) {
        const double theta = 2.0 * std::numbers::pi * (m + 0.5) / kAngles;
        const Point z{radius[i] * std::cos(theta), radius[i] * std::sin(theta)};
        const double g = spec.kernel(z) * radius[i] * w[i] * (2.0 * std::numbers::pi / kAngles);
        rule.nodes.push_back(z);
        rule.weights.push_back(g);
        total += g;
      }
    }
  }
  for (auto& g : rule.weights) g /= total;
  return rule;
}

}  // namespace

MollifierSpec::MollifierSpec(int dimension, double epsilon)
    : dimension_(dimension), epsilon_(epsilon) {
  if (dimension != 1 && dimension != 2) throw DomainError("mollifier dimension must be 1 or 2");
  if (!(epsilon > 0.0)) throw DomainError("mollifier scale must be positive");
  static const double mass1 = bump_mass(1);
  static const double mass2 = bump_mass(2);
  normalization_ = 1.0 / (dimension == 1 ? mass1 : mass2);
}

double MollifierSpec::kernel(const Point& z) const {
  const double t2 = dimension_ == 1 ? z[0] * z[0] : z[0] * z[0] + z[1] * z[1];
  return normalization_ * bump_profile(t2);
}

ScalarField mollify(const ScalarField& f, const MollifierSpec& spec) {
  if (f.dimension() != spec.dimension()) throw ShapeError("mollifier dimension does not match field");
  auto rule = std::make_shared<const KernelRule>(make_rule(spec));
  const double eps = spec.epsilon();
  const int d = f.dimension();
  auto g = [f, rule, eps, d](const Point& x) {
    double acc = 0.0;
    for (std::size_t q = 0; q < rule->nodes.size(); ++q) {
      Point y = x;
      for (int i = 0; i < d; ++i) y[i] -= eps * rule->nodes[q][i];
      acc += rule->weights[q] * f(y);
    }
    return acc;
  };
  return ScalarField::closed_form(d, g, Smoothness::smooth(),
                                  "mollified(" + f.description() + ", eps=" + std::to_string(eps) + ")");
}

}  // namespace kolmo::coeffs
