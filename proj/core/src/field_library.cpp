#include "kolmo/field_library.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "kolmo/error.hpp"

namespace kolmo::coeffs {

const std::vector<std::string>& example_field_names() {
  static const std::vector<std::string> names = {
      "log-modulus", "weierstrass-holder", "ou-drift", "polynomial-confining-drift", "constant"};
  return names;
}

ScalarField log_modulus_field(int dimension, double gamma, double base, double amplitude) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("log-modulus needs 0 < gamma < 1");
  const double outer = std::pow(std::log(2.0), -gamma);
  auto f = [gamma, base, amplitude, outer](const Point& x) {
    const double r = norm(x);
    double v;
    if (r == 0.0) {
      v = 0.0;
    } else if (r <= 0.5) {
      v = std::pow(-std::log(r), -gamma);
    } else {
      v = outer;
    }
    return base + amplitude * v;
  };
  return ScalarField::closed_form(dimension, f, Smoothness::dini_log(gamma),
                                  "log-modulus(gamma=" + std::to_string(gamma) + ")");
}

ScalarField weierstrass_field(int dimension, double alpha, double lambda, double q, int terms) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("weierstrass-holder needs 0 < alpha < 1");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("weierstrass-holder needs lambda in (0, 1]");
  if (!(q > 1.0) || terms < 1) throw DomainError("weierstrass-holder needs q > 1 and terms >= 1");
  const double a = std::pow(q, -alpha);
  std::vector<double> amp(terms), freq(terms);
  double total = 0.0;
  for (int n = 0; n < terms; ++n) {
    amp[n] = std::pow(a, n);
    freq[n] = std::pow(q, n) * std::numbers::pi;
    total += amp[n];
  }
  const double mid = 0.5 * (lambda + 1.0 / lambda);
  const double half = 0.5 * (1.0 / lambda - lambda);
  auto series = [amp, freq](double t) {
    double s = 0.0;
    for (std::size_t n = 0; n < amp.size(); ++n) s += amp[n] * std::cos(freq[n] * t);
    return s;
  };
  auto f = [=](const Point& x) {
    const double w = dimension == 1 ? series(x[0]) : 0.5 * (series(x[0]) + series(x[1]));
    return mid + half * w / total;
  };
  return ScalarField::closed_form(dimension, f, Smoothness::holder(alpha),
                                  "weierstrass(alpha=" + std::to_string(alpha) + ")");
}

DriftField ou_drift(int dimension, double theta, double beta1) {
  if (!(theta > 0.0)) throw DomainError("ou-drift needs theta > 0");
  std::vector<ScalarField> comps;
  for (int i = 0; i < dimension; ++i) {
    comps.push_back(ScalarField::closed_form(
        dimension, [theta, i](const Point& x) { return -theta * x[i]; }, Smoothness::smooth(),
        "-theta*x" + std::to_string(i + 1)));
  }
  return DriftField(std::move(comps), DriftParams{1.0, beta1, theta, theta});
}

DriftField polynomial_confining_drift(int dimension, double beta, double c) {
  if (!(beta >= 1.0)) throw DomainError("polynomial-confining-drift needs beta >= 1");
  std::vector<ScalarField> comps;
  for (int i = 0; i < dimension; ++i) {
    comps.push_back(ScalarField::closed_form(
        dimension,
        [beta, c, i, dimension](const Point& x) {
          const double r = norm(x);
          const double radial = r == 0.0 ? 0.0 : -std::pow(r, beta - 1.0) * x[i];
          const double other = dimension == 1 ? x[0] : x[1 - i];
          return radial + c * std::sin(other);
        },
        Smoothness::smooth(), "polynomial-confining component " + std::to_string(i + 1)));
  }
  // <b, x> <= |c| t - t^{beta+1} with t = |x|, so beta1 = max_t (beta2 t^2 + |c| t - t^{beta+1}).
  // The maximum is found on a fine scan with a small safety margin.
  const double beta2 = beta > 1.0 ? 1.0 : 0.5;
  double beta1 = 0.0;
  for (int k = 0; k <= 40000; ++k) {
    const double t = 8.0 * k / 40000.0;
    beta1 = std::max(beta1, beta2 * t * t + std::abs(c) * t - std::pow(t, beta + 1.0));
  }
  beta1 = beta1 * 1.01 + 1e-3;
  return DriftField(std::move(comps), DriftParams{beta, beta1, beta2, 1.0 + std::abs(c)});
}

namespace {

double take(ParameterMap& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  const double v = it->second;
  params.erase(it);
  return v;
}

void reject_leftovers(const std::string& name, const ParameterMap& params) {
  if (params.empty()) return;
  throw UnknownNameError("unknown parameter '" + params.begin()->first + "' for example field " +
                         name);
}

}  // namespace

std::variant<ScalarField, DriftField> make_example_field(const std::string& name,
                                                         const ParameterMap& given) {
  ParameterMap params = given;
  const int d = static_cast<int>(take(params, "dimension", 1.0));
  if (name == "constant") {
    const double c = take(params, "c", 1.0);
    reject_leftovers(name, params);
    return ScalarField::constant(d, c);
  }
  if (name == "log-modulus") {
    const double gamma = take(params, "gamma", 0.5);
    const double base = take(params, "base", 0.0);
    const double amplitude = take(params, "amplitude", 1.0);
    reject_leftovers(name, params);
    return log_modulus_field(d, gamma, base, amplitude);
  }
  if (name == "weierstrass-holder") {
    const double alpha = take(params, "alpha", 0.5);
    const double lambda = take(params, "lambda", 0.5);
    const double q = take(params, "q", 2.0);
    const int terms = static_cast<int>(take(params, "terms", 24.0));
    reject_leftovers(name, params);
    return weierstrass_field(d, alpha, lambda, q, terms);
  }
  if (name == "ou-drift") {
    const double theta = take(params, "theta", 1.0);
    const double beta1 = take(params, "beta1", 1.0);
    reject_leftovers(name, params);
    return ou_drift(d, theta, beta1);
  }
  if (name == "polynomial-confining-drift") {
    const double beta = take(params, "beta", 3.0);
    const double c = take(params, "c", 0.0);
    reject_leftovers(name, params);
    return polynomial_confining_drift(d, beta, c);
  }
  std::string supported;
  for (const auto& n : example_field_names()) supported += (supported.empty() ? "" : ", ") + n;
  throw UnknownNameError("unknown example field '" + name + "'; supported: " + supported);
}

}  // namespace kolmo::coeffs
