#pragma once

#include <string>
#include <variant>
#include <vector>

#include "kolmo/expression.hpp"
#include "kolmo/field.hpp"

namespace kolmo::coeffs {

/// Names accepted by `make_example_field`.
const std::vector<std::string>& example_field_names();

/// Built-in fields with documented closed forms.
///
///   constant                    c                                    {c, dimension}
///   log-modulus                 base + amplitude * f, where
///                               f(x) = |ln|x||^{-gamma} on 0 < |x| <= 1/2, f(0) = 0,
///                               and f = (ln 2)^{-gamma} for |x| > 1/2
///                                                                    {gamma, base, amplitude, dimension}
///   weierstrass-holder          mid + half * W / S with W(x) = sum_{n<terms} a^n cos(q^n pi x),
///                               a = q^{-alpha}, S = sum a^n, mid/half centring [lambda, 1/lambda];
///                               in d = 2 the two coordinate series are averaged
///                                                                    {alpha, lambda, q, terms, dimension}
///   ou-drift                    b(x) = -theta x                      {theta, beta1, dimension}
///   polynomial-confining-drift  b(x) = -|x|^{beta-1} x + c (sin x2, sin x1)   (c sin x1 in d = 1)
///                                                                    {beta, c, dimension}
///
/// Unknown names or parameters raise UnknownNameError.
std::variant<ScalarField, DriftField> make_example_field(const std::string& name,
                                                         const ParameterMap& params);

ScalarField log_modulus_field(int dimension, double gamma, double base = 0.0,
                              double amplitude = 1.0);
ScalarField weierstrass_field(int dimension, double alpha, double lambda, double q = 2.0,
                              int terms = 24);
DriftField ou_drift(int dimension, double theta = 1.0, double beta1 = 1.0);
DriftField polynomial_confining_drift(int dimension, double beta = 3.0, double c = 0.0);

}  // namespace kolmo::coeffs
