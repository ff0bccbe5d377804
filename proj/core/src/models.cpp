#include "kolmo/models.hpp"

#include <cmath>
#include <numbers>

#include "kolmo/error.hpp"
#include "kolmo/field_library.hpp"

namespace kolmo {

std::vector<std::string> builtin_model_names(int dimension) {
  std::vector<std::string> names{"ou", "polynomial-confining", "log-modulus-diffusion",
                                 "weierstrass-diffusion"};
  if (dimension == 2) names.insert(names.begin() + 1, "ou-anisotropic");
  return names;
}

Model make_model(const std::string& name, int d) {
  if (d != 1 && d != 2) throw DomainError("model dimension must be 1 or 2");
  if (name == "ou") return {name, DiffusionMatrixField::identity(d), coeffs::ou_drift(d)};
  if (name == "ou-anisotropic" && d == 2) {
    const double t = std::numbers::pi / 6.0;
    const double c = std::cos(t);
    const double s = std::sin(t);
    const double l1 = 1.5;
    const double l2 = 0.75;
    auto a = DiffusionMatrixField::matrix(ScalarField::constant(2, l1 * c * c + l2 * s * s),
                                          ScalarField::constant(2, (l1 - l2) * c * s),
                                          ScalarField::constant(2, l1 * s * s + l2 * c * c),
                                          1.0 / l1);
    return {name, a, coeffs::ou_drift(d)};
  }
  if (name == "polynomial-confining") {
    return {name, DiffusionMatrixField::identity(d), coeffs::polynomial_confining_drift(d, 3.0, 0.5)};
  }
  if (name == "log-modulus-diffusion") {
    const double top = 1.0 + 0.5 * std::pow(std::log(2.0), -0.5);
    return {name, DiffusionMatrixField::scalar(coeffs::log_modulus_field(d, 0.5, 1.0, 0.5), 1.0 / top),
            coeffs::ou_drift(d)};
  }
  if (name == "weierstrass-diffusion") {
    return {name, DiffusionMatrixField::scalar(coeffs::weierstrass_field(d, 0.5, 0.5), 0.5),
            coeffs::ou_drift(d)};
  }
  std::string known;
  for (const auto& n : builtin_model_names(d)) known += (known.empty() ? "" : ", ") + n;
  throw UnknownNameError("unknown model '" + name + "' in dimension " + std::to_string(d) +
                         "; supported: " + known);
}

std::vector<Model> builtin_models(int dimension) {
  std::vector<Model> out;
  for (const auto& n : builtin_model_names(dimension)) out.push_back(make_model(n, dimension));
  return out;
}

}  // namespace kolmo
