#pragma once

#include <string>
#include <vector>

#include "kolmo/field.hpp"

namespace kolmo {

/// A coefficient pair (A, b) for the stationary equation.
struct Model {
  std::string name;
  DiffusionMatrixField a;
  DriftField b;
};

/// Built-in models:
///   ou                     A = I, b = -x
///   ou-anisotropic         constant A with eigenvalues 1.5, 0.75 rotated by 30 degrees, b = -x (d = 2)
///   polynomial-confining   A = I, b = -|x|^2 x + 0.5 sin(...)
///   log-modulus-diffusion  A = (1 + 0.5 |ln|x||^{-1/2} near 0) I, b = -x
///   weierstrass-diffusion  A = W(x) I with a Holder-1/2 lacunary series in [0.5, 2], b = -x
std::vector<std::string> builtin_model_names(int dimension);
Model make_model(const std::string& name, int dimension);
std::vector<Model> builtin_models(int dimension);

}  // namespace kolmo
