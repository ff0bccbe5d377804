#pragma once

#include <vector>

namespace kolmo {

/// Cumulative integral F_i = int_{s_0}^{s_i} f of samples f_i on a uniform
/// grid with spacing h, fourth-order accurate: interior intervals use the
/// cubic through four neighbours, the end intervals a one-sided cubic.
/// Needs at least four samples.
std::vector<double> cumulative_integral(const std::vector<double>& f, double h);

/// Composite trapezoid rule of samples on a uniform grid.
double trapezoid(const std::vector<double>& f, double h);

}  // namespace kolmo
