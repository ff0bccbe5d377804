#include "kolmo/quadrature.hpp"

#include "kolmo/error.hpp"

namespace kolmo {

std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
  const std::size_t m = f.size();
  if (m < 4) throw InsufficientResolutionError("cumulative integral needs at least 4 samples");
  std::vector<double> out(m, 0.0);
  const double w = h / 24.0;
  out[1] = w * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  for (std::size_t i = 1; i + 2 < m; ++i) {
    out[i + 1] = out[i] + w * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
  }
  out[m - 1] = out[m - 2] + w * (9.0 * f[m - 1] + 19.0 * f[m - 2] - 5.0 * f[m - 3] + f[m - 4]);
  return out;
}

double trapezoid(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

}  // namespace kolmo
