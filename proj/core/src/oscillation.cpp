#include "kolmo/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "kolmo/error.hpp"

namespace kolmo::coeffs {

std::string to_string(DiniEstimate::TailModel model) {
  switch (model) {
    case DiniEstimate::TailModel::zero: return "zero";
    case DiniEstimate::TailModel::power: return "power";
    case DiniEstimate::TailModel::log: return "log";
  }
  return "zero";
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw DomainError("log_spaced needs 0 < lo < hi, count >= 2");
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

namespace {

struct BallRule {
  std::vector<Point> offsets;  // unit-ball nodes
  std::vector<double> weights; // sum to 1
};

BallRule make_ball_rule(int dimension, int points) {
  BallRule rule;
  if (dimension == 1) {
    const int n = std::max(2, points + (points % 2));  // even, so the center is a cell face
    for (int i = 0; i < n; ++i) {
      rule.offsets.push_back({-1.0 + (2.0 * i + 1.0) / n, 0.0});
      rule.weights.push_back(1.0 / n);
    }
    return rule;
  }
  const int rings = std::max(2, static_cast<int>(std::lround(std::sqrt(points / 6.0))));
  const int angles = 6 * rings;
  for (int k = 0; k < rings; ++k) {
    const double inner = static_cast<double>(k) / rings;
    const double outer = static_cast<double>(k + 1) / rings;
    const double radius = 0.5 * (inner + outer);
    const double ring_weight = (outer * outer - inner * inner) / angles;
    for (int m = 0; m < angles; ++m) {
      const double theta = 2.0 * std::numbers::pi * (m + 0.5) / angles;
      rule.offsets.push_back({radius * std::cos(theta), radius * std::sin(theta)});
      rule.weights.push_back(ring_weight);
    }
  }
  return rule;
}

double oscillation_with_rule(const ScalarField& f, const Point& center, double r,
                             const BallRule& rule, std::vector<double>& scratch) {
  const int d = f.dimension();
  scratch.resize(rule.offsets.size());
  double mean = 0.0;
  for (std::size_t q = 0; q < rule.offsets.size(); ++q) {
    Point y = center;
    for (int i = 0; i < d; ++i) y[i] += r * rule.offsets[q][i];
    const double v = f(y);
    if (!std::isfinite(v)) {
      throw EvaluationError("field value is not finite at " + kolmo::to_string(y, d), y);
    }
    scratch[q] = v;
    mean += rule.weights[q] * v;
  }
  double osc = 0.0;
  for (std::size_t q = 0; q < scratch.size(); ++q) osc += rule.weights[q] * std::abs(scratch[q] - mean);
  return osc;
}

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

double ball_oscillation(const ScalarField& f, const Point& center, double r, int points_per_ball) {
  std::vector<double> scratch;
  return oscillation_with_rule(f, center, r, make_ball_rule(f.dimension(), points_per_ball),
                               scratch);
}

OscillationModulus dini_mean_oscillation(const ScalarField& f, const std::vector<double>& radii,
                                         const SamplingSpec& sampling, double t0) {
  if (radii.empty()) throw DomainError("dini_mean_oscillation needs at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw DomainError("radii must be positive and strictly increasing");
    }
  }
  if (sampling.centers < 1 || sampling.points_per_ball < 2) {
    throw DomainError("sampling needs centers >= 1 and points_per_ball >= 2");
  }
  if (sampling.box.dimension != f.dimension()) {
    throw ShapeError("sampling box dimension does not match the field");
  }
  if (!(t0 > 0.0)) throw DomainError("t0 must be positive");
  const int d = f.dimension();

  std::mt19937_64 rng(sampling.seed);
  std::vector<Point> base_centers(sampling.centers);
  const double width = sampling.box.hi - sampling.box.lo;
  for (auto& c : base_centers) {
    c = Point{};
    for (int i = 0; i < d; ++i) c[i] = sampling.box.lo + width * unit(rng);
  }
  // Focus offsets in [-1, 1]^d, drawn once and scaled by r.
  std::vector<Point> focus_offsets(sampling.focus.empty() ? 0 : sampling.focus_centers);
  for (auto& o : focus_offsets) {
    o = Point{};
    for (int i = 0; i < d; ++i) o[i] = 2.0 * unit(rng) - 1.0;
  }

  const BallRule fine = make_ball_rule(d, sampling.points_per_ball);
  const BallRule coarse = make_ball_rule(d, std::max(2, sampling.points_per_ball / 2));

  OscillationModulus out;
  out.radii = radii;
  out.sampling = sampling;
  out.t0 = t0;
  out.omega.resize(radii.size());
  out.stderr_estimate.resize(radii.size());
  std::vector<double> scratch;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k];
    double best = 0.0, err = 0.0;
    auto visit = [&](const Point& c) {
      const double a = oscillation_with_rule(f, c, r, fine, scratch);
      const double b = oscillation_with_rule(f, c, r, coarse, scratch);
      best = std::max(best, a);
      err = std::max(err, std::abs(a - b));
    };
    for (const auto& c : base_centers) visit(c);
    for (const auto& p : sampling.focus) {
      visit(p);
      for (const auto& o : focus_offsets) {
        Point c = p;
        for (int i = 0; i < d; ++i) c[i] += r * o[i];
        visit(c);
      }
    }
    out.omega[k] = best;
    out.stderr_estimate[k] = err;
  }
  return out;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ss = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.ss += e * e;
  }
  return fit;
}

constexpr double kExponentMargin = 1e-3;

}  // namespace

DiniEstimate dini_integral(const OscillationModulus& omega) {
  const double t0 = omega.t0;
  std::vector<double> r, w;
  for (std::size_t i = 0; i < omega.radii.size(); ++i) {
    if (omega.radii[i] < t0) {
      r.push_back(omega.radii[i]);
      w.push_back(omega.omega[i]);
    }
  }
  if (r.size() < 4) {
    throw InsufficientResolutionError("dini_integral needs at least 4 radii below t0, got " +
                                      std::to_string(r.size()));
  }
  // omega at t0 itself: the sample if present, otherwise linear extrapolation in ln t.
  double w_end;
  if (auto it = std::find(omega.radii.begin(), omega.radii.end(), t0); it != omega.radii.end()) {
    w_end = omega.omega[static_cast<std::size_t>(it - omega.radii.begin())];
  } else {
    const std::size_t m = r.size();
    const double slope = (w[m - 1] - w[m - 2]) / (std::log(r[m - 1]) - std::log(r[m - 2]));
    w_end = std::max(0.0, w[m - 1] + slope * (std::log(t0) - std::log(r[m - 1])));
  }
  std::vector<double> s(r.size() + 1), v(r.size() + 1);
  for (std::size_t i = 0; i < r.size(); ++i) {
    s[i] = std::log(r[i]);
    v[i] = w[i];
  }
  s.back() = std::log(t0);
  v.back() = w_end;

  DiniEstimate est;
  // Logarithmic-mean rule in ln t: exact when omega is a power law between samples.
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double ds = s[i + 1] - s[i];
    const double lo = v[i], hi = v[i + 1];
    if (lo > 0.0 && hi > 0.0 && std::abs(hi - lo) > 1e-12 * std::max(lo, hi)) {
      est.body += ds * (hi - lo) / std::log(hi / lo);
    } else {
      est.body += 0.5 * (lo + hi) * ds;
    }
  }

  // Fit window: the smallest decade, at least four points.
  std::size_t window = 0;
  while (window < r.size() && r[window] <= 10.0 * r.front()) ++window;
  window = std::max<std::size_t>(window, 4);
  const double scale = *std::max_element(w.begin(), w.end());
  std::vector<double> ln_t, ln_ln_t, ln_w;
  bool log_law_possible = true;
  for (std::size_t i = 0; i < window; ++i) {
    if (!(w[i] > 1e-14 * std::max(1.0, scale))) continue;
    ln_t.push_back(std::log(r[i]));
    ln_w.push_back(std::log(w[i]));
    if (r[i] >= 1.0) log_law_possible = false;
    ln_ln_t.push_back(r[i] < 1.0 ? std::log(-std::log(r[i])) : 0.0);
  }
  const double r1 = r.front();
  if (ln_t.size() < 2) {
    est.tail_model = DiniEstimate::TailModel::zero;
    est.tail = 0.0;
    est.finite = true;
    est.value = est.body;
    return est;
  }
  const LineFit power = fit_line(ln_t, ln_w);
  const LineFit logl = log_law_possible ? fit_line(ln_ln_t, ln_w) : LineFit{0.0, 0.0, INFINITY};
  if (power.ss <= logl.ss) {
    est.tail_model = DiniEstimate::TailModel::power;
    est.exponent = power.slope;
    est.finite = power.slope > kExponentMargin;
    if (est.finite) est.tail = std::exp(power.intercept) * std::pow(r1, power.slope) / power.slope;
  } else {
    est.tail_model = DiniEstimate::TailModel::log;
    est.exponent = -logl.slope;
    const double gamma = est.exponent;
    est.finite = gamma > 1.0 + kExponentMargin;
    if (est.finite) {
      est.tail = std::exp(logl.intercept) * std::pow(-std::log(r1), 1.0 - gamma) / (gamma - 1.0);
    }
  }
  est.value = est.finite ? est.body + est.tail : std::numeric_limits<double>::infinity();
  if (!est.finite) est.tail = std::numeric_limits<double>::infinity();
  return est;
}

}  // namespace kolmo::coeffs
