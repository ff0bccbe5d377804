#include "kolmo/condition_h.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "kolmo/error.hpp"

namespace kolmo::coeffs {

bool ConditionHParams::pass() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const ClauseVerdict& c) { return c.pass; });
}

namespace {

void append_box_samples(const Box& box, const SamplingSpec& sampling, std::vector<Point>& pts) {
  const int d = box.dimension;
  const int per_axis = d == 1 ? 401 : 61;
  const double width = box.hi - box.lo;
  if (d == 1) {
    for (int i = 0; i < per_axis; ++i) pts.push_back({box.lo + width * i / (per_axis - 1), 0.0});
  } else {
    for (int j = 0; j < per_axis; ++j) {
      for (int i = 0; i < per_axis; ++i) {
        pts.push_back({box.lo + width * i / (per_axis - 1), box.lo + width * j / (per_axis - 1)});
      }
    }
  }
  std::mt19937_64 rng(sampling.seed ^ 0x9e3779b97f4a7c15ULL);
  for (int k = 0; k < sampling.centers; ++k) {
    Point p{};
    for (int i = 0; i < d; ++i) p[i] = box.lo + width * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    pts.push_back(p);
  }
}

// The box and its concentric halvings down to half-width 1/8, so that the
// samples of a box are contained in those of its doubling.
std::vector<Point> sample_points(const Box& box, const SamplingSpec& sampling) {
  std::vector<Point> pts;
  const double center = 0.5 * (box.lo + box.hi);
  double half = 0.5 * (box.hi - box.lo);
  for (int level = 0; level < 12; ++level) {
    append_box_samples({box.dimension, center - half, center + half}, sampling, pts);
    half *= 0.5;
    if (half < 0.125) break;
  }
  return pts;
}

// The witness is the violating sample nearest the origin, i.e. where the
// clause first fails; worst_margin keeps the most negative slack.
void record(ClauseVerdict& v, double slack, const Point& x) {
  v.worst_margin = std::min(v.worst_margin, slack);
  if (slack < 0.0 && (v.pass || norm(x) < norm(v.witness))) {
    v.pass = false;
    v.witness = x;
  }
}

}  // namespace

ConditionHParams evaluate_condition_h(const DiffusionMatrixField& a, const DriftField& b,
                                      const Box& box, const SamplingSpec& sampling) {
  if (a.dimension() != b.dimension()) throw ShapeError("diffusion and drift dimensions differ");
  if (box.dimension != a.dimension()) throw ShapeError("box dimension does not match the fields");
  const int d = a.dimension();
  const double lambda = a.lambda();
  const DriftParams& p = b.params();

  ConditionHParams out;
  out.lambda = lambda;
  out.drift = p;
  ClauseVerdict ellipticity{"H_a.ellipticity"};
  ClauseVerdict dini{"H_a.dini"};
  ClauseVerdict confinement{"H_b.confinement"};
  ClauseVerdict growth{"H_b.growth"};
  double beta3_needed = 0.0;
  double beta2_allowed = std::numeric_limits<double>::infinity();

  for (const Point& x : sample_points(box, sampling)) {
    const auto eig = a(x).eigenvalues(d);
    record(ellipticity, std::min(eig[0] - lambda, 1.0 / lambda - eig[1]) + kConditionTolerance, x);
    const Point bx = b(x);
    const double r = norm(x);
    const double inner = dot(bx, x);
    record(confinement, p.beta1 - p.beta2 * r * r - inner + kConditionTolerance, x);
    const double bound = std::pow(1.0 + r, p.beta);
    record(growth, p.beta3 * bound - norm(bx) + kConditionTolerance, x);
    beta3_needed = std::max(beta3_needed, norm(bx) / bound);
    if (r > 0.0) beta2_allowed = std::min(beta2_allowed, (p.beta1 - inner) / (r * r));
  }

  SamplingSpec entry_sampling = sampling;
  entry_sampling.box = box;
  const auto radii = log_spaced(1e-4, 0.5, 16);
  for (const ScalarField& e : a.distinct_entries()) {
    OscillationModulus m = dini_mean_oscillation(e, radii, entry_sampling, 0.5);
    m.dini = dini_integral(m);
    if (!m.dini->finite) {
      dini.pass = false;
      dini.worst_margin = -1.0;
    }
    out.entry_moduli.push_back(std::move(m));
  }
  out.min_admissible_beta3 = beta3_needed;
  out.max_admissible_beta2 = beta2_allowed;
  out.clauses = {ellipticity, dini, confinement, growth};
  return out;
}

ConditionHParams check_condition_h(const DiffusionMatrixField& a, const DriftField& b,
                                   const Box& box, const SamplingSpec& sampling) {
  ConditionHParams out = evaluate_condition_h(a, b, box, sampling);
  for (const auto& c : out.clauses) {
    if (c.pass) continue;
    throw ConditionViolation(c.clause, c.witness,
                             "Condition (H) clause " + c.clause + " violated at " +
                                 kolmo::to_string(c.witness, a.dimension()) + " (slack " +
                                 std::to_string(c.worst_margin) + ")");
  }
  return out;
}

}  // namespace kolmo::coeffs
