#include "kolmo/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kolmo/error.hpp"

namespace kolmo {

std::string Smoothness::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::smooth: return "smooth";
    case Kind::holder: os << "holder(" << exponent << ")"; return os.str();
    case Kind::dini_log: os << "dini-log(" << exponent << ")"; return os.str();
    case Kind::rough: return "rough";
  }
  return "rough";
}

namespace {

void require_dimension(int d) {
  if (d != 1 && d != 2) throw DomainError("dimension must be 1 or 2, got " + std::to_string(d));
}

}  // namespace

ScalarField ScalarField::closed_form(int dimension, Evaluator f, Smoothness smoothness,
                                     std::string description) {
  require_dimension(dimension);
  ScalarField s;
  s.eval_ = std::make_shared<const Evaluator>(std::move(f));
  s.dimension_ = dimension;
  s.smoothness_ = smoothness;
  s.description_ = std::move(description);
  return s;
}

ScalarField ScalarField::from_expression(int dimension, const Expression& e,
                                         Smoothness smoothness) {
  if (e.uses_y()) {
    throw DomainError("field expression '" + e.text() + "' references y variables");
  }
  if (e.max_x_index() >= dimension) {
    throw DomainError("field expression '" + e.text() + "' uses x2 in dimension 1");
  }
  ScalarField s = closed_form(
      dimension, [e](const Point& x) { return e(x); }, smoothness, e.text());
  if (!e.uses_x()) s.constant_ = e(Point{});
  return s;
}

ScalarField ScalarField::constant(int dimension, double value) {
  ScalarField s = closed_form(
      dimension, [value](const Point&) { return value; }, Smoothness::smooth(),
      "constant(" + std::to_string(value) + ")");
  s.constant_ = value;
  return s;
}

ScalarField ScalarField::sampled(int dimension, double lo, double hi, int count,
                                 std::vector<double> values, Smoothness smoothness) {
  require_dimension(dimension);
  if (count < 2 || !(hi > lo)) throw DomainError("sampled field needs count >= 2 and hi > lo");
  const std::size_t expected =
      dimension == 1 ? static_cast<std::size_t>(count) : static_cast<std::size_t>(count) * count;
  if (values.size() != expected) {
    throw ShapeError("sampled field expects " + std::to_string(expected) + " values, got " +
                     std::to_string(values.size()));
  }
  const double step = (hi - lo) / (count - 1);
  auto data = std::make_shared<const std::vector<double>>(std::move(values));
  // Locate the cell and the local coordinate in [0, 1]; clamps outside.
  auto locate = [lo, step, count](double x, int& i, double& t) {
    const double u = std::clamp((x - lo) / step, 0.0, static_cast<double>(count - 1));
    i = std::min(static_cast<int>(u), count - 2);
    t = u - i;
  };
  Evaluator f;
  if (dimension == 1) {
    f = [data, locate](const Point& x) {
      int i;
      double t;
      locate(x[0], i, t);
      return (1.0 - t) * (*data)[i] + t * (*data)[i + 1];
    };
  } else {
    f = [data, locate, count](const Point& x) {
      int i, j;
      double s, t;
      locate(x[0], i, s);
      locate(x[1], j, t);
      auto at = [&](int a, int b) { return (*data)[static_cast<std::size_t>(b) * count + a]; };
      return (1.0 - s) * (1.0 - t) * at(i, j) + s * (1.0 - t) * at(i + 1, j) +
             (1.0 - s) * t * at(i, j + 1) + s * t * at(i + 1, j + 1);
    };
  }
  return closed_form(dimension, std::move(f), smoothness, "sampled grid field");
}

DiffusionMatrixField DiffusionMatrixField::scalar(ScalarField a, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in (0, 1]");
  DiffusionMatrixField m;
  m.dimension_ = a.dimension();
  if (m.dimension_ == 1) {
    m.entries_ = {std::move(a)};
  } else {
    // a * I in two dimensions.
    m.entries_ = {a, ScalarField::constant(2, 0.0), a};
  }
  m.lambda_ = lambda;
  return m;
}

DiffusionMatrixField DiffusionMatrixField::matrix(ScalarField a11, ScalarField a12,
                                                  ScalarField a22, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in (0, 1]");
  if (a11.dimension() != 2 || a12.dimension() != 2 || a22.dimension() != 2) {
    throw ShapeError("matrix diffusion entries must all be two-dimensional fields");
  }
  DiffusionMatrixField m;
  m.dimension_ = 2;
  m.entries_ = {std::move(a11), std::move(a12), std::move(a22)};
  m.lambda_ = lambda;
  return m;
}

DiffusionMatrixField DiffusionMatrixField::identity(int dimension) {
  return scalar(ScalarField::constant(dimension, 1.0), 1.0);
}

SymMatrix2 DiffusionMatrixField::operator()(const Point& x) const {
  if (dimension_ == 1) return {entries_[0](x), 0.0, 0.0};
  return {entries_[0](x), entries_[1](x), entries_[2](x)};
}

const ScalarField& DiffusionMatrixField::entry(int i, int j) const {
  if (i < 0 || j < 0 || i >= dimension_ || j >= dimension_) {
    throw DomainError("diffusion entry index out of range");
  }
  if (dimension_ == 1) return entries_[0];
  if (i != j) return entries_[1];
  return i == 0 ? entries_[0] : entries_[2];
}

bool DiffusionMatrixField::is_constant() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const ScalarField& f) { return f.constant_value().has_value(); });
}

DiffusionMatrixField DiffusionMatrixField::with_lambda(double lambda) const {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in (0, 1]");
  DiffusionMatrixField m = *this;
  m.lambda_ = lambda;
  return m;
}

DriftField::DriftField(std::vector<ScalarField> components, DriftParams params)
    : components_(std::move(components)), params_(params) {
  if (components_.empty() || components_.size() > 2) {
    throw ShapeError("drift must have 1 or 2 components");
  }
  for (const auto& c : components_) {
    if (c.dimension() != dimension()) {
      throw ShapeError("drift component dimension does not match the number of components");
    }
  }
  if (!(params_.beta >= 1.0) || !(params_.beta1 > 0.0) || !(params_.beta2 > 0.0) ||
      !(params_.beta3 > 0.0)) {
    throw DomainError("drift parameters need beta >= 1 and beta1, beta2, beta3 > 0");
  }
}

Point DriftField::operator()(const Point& x) const {
  Point out{};
  for (std::size_t i = 0; i < components_.size(); ++i) out[i] = components_[i](x);
  return out;
}

DriftField DriftField::with_params(DriftParams params) const {
  return DriftField(components_, params);
}

DriftField shifted(const DriftField& b, const Point& offset) {
  std::vector<ScalarField> comps;
  for (int i = 0; i < b.dimension(); ++i) {
    const ScalarField& c = b.components()[i];
    const double shift = offset[i];
    if (shift == 0.0) {
      comps.push_back(c);
      continue;
    }
    comps.push_back(ScalarField::closed_form(
        b.dimension(), [c, shift](const Point& x) { return c(x) + shift; }, c.smoothness(),
        c.description() + " + " + std::to_string(shift)));
  }
  return DriftField(std::move(comps), b.params());
}

}  // namespace kolmo
