#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "kolmo/geometry.hpp"

namespace kolmo {

using ParameterMap = std::map<std::string, double>;

/// Closed-form arithmetic expression over a point x (and, for interaction
/// kernels, a second point y).
///
/// Grammar: numbers, `+ - * / ^`, parentheses, unary minus, the variables
/// `x x1 x2 r` (r = |x|) and `y y1 y2 s` (s = |y|), the constants `pi e`,
/// named parameters, and the functions
/// `sin cos tan exp log sqrt abs tanh sinh cosh atan sign pow min max`.
/// Parameters are substituted at parse time, so an Expression is immutable.
class Expression {
 public:
  static Expression parse(const std::string& text, const ParameterMap& params = {});

  double operator()(const Point& x) const { return evaluate(x, Point{}); }
  double evaluate(const Point& x, const Point& y) const;

  const std::string& text() const noexcept { return text_; }
  /// True when the expression references one of the y variables.
  bool uses_y() const noexcept { return uses_y_; }
  /// True when the expression references one of the x variables.
  bool uses_x() const noexcept { return uses_x_; }
  /// Highest x coordinate index referenced (0 for x/x1, 1 for x2), -1 if none.
  int max_x_index() const noexcept { return max_x_index_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  bool uses_x_ = false;
  bool uses_y_ = false;
  int max_x_index_ = -1;
};

}  // namespace kolmo
