#include "kolmo/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "kolmo/error.hpp"

namespace kolmo {

struct Expression::Node {
  enum class Op {
    constant, var_x0, var_x1, var_rx, var_y0, var_y1, var_ry,
    add, sub, mul, div, pow, neg,
    sin, cos, tan, exp, log, sqrt, abs, tanh, sinh, cosh, atan, sign, min, max
  };
  Op op = Op::constant;
  double value = 0.0;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(const Point& x, const Point& y) const {
    auto a = [&](std::size_t i) { return args[i]->eval(x, y); };
    switch (op) {
      case Op::constant: return value;
      case Op::var_x0: return x[0];
      case Op::var_x1: return x[1];
      case Op::var_rx: return norm(x);
      case Op::var_y0: return y[0];
      case Op::var_y1: return y[1];
      case Op::var_ry: return norm(y);
      case Op::add: return a(0) + a(1);
      case Op::sub: return a(0) - a(1);
      case Op::mul: return a(0) * a(1);
      case Op::div: return a(0) / a(1);
      case Op::pow: return std::pow(a(0), a(1));
      case Op::neg: return -a(0);
      case Op::sin: return std::sin(a(0));
      case Op::cos: return std::cos(a(0));
      case Op::tan: return std::tan(a(0));
      case Op::exp: return std::exp(a(0));
      case Op::log: return std::log(a(0));
      case Op::sqrt: return std::sqrt(a(0));
      case Op::abs: return std::abs(a(0));
      case Op::tanh: return std::tanh(a(0));
      case Op::sinh: return std::sinh(a(0));
      case Op::cosh: return std::cosh(a(0));
      case Op::atan: return std::atan(a(0));
      case Op::sign: {
        const double v = a(0);
        return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
      }
      case Op::min: return std::min(a(0), a(1));
      case Op::max: return std::max(a(0), a(1));
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Op op, std::vector<NodePtr> args = {}, double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  n->value = value;
  return n;
}

struct FunctionInfo {
  const char* name;
  Node::Op op;
  int arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"sin", Node::Op::sin, 1},   {"cos", Node::Op::cos, 1},   {"tan", Node::Op::tan, 1},
    {"exp", Node::Op::exp, 1},   {"log", Node::Op::log, 1},   {"sqrt", Node::Op::sqrt, 1},
    {"abs", Node::Op::abs, 1},   {"tanh", Node::Op::tanh, 1}, {"sinh", Node::Op::sinh, 1},
    {"cosh", Node::Op::cosh, 1}, {"atan", Node::Op::atan, 1}, {"sign", Node::Op::sign, 1},
    {"pow", Node::Op::pow, 2},   {"min", Node::Op::min, 2},   {"max", Node::Op::max, 2},
};

// Recursive-descent parser:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | '+' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | identifier | identifier '(' args ')' | '(' expr ')'
class Parser {
 public:
  Parser(const std::string& text, const ParameterMap& params) : s_(text), params_(params) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  bool uses_x = false;
  bool uses_y = false;
  int max_x_index = -1;

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression '" + s_ + "': " + what + " at offset " + std::to_string(pos_),
                     pos_);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Op::add, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Node::Op::sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Node::Op::mul, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Node::Op::div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Op::neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return make(Node::Op::pow, {base, unary()});
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make(Node::Op::constant, {}, v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name = s_.substr(start, pos_ - start);
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      for (const auto& f : kFunctions) {
        if (name != f.name) continue;
        ++pos_;
        std::vector<NodePtr> args;
        args.push_back(expr());
        while (accept(',')) args.push_back(expr());
        if (!accept(')')) fail("expected ')' after arguments of " + name);
        if (static_cast<int>(args.size()) != f.arity) {
          fail("function " + name + " takes " + std::to_string(f.arity) + " argument(s)");
        }
        return make(f.op, std::move(args));
      }
      fail("unknown function '" + name + "'");
    }
    if (name == "x" || name == "x1") return x_var(Node::Op::var_x0, 0);
    if (name == "x2") return x_var(Node::Op::var_x1, 1);
    if (name == "r") return x_var(Node::Op::var_rx, 0);
    if (name == "y" || name == "y1") return y_var(Node::Op::var_y0);
    if (name == "y2") return y_var(Node::Op::var_y1);
    if (name == "s") return y_var(Node::Op::var_ry);
    if (name == "pi") return make(Node::Op::constant, {}, std::numbers::pi);
    if (name == "e") return make(Node::Op::constant, {}, std::numbers::e);
    if (auto it = params_.find(name); it != params_.end()) {
      return make(Node::Op::constant, {}, it->second);
    }
    fail("unknown identifier '" + name + "'");
  }

  NodePtr x_var(Node::Op op, int index) {
    uses_x = true;
    max_x_index = std::max(max_x_index, index);
    return make(op);
  }

  NodePtr y_var(Node::Op op) {
    uses_y = true;
    return make(op);
  }

  const std::string& s_;
  const ParameterMap& params_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text, const ParameterMap& params) {
  Parser p(text, params);
  Expression e;
  e.root_ = p.parse();
  e.text_ = text;
  e.uses_x_ = p.uses_x;
  e.uses_y_ = p.uses_y;
  e.max_x_index_ = p.max_x_index;
  return e;
}

double Expression::evaluate(const Point& x, const Point& y) const { return root_->eval(x, y); }

}  // namespace kolmo
