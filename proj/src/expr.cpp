#include "czono/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace czono {

struct Expr::Node {
  enum Kind {
    kConstant,
    kVariable,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kNeg,
    kPow,
    kSin,
    kCos,
    kTan,
    kAtan,
    kAsin,
    kExp,
    kLog,
    kSqrt,
    kAbs,
    kSign
  };
  int kind;
  double value = 0.0;
  int var = -1;
  int exponent = 0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(int kind, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr const_node(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::kConstant;
  n->value = v;
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == Node::kConstant && n->value == v;
}

}  // namespace

Expr::Expr() : node_(const_node(0.0)) {}

Expr Expr::constant(double v) {
  if (!std::isfinite(v)) throw DomainError("expression constant must be finite");
  return Expr(const_node(v));
}

Expr Expr::variable(int index) {
  if (index < 0) throw DomainError("variable index must be nonnegative");
  auto n = std::make_shared<Node>();
  n->kind = Node::kVariable;
  n->var = index;
  return Expr(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.node_->kind == Node::kConstant && b.node_->kind == Node::kConstant) {
    return Expr::constant(a.node_->value + b.node_->value);
  }
  if (is_const(a.node_, 0.0)) return b;
  if (is_const(b.node_, 0.0)) return a;
  return Expr(make_node(Node::kAdd, a.node_, b.node_));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.node_->kind == Node::kConstant && b.node_->kind == Node::kConstant) {
    return Expr::constant(a.node_->value - b.node_->value);
  }
  if (is_const(b.node_, 0.0)) return a;
  if (is_const(a.node_, 0.0)) return -b;
  return Expr(make_node(Node::kSub, a.node_, b.node_));
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.node_->kind == Node::kConstant && b.node_->kind == Node::kConstant) {
    return Expr::constant(a.node_->value * b.node_->value);
  }
  if (is_const(a.node_, 0.0) || is_const(b.node_, 0.0)) return Expr();
  if (is_const(a.node_, 1.0)) return b;
  if (is_const(b.node_, 1.0)) return a;
  if (is_const(a.node_, -1.0)) return -b;
  if (is_const(b.node_, -1.0)) return -a;
  return Expr(make_node(Node::kMul, a.node_, b.node_));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.node_->kind == Node::kConstant && b.node_->kind == Node::kConstant &&
      b.node_->value != 0.0) {
    return Expr::constant(a.node_->value / b.node_->value);
  }
  if (is_const(a.node_, 0.0)) return Expr();
  if (is_const(b.node_, 1.0)) return a;
  return Expr(make_node(Node::kDiv, a.node_, b.node_));
}

Expr Expr::operator-() const {
  if (node_->kind == Node::kConstant) return constant(-node_->value);
  if (node_->kind == Node::kNeg) return Expr(node_->a);
  return Expr(make_node(Node::kNeg, node_));
}

Expr Expr::pow(int exponent) const {
  if (exponent == 0) return constant(1.0);
  if (exponent == 1) return *this;
  if (node_->kind == Node::kConstant) {
    const double v = std::pow(node_->value, exponent);
    if (std::isfinite(v)) return constant(v);
  }
  auto n = std::make_shared<Node>();
  n->kind = Node::kPow;
  n->exponent = exponent;
  n->a = node_;
  return Expr(std::move(n));
}

Expr make_unary(int kind, const Expr& a) {
  if (a.node_->kind == Node::kConstant) {
    const double v = a.node_->value;
    double r = std::numeric_limits<double>::quiet_NaN();
    switch (kind) {
      case Node::kSin: r = std::sin(v); break;
      case Node::kCos: r = std::cos(v); break;
      case Node::kTan: r = std::tan(v); break;
      case Node::kAtan: r = std::atan(v); break;
      case Node::kAsin: r = std::asin(v); break;
      case Node::kExp: r = std::exp(v); break;
      case Node::kLog: r = std::log(v); break;
      case Node::kSqrt: r = std::sqrt(v); break;
      case Node::kAbs: r = std::abs(v); break;
      case Node::kSign: r = (v > 0.0) - (v < 0.0); break;
      default: break;
    }
    if (std::isfinite(r)) return Expr::constant(r);
  }
  return Expr(make_node(kind, a.node_));
}

Expr sin(const Expr& a) { return make_unary(Node::kSin, a); }
Expr cos(const Expr& a) { return make_unary(Node::kCos, a); }
Expr tan(const Expr& a) { return make_unary(Node::kTan, a); }
Expr atan(const Expr& a) { return make_unary(Node::kAtan, a); }
Expr asin(const Expr& a) { return make_unary(Node::kAsin, a); }
Expr exp(const Expr& a) { return make_unary(Node::kExp, a); }
Expr log(const Expr& a) { return make_unary(Node::kLog, a); }
Expr sqrt(const Expr& a) { return make_unary(Node::kSqrt, a); }
Expr abs(const Expr& a) { return make_unary(Node::kAbs, a); }

namespace {

Expr sign_of(const Expr& a) { return make_unary(Node::kSign, a); }

double eval_node(const Node& n, const std::vector<double>& point) {
  auto finite = [](double v) {
    if (!std::isfinite(v)) throw DomainError("expression evaluation left the real domain");
    return v;
  };
  switch (n.kind) {
    case Node::kConstant: return n.value;
    case Node::kVariable:
      if (n.var >= static_cast<int>(point.size())) {
        throw DimensionMismatch("evaluation point is missing a variable");
      }
      return point[static_cast<std::size_t>(n.var)];
    case Node::kAdd: return finite(eval_node(*n.a, point) + eval_node(*n.b, point));
    case Node::kSub: return finite(eval_node(*n.a, point) - eval_node(*n.b, point));
    case Node::kMul: return finite(eval_node(*n.a, point) * eval_node(*n.b, point));
    case Node::kDiv: {
      const double d = eval_node(*n.b, point);
      if (d == 0.0) throw DomainError("division by zero");
      return finite(eval_node(*n.a, point) / d);
    }
    case Node::kNeg: return -eval_node(*n.a, point);
    case Node::kPow: return finite(std::pow(eval_node(*n.a, point), n.exponent));
    case Node::kSin: return std::sin(eval_node(*n.a, point));
    case Node::kCos: return std::cos(eval_node(*n.a, point));
    case Node::kTan: return finite(std::tan(eval_node(*n.a, point)));
    case Node::kAtan: return std::atan(eval_node(*n.a, point));
    case Node::kAsin: return finite(std::asin(eval_node(*n.a, point)));
    case Node::kExp: return finite(std::exp(eval_node(*n.a, point)));
    case Node::kLog: return finite(std::log(eval_node(*n.a, point)));
    case Node::kSqrt: return finite(std::sqrt(eval_node(*n.a, point)));
    case Node::kAbs: return std::abs(eval_node(*n.a, point));
    case Node::kSign: {
      const double v = eval_node(*n.a, point);
      return static_cast<double>((v > 0.0) - (v < 0.0));
    }
  }
  throw NumericalFailure("unreachable expression kind");
}

Interval eval_node(const Node& n, const Box& box) {
  switch (n.kind) {
    case Node::kConstant: return Interval(n.value);
    case Node::kVariable:
      if (n.var >= static_cast<int>(box.size())) {
        throw DimensionMismatch("evaluation box is missing a variable");
      }
      return box[static_cast<std::size_t>(n.var)];
    case Node::kAdd: return eval_node(*n.a, box) + eval_node(*n.b, box);
    case Node::kSub: return eval_node(*n.a, box) - eval_node(*n.b, box);
    case Node::kMul: return eval_node(*n.a, box) * eval_node(*n.b, box);
    case Node::kDiv: return eval_node(*n.a, box) / eval_node(*n.b, box);
    case Node::kNeg: return -eval_node(*n.a, box);
    case Node::kPow: return pow_int(eval_node(*n.a, box), n.exponent);
    case Node::kSin: return sin(eval_node(*n.a, box));
    case Node::kCos: return cos(eval_node(*n.a, box));
    case Node::kTan: return tan(eval_node(*n.a, box));
    case Node::kAtan: return atan(eval_node(*n.a, box));
    case Node::kAsin: return asin(eval_node(*n.a, box));
    case Node::kExp: return exp(eval_node(*n.a, box));
    case Node::kLog: return log(eval_node(*n.a, box));
    case Node::kSqrt: return sqrt(eval_node(*n.a, box));
    case Node::kAbs: return abs(eval_node(*n.a, box));
    case Node::kSign: return sign(eval_node(*n.a, box));
  }
  throw NumericalFailure("unreachable expression kind");
}

}  // namespace

double Expr::eval(const std::vector<double>& point) const { return eval_node(*node_, point); }
Interval Expr::eval(const Box& box) const { return eval_node(*node_, box); }

Expr Expr::derivative(int var) const {
  const Node& n = *node_;
  const Expr a = n.a ? Expr(n.a) : Expr();
  const Expr b = n.b ? Expr(n.b) : Expr();
  switch (n.kind) {
    case Node::kConstant: return Expr();
    case Node::kVariable: return n.var == var ? constant(1.0) : Expr();
    case Node::kAdd: return a.derivative(var) + b.derivative(var);
    case Node::kSub: return a.derivative(var) - b.derivative(var);
    case Node::kMul: return a.derivative(var) * b + a * b.derivative(var);
    case Node::kDiv:
      return (a.derivative(var) * b - a * b.derivative(var)) / (b * b);
    case Node::kNeg: return -a.derivative(var);
    case Node::kPow:
      return constant(static_cast<double>(n.exponent)) * a.pow(n.exponent - 1) *
             a.derivative(var);
    case Node::kSin: return cos(a) * a.derivative(var);
    case Node::kCos: return -(sin(a) * a.derivative(var));
    case Node::kTan: return (constant(1.0) + tan(a) * tan(a)) * a.derivative(var);
    case Node::kAtan: return a.derivative(var) / (constant(1.0) + a * a);
    case Node::kAsin: return a.derivative(var) / sqrt(constant(1.0) - a * a);
    case Node::kExp: return exp(a) * a.derivative(var);
    case Node::kLog: return a.derivative(var) / a;
    case Node::kSqrt: return a.derivative(var) / (constant(2.0) * sqrt(a));
    case Node::kAbs: return sign_of(a) * a.derivative(var);
    case Node::kSign:
      throw NonSmooth("abs cannot be differentiated twice");
  }
  throw NumericalFailure("unreachable expression kind");
}

Expr Expr::substitute(int var, double value) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Node::kConstant: return *this;
    case Node::kVariable: return n.var == var ? constant(value) : *this;
    default: break;
  }
  const Expr a = n.a ? Expr(n.a).substitute(var, value) : Expr();
  switch (n.kind) {
    case Node::kAdd: return a + Expr(n.b).substitute(var, value);
    case Node::kSub: return a - Expr(n.b).substitute(var, value);
    case Node::kMul: return a * Expr(n.b).substitute(var, value);
    case Node::kDiv: return a / Expr(n.b).substitute(var, value);
    case Node::kNeg: return -a;
    case Node::kPow: return a.pow(n.exponent);
    default: return make_unary(n.kind, a);
  }
}

Expr Expr::shift_variables(int first, int delta) const {
  if (delta == 0) return *this;
  const Node& n = *node_;
  switch (n.kind) {
    case Node::kConstant: return *this;
    case Node::kVariable:
      return n.var >= first ? variable(n.var + delta) : *this;
    default: break;
  }
  const Expr a = n.a ? Expr(n.a).shift_variables(first, delta) : Expr();
  switch (n.kind) {
    case Node::kAdd: return a + Expr(n.b).shift_variables(first, delta);
    case Node::kSub: return a - Expr(n.b).shift_variables(first, delta);
    case Node::kMul: return a * Expr(n.b).shift_variables(first, delta);
    case Node::kDiv: return a / Expr(n.b).shift_variables(first, delta);
    case Node::kNeg: return -a;
    case Node::kPow: return a.pow(n.exponent);
    default: return make_unary(n.kind, a);
  }
}

bool Expr::is_zero() const { return is_const(node_, 0.0); }
bool Expr::is_constant() const { return node_->kind == Node::kConstant; }

double Expr::constant_value() const {
  if (!is_constant()) throw DomainError("expression is not a constant");
  return node_->value;
}

int Expr::max_variable() const {
  const Node& n = *node_;
  if (n.kind == Node::kVariable) return n.var;
  int m = -1;
  if (n.a) m = std::max(m, Expr(n.a).max_variable());
  if (n.b) m = std::max(m, Expr(n.b).max_variable());
  return m;
}

bool Expr::same_structure(const Expr& other) const {
  const Node& x = *node_;
  const Node& y = *other.node_;
  if (x.kind != y.kind || x.value != y.value || x.var != y.var ||
      x.exponent != y.exponent) {
    return false;
  }
  if ((x.a == nullptr) != (y.a == nullptr) || (x.b == nullptr) != (y.b == nullptr)) {
    return false;
  }
  if (x.a && !Expr(x.a).same_structure(Expr(y.a))) return false;
  if (x.b && !Expr(x.b).same_structure(Expr(y.b))) return false;
  return true;
}

namespace {

int precedence(int kind) {
  switch (kind) {
    case Node::kAdd:
    case Node::kSub: return 1;
    case Node::kMul:
    case Node::kDiv: return 2;
    case Node::kNeg: return 3;
    case Node::kPow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string print_node(const Node& n, const std::vector<std::string>& names);

std::string print_child(const NodePtr& child, const std::vector<std::string>& names,
                        int min_prec) {
  std::string s = print_node(*child, names);
  if (precedence(child->kind) < min_prec ||
      (child->kind == Node::kConstant && child->value < 0.0 && min_prec > 1)) {
    return "(" + s + ")";
  }
  return s;
}

std::string print_node(const Node& n, const std::vector<std::string>& names) {
  switch (n.kind) {
    case Node::kConstant: return format_number(n.value);
    case Node::kVariable:
      if (n.var < static_cast<int>(names.size())) return names[static_cast<std::size_t>(n.var)];
      return "#" + std::to_string(n.var);
    case Node::kAdd:
      return print_child(n.a, names, 1) + " + " + print_child(n.b, names, 1);
    case Node::kSub:
      return print_child(n.a, names, 1) + " - " + print_child(n.b, names, 2);
    case Node::kMul:
      return print_child(n.a, names, 2) + "*" + print_child(n.b, names, 2);
    case Node::kDiv:
      return print_child(n.a, names, 2) + "/" + print_child(n.b, names, 3);
    case Node::kNeg: return "-" + print_child(n.a, names, 3);
    case Node::kPow:
      return print_child(n.a, names, 5) + "^" + std::to_string(n.exponent);
    case Node::kSin: return "sin(" + print_node(*n.a, names) + ")";
    case Node::kCos: return "cos(" + print_node(*n.a, names) + ")";
    case Node::kTan: return "tan(" + print_node(*n.a, names) + ")";
    case Node::kAtan: return "atan(" + print_node(*n.a, names) + ")";
    case Node::kAsin: return "asin(" + print_node(*n.a, names) + ")";
    case Node::kExp: return "exp(" + print_node(*n.a, names) + ")";
    case Node::kLog: return "ln(" + print_node(*n.a, names) + ")";
    case Node::kSqrt: return "sqrt(" + print_node(*n.a, names) + ")";
    case Node::kAbs: return "abs(" + print_node(*n.a, names) + ")";
    case Node::kSign: return "sign(" + print_node(*n.a, names) + ")";
  }
  throw NumericalFailure("unreachable expression kind");
}

class Parser {
public:
  Parser(const std::string& text, const std::vector<std::string>& vars)
      : s_(text), vars_(vars) {}

  Expr run() {
    Expr e = parse_expression();
    skip_ws();
    if (i_ < s_.size()) throw SyntaxError("unexpected trailing input", i_);
    return e;
  }

private:
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  char peek() {
    skip_ws();
    return i_ < s_.size() ? s_[i_] : '\0';
  }
  bool eat(char c) {
    if (peek() == c) {
      ++i_;
      return true;
    }
    return false;
  }

  Expr parse_expression() {
    Expr e = parse_term();
    for (;;) {
      if (eat('+')) {
        e = e + parse_term();
      } else if (eat('-')) {
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    for (;;) {
      if (eat('*')) {
        e = e * parse_unary();
      } else if (eat('/')) {
        e = e / parse_unary();
      } else {
        return e;
      }
    }
  }

  Expr parse_unary() {
    if (eat('-')) return -parse_unary();
    if (eat('+')) return parse_unary();
    return parse_postfix();
  }

  Expr parse_postfix() {
    Expr e = parse_atom();
    if (eat('^')) {
      const bool negative = eat('-');
      skip_ws();
      const std::size_t start = i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      if (i_ == start) throw SyntaxError("integer exponent expected after '^'", i_);
      if (i_ < s_.size() && s_[i_] == '.') {
        throw SyntaxError("exponent must be an integer literal", i_);
      }
      long k = 0;
      for (std::size_t p = start; p < i_; ++p) {
        k = k * 10 + (s_[p] - '0');
        if (k > 1000000) throw SyntaxError("exponent too large", start);
      }
      e = e.pow(static_cast<int>(negative ? -k : k));
    }
    return e;
  }

  Expr parse_atom() {
    skip_ws();
    if (i_ >= s_.size()) throw SyntaxError("unexpected end of input", i_);
    const char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + i_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin || !std::isfinite(v)) {
        throw SyntaxError("malformed number", i_);
      }
      i_ += static_cast<std::size_t>(end - begin);
      return Expr::constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = i_;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
        ++i_;
      }
      const std::string name = s_.substr(start, i_ - start);
      if (peek() == '(') {
        const int kind = function_kind(name);
        if (kind < 0) {
          throw UnknownVariable("unknown function '" + name + "'");
        }
        ++i_;  // '('
        Expr inner = parse_expression();
        if (!eat(')')) throw SyntaxError("expected ')'", i_);
        return make_unary(kind, inner);
      }
      for (std::size_t v = 0; v < vars_.size(); ++v) {
        if (vars_[v] == name) return Expr::variable(static_cast<int>(v));
      }
      throw UnknownVariable("unknown variable '" + name + "'");
    }
    if (c == '(') {
      ++i_;
      Expr inner = parse_expression();
      if (!eat(')')) throw SyntaxError("expected ')'", i_);
      return inner;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", i_);
  }

  static int function_kind(const std::string& name) {
    if (name == "sin") return Node::kSin;
    if (name == "cos") return Node::kCos;
    if (name == "tan") return Node::kTan;
    if (name == "atan" || name == "arctan") return Node::kAtan;
    if (name == "asin" || name == "arcsin") return Node::kAsin;
    if (name == "exp") return Node::kExp;
    if (name == "ln" || name == "log") return Node::kLog;
    if (name == "sqrt") return Node::kSqrt;
    if (name == "abs") return Node::kAbs;
    return -1;
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t i_ = 0;
};

}  // namespace

std::string Expr::to_string(const std::vector<std::string>& names) const {
  return print_node(*node_, names);
}

Expr parse_expr(const std::string& text, const std::vector<std::string>& vars) {
  return Parser(text, vars).run();
}

Expr differentiate(const Expr& e, int var) { return e.derivative(var); }

std::vector<std::vector<Expr>> jacobian(const std::vector<Expr>& eqs, int n_vars) {
  std::vector<std::vector<Expr>> jac;
  jac.reserve(eqs.size());
  for (const Expr& e : eqs) {
    std::vector<Expr> row;
    row.reserve(static_cast<std::size_t>(n_vars));
    for (int j = 0; j < n_vars; ++j) row.push_back(e.derivative(j));
    jac.push_back(std::move(row));
  }
  return jac;
}

std::vector<std::vector<std::vector<Expr>>> half_hessian(const std::vector<Expr>& eqs,
                                                         int n_vars) {
  std::vector<std::vector<std::vector<Expr>>> out;
  out.reserve(eqs.size());
  for (const Expr& e : eqs) {
    std::vector<Expr> grad;
    grad.reserve(static_cast<std::size_t>(n_vars));
    for (int i = 0; i < n_vars; ++i) grad.push_back(e.derivative(i));
    std::vector<std::vector<Expr>> h(static_cast<std::size_t>(n_vars),
                                     std::vector<Expr>(static_cast<std::size_t>(n_vars)));
    for (int i = 0; i < n_vars; ++i) {
      h[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] =
          Expr::constant(0.5) * grad[static_cast<std::size_t>(i)].derivative(i);
      for (int j = i + 1; j < n_vars; ++j) {
        h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            grad[static_cast<std::size_t>(i)].derivative(j);
      }
    }
    out.push_back(std::move(h));
  }
  return out;
}

double eval_real(const Expr& e, const std::vector<double>& point) { return e.eval(point); }
Interval eval_interval(const Expr& e, const Box& box) { return e.eval(box); }

}  // namespace czono
