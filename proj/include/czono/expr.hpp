#pragma once

#include <memory>
#include <string>
#include <vector>

#include "czono/errors.hpp"
#include "czono/interval.hpp"

namespace czono {

// Immutable arithmetic expression over indexed variables. Construction folds
// constants and strips algebraic no-ops (x+0, 1*x, ...), so structurally-zero
// results of differentiation really are the constant 0.
//
// The sign node is internal: it appears when abs is differentiated (derivative
// convention: sign with sign(0) = 0) and cannot be written in the input
// grammar. Differentiating sign itself raises NonSmooth, which is how second
// derivatives of abs are rejected.
class Expr {
public:
  Expr();  // the constant 0
  static Expr constant(double v);
  static Expr variable(int index);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr operator-() const;
  Expr pow(int exponent) const;

  double eval(const std::vector<double>& point) const;
  Interval eval(const Box& box) const;

  Expr derivative(int var) const;
  Expr substitute(int var, double value) const;
  // Renumbers every variable index >= first by delta. Used to close one block
  // of variables over constants and compact the remaining indices.
  Expr shift_variables(int first, int delta) const;

  bool is_zero() const;
  bool is_constant() const;
  double constant_value() const;  // DomainError unless is_constant()
  int max_variable() const;       // largest variable index used; -1 when none

  bool same_structure(const Expr& other) const;
  // names[i] labels variable i; indices beyond the list print as #i.
  std::string to_string(const std::vector<std::string>& names) const;

  struct Node;  // definition private to the implementation file

private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend Expr make_unary(int kind, const Expr& a);
};

Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);
Expr atan(const Expr& a);
Expr asin(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr abs(const Expr& a);

// Parses the documented infix grammar (docs/expr-grammar.md). Identifiers are
// looked up in vars; unknown names raise UnknownVariable, malformed input
// raises SyntaxError carrying the byte offset.
Expr parse_expr(const std::string& text, const std::vector<std::string>& vars);

// Exact symbolic partial derivative (abs -> sign with derivative 0 at 0).
Expr differentiate(const Expr& e, int var);

// jac[q][j] = d eq[q] / d z_j for j in [0, n_vars).
std::vector<std::vector<Expr>> jacobian(const std::vector<Expr>& eqs, int n_vars);

// Per component q an n x n matrix: diagonal = half the pure second
// derivative, strict upper triangle = the mixed derivative, lower = 0.
// Raises NonSmooth when abs sits on a twice-differentiated path.
std::vector<std::vector<std::vector<Expr>>> half_hessian(const std::vector<Expr>& eqs,
                                                         int n_vars);

double eval_real(const Expr& e, const std::vector<double>& point);
Interval eval_interval(const Expr& e, const Box& box);

}  // namespace czono
