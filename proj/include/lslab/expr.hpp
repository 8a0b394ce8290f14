#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace lslab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class Variable { X, Y, R, Theta };

// Values bound to the four variables of the expression language. r and theta
// are normally derived from (x, y); boundary curves bind theta directly.
struct Bindings {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
  double theta = 0.0;

  static Bindings at(Point p);
  static Bindings at_angle(double theta);
};

namespace detail {
struct ExprNode;
}

// Immutable scalar expression over {x, y, r, theta}, constants {pi, e}, the
// operators + - * / ^ and the functions sin cos tan exp log sqrt abs.
// Copies share the underlying tree.
class ScalarExpr {
 public:
  ScalarExpr();  // the constant 0
  static ScalarExpr constant(double value);

  double evaluate(const Bindings& b) const;
  double evaluate(Point p) const { return evaluate(Bindings::at(p)); }

  // Canonical fully-parenthesised text; parse(to_string()) evaluates
  // bit-identically to the original tree.
  std::string to_string() const;

  bool uses(Variable v) const;
  bool is_constant() const;  // no variable references at all

  // Symbolic derivative with respect to theta. Only defined for expressions
  // that do not reference x, y or r (boundary radii).
  ScalarExpr derivative_theta() const;

  const detail::ExprNode& node() const { return *root_; }

 private:
  explicit ScalarExpr(std::shared_ptr<const detail::ExprNode> root) : root_(std::move(root)) {}
  std::shared_ptr<const detail::ExprNode> root_;

  friend ScalarExpr parse_expression(std::string_view src);
  friend class ExprBuilder;
};

// Throws SyntaxError (with byte offset) or UnknownIdentifier.
ScalarExpr parse_expression(std::string_view src);

// Throws DomainError for log/sqrt/division/power outside their domain or any
// non-finite result.
double evaluate_expr(const ScalarExpr& expr, Point p);

}  // namespace lslab
