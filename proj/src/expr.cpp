#include "lslab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "lslab/error.hpp"

namespace lslab {

namespace detail {

enum class NodeKind { Number, Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class NamedConst { Pi, E };
enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Abs };

struct ExprNode {
  NodeKind kind = NodeKind::Number;
  double value = 0.0;
  NamedConst named = NamedConst::Pi;
  Variable var = Variable::X;
  Func func = Func::Sin;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

}  // namespace detail

using detail::ExprNode;
using detail::Func;
using detail::NamedConst;
using detail::NodeKind;
using NodePtr = std::shared_ptr<const ExprNode>;

namespace {

struct FuncInfo {
  const char* name;
  Func func;
};

constexpr FuncInfo kFunctions[] = {
    {"sin", Func::Sin}, {"cos", Func::Cos},   {"tan", Func::Tan}, {"exp", Func::Exp},
    {"log", Func::Log}, {"sqrt", Func::Sqrt}, {"abs", Func::Abs},
};

const char* func_name(Func f) {
  for (const auto& info : kFunctions)
    if (info.func == f) return info.name;
  return "?";
}

NodePtr make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Number;
  n->value = v;
  return n;
}

NodePtr make_const(NamedConst c) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Const;
  n->named = c;
  return n;
}

NodePtr make_var(Variable v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Var;
  n->var = v;
  return n;
}

NodePtr make_unary(NodeKind k, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->lhs = std::move(a);
  return n;
}

NodePtr make_binary(NodeKind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

NodePtr make_call(Func f, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Call;
  n->func = f;
  n->lhs = std::move(a);
  return n;
}

double checked(const char* what, double arg, double result) {
  if (!std::isfinite(result)) throw DomainError(what, arg);
  return result;
}

double eval(const ExprNode& n, const Bindings& b) {
  switch (n.kind) {
    case NodeKind::Number:
      return n.value;
    case NodeKind::Const:
      return n.named == NamedConst::Pi ? std::numbers::pi : std::numbers::e;
    case NodeKind::Var:
      switch (n.var) {
        case Variable::X: return b.x;
        case Variable::Y: return b.y;
        case Variable::R: return b.r;
        case Variable::Theta: return b.theta;
      }
      return 0.0;
    case NodeKind::Neg:
      return -eval(*n.lhs, b);
    case NodeKind::Add:
      return eval(*n.lhs, b) + eval(*n.rhs, b);
    case NodeKind::Sub:
      return eval(*n.lhs, b) - eval(*n.rhs, b);
    case NodeKind::Mul:
      return eval(*n.lhs, b) * eval(*n.rhs, b);
    case NodeKind::Div: {
      const double num = eval(*n.lhs, b);
      const double den = eval(*n.rhs, b);
      if (den == 0.0) throw DomainError("/", den);
      return checked("/", den, num / den);
    }
    case NodeKind::Pow: {
      const double base = eval(*n.lhs, b);
      const double ex = eval(*n.rhs, b);
      return checked("^", base, std::pow(base, ex));
    }
    case NodeKind::Call: {
      const double a = eval(*n.lhs, b);
      switch (n.func) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Tan: return checked("tan", a, std::tan(a));
        case Func::Exp: return checked("exp", a, std::exp(a));
        case Func::Log:
          if (!(a > 0.0)) throw DomainError("log", a);
          return std::log(a);
        case Func::Sqrt:
          if (a < 0.0) throw DomainError("sqrt", a);
          return std::sqrt(a);
        case Func::Abs: return std::fabs(a);
      }
    }
  }
  return 0.0;
}

void print(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case NodeKind::Const:
      out += n.named == NamedConst::Pi ? "pi" : "e";
      return;
    case NodeKind::Var:
      switch (n.var) {
        case Variable::X: out += "x"; break;
        case Variable::Y: out += "y"; break;
        case Variable::R: out += "r"; break;
        case Variable::Theta: out += "theta"; break;
      }
      return;
    case NodeKind::Neg:
      out += "(-";
      print(*n.lhs, out);
      out += ")";
      return;
    case NodeKind::Call:
      out += func_name(n.func);
      out += "(";
      print(*n.lhs, out);
      out += ")";
      return;
    default: {
      char op = '+';
      if (n.kind == NodeKind::Sub) op = '-';
      if (n.kind == NodeKind::Mul) op = '*';
      if (n.kind == NodeKind::Div) op = '/';
      if (n.kind == NodeKind::Pow) op = '^';
      out += "(";
      print(*n.lhs, out);
      out += op;
      print(*n.rhs, out);
      out += ")";
    }
  }
}

bool uses_var(const ExprNode& n, Variable v) {
  if (n.kind == NodeKind::Var) return n.var == v;
  bool used = false;
  if (n.lhs) used = used || uses_var(*n.lhs, v);
  if (n.rhs) used = used || uses_var(*n.rhs, v);
  return used;
}

// Recursive-descent parser. Precedence, lowest first:
//   sum    := product (('+'|'-') product)*
//   product:= unary (('*'|'/') unary)*
//   unary  := ('-'|'+') unary | power
//   power  := primary ('^' unary)?        (right-associative)
//   primary:= number | name | name '(' sum ')' | '(' sum ')'
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr n = sum();
    skip_ws();
    if (pos_ != src_.size()) throw SyntaxError(pos_, "unexpected character '" + std::string(1, src_[pos_]) + "'");
    return n;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    NodePtr n = product();
    for (;;) {
      if (accept('+')) n = make_binary(NodeKind::Add, n, product());
      else if (accept('-')) n = make_binary(NodeKind::Sub, n, product());
      else return n;
    }
  }

  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = make_binary(NodeKind::Mul, n, unary());
      else if (accept('/')) n = make_binary(NodeKind::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_unary(NodeKind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_binary(NodeKind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError(pos_, "unexpected end of input");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    if (c == '(') {
      ++pos_;
      NodePtr inner = sum();
      if (!accept(')')) throw SyntaxError(pos_, "expected ')'");
      return inner;
    }
    throw SyntaxError(pos_, "unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t nd = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      nd += digits();
    }
    if (nd == 0) throw SyntaxError(start, "malformed number");
    // An exponent is only consumed when digits follow, so "2*e" and "2e" keep
    // the constant e available.
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        digits();
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    return make_number(std::strtod(text.c_str(), nullptr));
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string id(src_.substr(start, pos_ - start));
    for (const auto& info : kFunctions) {
      if (id == info.name) {
        if (!accept('(')) throw SyntaxError(pos_, "expected '(' after function '" + id + "'");
        NodePtr arg = sum();
        if (!accept(')')) throw SyntaxError(pos_, "expected ')'");
        return make_call(info.func, arg);
      }
    }
    if (id == "x") return make_var(Variable::X);
    if (id == "y") return make_var(Variable::Y);
    if (id == "r") return make_var(Variable::R);
    if (id == "theta") return make_var(Variable::Theta);
    if (id == "pi") return make_const(NamedConst::Pi);
    if (id == "e") return make_const(NamedConst::E);
    throw UnknownIdentifier(id, start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

bool is_number(const NodePtr& n, double v) { return n->kind == NodeKind::Number && n->value == v; }

NodePtr add(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0)) return b;
  if (is_number(b, 0.0)) return a;
  return make_binary(NodeKind::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_number(b, 0.0)) return a;
  if (is_number(a, 0.0)) return make_unary(NodeKind::Neg, std::move(b));
  return make_binary(NodeKind::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0) || is_number(b, 0.0)) return make_number(0.0);
  if (is_number(a, 1.0)) return b;
  if (is_number(b, 1.0)) return a;
  return make_binary(NodeKind::Mul, std::move(a), std::move(b));
}

NodePtr divide(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0)) return make_number(0.0);
  if (is_number(b, 1.0)) return a;
  return make_binary(NodeKind::Div, std::move(a), std::move(b));
}

NodePtr d_theta(const NodePtr& n) {
  switch (n->kind) {
    case NodeKind::Number:
    case NodeKind::Const:
      return make_number(0.0);
    case NodeKind::Var:
      if (n->var == Variable::Theta) return make_number(1.0);
      throw Error("UnsupportedDerivative", "theta-derivative of an expression referencing x, y or r");
    case NodeKind::Neg: {
      NodePtr d = d_theta(n->lhs);
      return is_number(d, 0.0) ? d : make_unary(NodeKind::Neg, d);
    }
    case NodeKind::Add:
      return add(d_theta(n->lhs), d_theta(n->rhs));
    case NodeKind::Sub:
      return sub(d_theta(n->lhs), d_theta(n->rhs));
    case NodeKind::Mul:
      return add(mul(d_theta(n->lhs), n->rhs), mul(n->lhs, d_theta(n->rhs)));
    case NodeKind::Div: {
      NodePtr num = sub(mul(d_theta(n->lhs), n->rhs), mul(n->lhs, d_theta(n->rhs)));
      return divide(num, make_binary(NodeKind::Mul, n->rhs, n->rhs));
    }
    case NodeKind::Pow: {
      NodePtr db = d_theta(n->lhs);
      NodePtr de = d_theta(n->rhs);
      if (is_number(de, 0.0)) {
        // d(f^c) = c f^(c-1) f'
        NodePtr ex = sub(n->rhs, make_number(1.0));
        return mul(mul(n->rhs, make_binary(NodeKind::Pow, n->lhs, ex)), db);
      }
      // d(f^g) = f^g (g' log f + g f'/f)
      NodePtr term = add(mul(de, make_call(Func::Log, n->lhs)), divide(mul(n->rhs, db), n->lhs));
      return mul(n, term);
    }
    case NodeKind::Call: {
      NodePtr da = d_theta(n->lhs);
      if (is_number(da, 0.0)) return da;
      const NodePtr& a = n->lhs;
      switch (n->func) {
        case Func::Sin: return mul(make_call(Func::Cos, a), da);
        case Func::Cos: return make_unary(NodeKind::Neg, mul(make_call(Func::Sin, a), da));
        case Func::Tan: {
          NodePtr c = make_call(Func::Cos, a);
          return divide(da, make_binary(NodeKind::Mul, c, c));
        }
        case Func::Exp: return mul(n, da);
        case Func::Log: return divide(da, a);
        case Func::Sqrt: return divide(da, mul(make_number(2.0), n));
        case Func::Abs: return divide(mul(a, da), n);
      }
    }
  }
  return make_number(0.0);
}

}  // namespace

Bindings Bindings::at(Point p) {
  return Bindings{p.x, p.y, std::hypot(p.x, p.y), std::atan2(p.y, p.x)};
}

Bindings Bindings::at_angle(double theta) {
  return Bindings{std::cos(theta), std::sin(theta), 1.0, theta};
}

ScalarExpr::ScalarExpr() : root_(make_number(0.0)) {}

ScalarExpr ScalarExpr::constant(double value) { return ScalarExpr(make_number(value)); }

double ScalarExpr::evaluate(const Bindings& b) const { return eval(*root_, b); }

std::string ScalarExpr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

bool ScalarExpr::uses(Variable v) const { return uses_var(*root_, v); }

bool ScalarExpr::is_constant() const {
  return !uses(Variable::X) && !uses(Variable::Y) && !uses(Variable::R) && !uses(Variable::Theta);
}

ScalarExpr ScalarExpr::derivative_theta() const { return ScalarExpr(d_theta(root_)); }

ScalarExpr parse_expression(std::string_view src) { return ScalarExpr(Parser(src).parse()); }

double evaluate_expr(const ScalarExpr& expr, Point p) { return expr.evaluate(p); }

}  // namespace lslab
