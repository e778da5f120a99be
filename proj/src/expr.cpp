#include "hyplab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace hyplab {

Expr Expr::constant(double v) {
  Expr e;
  e.nodes_.clear();
  e.root_ = e.add_node({NodeKind::Constant, v, -1, -1});
  return e;
}

Expr Expr::var_x() {
  Expr e;
  e.nodes_.clear();
  e.root_ = e.add_node({NodeKind::VarX, 0.0, -1, -1});
  return e;
}

Expr Expr::var_t() {
  Expr e;
  e.nodes_.clear();
  e.root_ = e.add_node({NodeKind::VarT, 0.0, -1, -1});
  return e;
}

std::int32_t Expr::import(const Expr& src, std::int32_t idx) {
  const ExprNode& n = src.nodes_[static_cast<std::size_t>(idx)];
  ExprNode copy = n;
  if (n.lhs >= 0) copy.lhs = import(src, n.lhs);
  if (n.rhs >= 0) copy.rhs = import(src, n.rhs);
  return add_node(copy);
}

namespace {

bool is_int_exponent(double v, long long& out) {
  if (std::abs(v) > 64.0) return false;
  double r = std::nearbyint(v);
  if (v != r) return false;
  out = static_cast<long long>(r);
  return true;
}

double int_pow(double base, long long e) {
  if (e < 0) {
    if (base == 0.0) throw EvalDomainError("0 raised to a negative power");
    return 1.0 / int_pow(base, -e);
  }
  double acc = 1.0, b = base;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

double checked(double v, const char* op) {
  if (!std::isfinite(v)) throw EvalDomainError(std::string("non-finite result in ") + op);
  return v;
}

}  // namespace

double Expr::eval_node(std::int32_t idx, double x, double t) const {
  const ExprNode& n = nodes_[static_cast<std::size_t>(idx)];
  switch (n.kind) {
    case NodeKind::Constant: return n.value;
    case NodeKind::VarX: return x;
    case NodeKind::VarT: return t;
    case NodeKind::Neg: return -eval_node(n.lhs, x, t);
    case NodeKind::Sin: return std::sin(eval_node(n.lhs, x, t));
    case NodeKind::Cos: return std::cos(eval_node(n.lhs, x, t));
    case NodeKind::Exp: return checked(std::exp(eval_node(n.lhs, x, t)), "exp");
    case NodeKind::Tanh: return std::tanh(eval_node(n.lhs, x, t));
    case NodeKind::Sqrt: {
      double a = eval_node(n.lhs, x, t);
      if (a < 0.0) throw EvalDomainError("sqrt of a negative value");
      return std::sqrt(a);
    }
    case NodeKind::Log: {
      double a = eval_node(n.lhs, x, t);
      if (a <= 0.0) throw EvalDomainError("log of a non-positive value");
      return std::log(a);
    }
    case NodeKind::Add: return checked(eval_node(n.lhs, x, t) + eval_node(n.rhs, x, t), "+");
    case NodeKind::Sub: return checked(eval_node(n.lhs, x, t) - eval_node(n.rhs, x, t), "-");
    case NodeKind::Mul: return checked(eval_node(n.lhs, x, t) * eval_node(n.rhs, x, t), "*");
    case NodeKind::Div: {
      double b = eval_node(n.rhs, x, t);
      if (b == 0.0) throw EvalDomainError("division by zero");
      return checked(eval_node(n.lhs, x, t) / b, "/");
    }
    case NodeKind::Pow: {
      double a = eval_node(n.lhs, x, t);
      double b = eval_node(n.rhs, x, t);
      long long k;
      if (is_int_exponent(b, k)) return checked(int_pow(a, k), "^");
      if (a < 0.0) throw EvalDomainError("negative base with non-integer exponent");
      if (a == 0.0 && b < 0.0) throw EvalDomainError("0 raised to a negative power");
      return checked(std::pow(a, b), "^");
    }
  }
  throw std::logic_error("corrupt expression node");
}

double Expr::eval(double x, double t) const { return eval_node(root_, x, t); }

bool Expr::depends_on(char var) const {
  NodeKind k = (var == 'x') ? NodeKind::VarX : NodeKind::VarT;
  for (const ExprNode& n : nodes_)
    if (n.kind == k) return true;
  return false;
}

bool Expr::structurally_equal(const Expr& other) const {
  struct Cmp {
    const Expr& a;
    const Expr& b;
    bool eq(std::int32_t i, std::int32_t j) const {
      if ((i < 0) != (j < 0)) return false;
      if (i < 0) return true;
      const ExprNode& na = a.nodes_[static_cast<std::size_t>(i)];
      const ExprNode& nb = b.nodes_[static_cast<std::size_t>(j)];
      if (na.kind != nb.kind) return false;
      if (na.kind == NodeKind::Constant && na.value != nb.value) return false;
      return eq(na.lhs, nb.lhs) && eq(na.rhs, nb.rhs);
    }
  };
  return Cmp{*this, other}.eq(root_, other.root_);
}

// ---------------------------------------------------------------------------
// Symbolic differentiation

namespace {

bool is_const(const Expr& e, double v) {
  const ExprNode& n = e.nodes()[static_cast<std::size_t>(e.root())];
  return n.kind == NodeKind::Constant && n.value == v;
}

bool const_value(const Expr& e, double& v) {
  const ExprNode& n = e.nodes()[static_cast<std::size_t>(e.root())];
  if (n.kind != NodeKind::Constant) return false;
  v = n.value;
  return true;
}

}  // namespace

class DiffBuilder {
 public:
  static Expr unary(NodeKind k, const Expr& a) {
    Expr out;
    out.nodes_.clear();
    std::int32_t ia = out.import(a, a.root());
    out.root_ = out.add_node({k, 0.0, ia, -1});
    return out;
  }
  static Expr binary(NodeKind k, const Expr& a, const Expr& b) {
    Expr out;
    out.nodes_.clear();
    std::int32_t ia = out.import(a, a.root());
    std::int32_t ib = out.import(b, b.root());
    out.root_ = out.add_node({k, 0.0, ia, ib});
    return out;
  }
  static Expr subtree(const Expr& src, std::int32_t idx) {
    Expr out;
    out.nodes_.clear();
    out.root_ = out.import(src, idx);
    return out;
  }
};

Expr operator+(const Expr& a, const Expr& b) {
  double ca, cb;
  if (const_value(a, ca) && const_value(b, cb)) return Expr::constant(ca + cb);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return DiffBuilder::binary(NodeKind::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  double ca, cb;
  if (const_value(a, ca) && const_value(b, cb)) return Expr::constant(ca - cb);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return -b;
  return DiffBuilder::binary(NodeKind::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  double ca, cb;
  if (const_value(a, ca) && const_value(b, cb)) return Expr::constant(ca * cb);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return DiffBuilder::binary(NodeKind::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return Expr::constant(0.0);
  if (is_const(b, 1.0)) return a;
  return DiffBuilder::binary(NodeKind::Div, a, b);
}

Expr operator-(const Expr& a) {
  double ca;
  if (const_value(a, ca)) return Expr::constant(-ca);
  return DiffBuilder::unary(NodeKind::Neg, a);
}

namespace {

Expr diff_node(const Expr& src, std::int32_t idx, char var) {
  const ExprNode& n = src.nodes()[static_cast<std::size_t>(idx)];
  auto sub = [&](std::int32_t i) { return DiffBuilder::subtree(src, i); };
  auto d = [&](std::int32_t i) { return diff_node(src, i, var); };
  switch (n.kind) {
    case NodeKind::Constant: return Expr::constant(0.0);
    case NodeKind::VarX: return Expr::constant(var == 'x' ? 1.0 : 0.0);
    case NodeKind::VarT: return Expr::constant(var == 't' ? 1.0 : 0.0);
    case NodeKind::Neg: return -d(n.lhs);
    case NodeKind::Sin: return DiffBuilder::unary(NodeKind::Cos, sub(n.lhs)) * d(n.lhs);
    case NodeKind::Cos: return -(DiffBuilder::unary(NodeKind::Sin, sub(n.lhs)) * d(n.lhs));
    case NodeKind::Exp: return DiffBuilder::unary(NodeKind::Exp, sub(n.lhs)) * d(n.lhs);
    case NodeKind::Tanh: {
      Expr th = DiffBuilder::unary(NodeKind::Tanh, sub(n.lhs));
      return (Expr::constant(1.0) - th * th) * d(n.lhs);
    }
    case NodeKind::Sqrt: {
      Expr sq = DiffBuilder::unary(NodeKind::Sqrt, sub(n.lhs));
      return d(n.lhs) / (Expr::constant(2.0) * sq);
    }
    case NodeKind::Log: return d(n.lhs) / sub(n.lhs);
    case NodeKind::Add: return d(n.lhs) + d(n.rhs);
    case NodeKind::Sub: return d(n.lhs) - d(n.rhs);
    case NodeKind::Mul: return d(n.lhs) * sub(n.rhs) + sub(n.lhs) * d(n.rhs);
    case NodeKind::Div: {
      Expr den = sub(n.rhs);
      return (d(n.lhs) * den - sub(n.lhs) * d(n.rhs)) / (den * den);
    }
    case NodeKind::Pow: {
      Expr base = sub(n.lhs);
      Expr expo = sub(n.rhs);
      double c;
      if (const_value(expo, c)) {
        // c * base^(c-1) * base'
        Expr p = DiffBuilder::binary(NodeKind::Pow, base, Expr::constant(c - 1.0));
        return Expr::constant(c) * p * d(n.lhs);
      }
      // base^expo * (expo' * log(base) + expo * base' / base)
      Expr p = DiffBuilder::binary(NodeKind::Pow, base, expo);
      Expr lg = DiffBuilder::unary(NodeKind::Log, base);
      return p * (d(n.rhs) * lg + expo * d(n.lhs) / base);
    }
  }
  throw std::logic_error("corrupt expression node");
}

}  // namespace

Expr Expr::diff(char var) const { return diff_node(*this, root_, var); }

// ---------------------------------------------------------------------------
// Printing

namespace {

// Precedence levels: Add/Sub 1, Mul/Div 2, Neg 3, Pow 4, atoms 5.
int prec_of(NodeKind k) {
  switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

const char* func_name(NodeKind k) {
  switch (k) {
    case NodeKind::Sin: return "sin";
    case NodeKind::Cos: return "cos";
    case NodeKind::Exp: return "exp";
    case NodeKind::Tanh: return "tanh";
    case NodeKind::Sqrt: return "sqrt";
    case NodeKind::Log: return "log";
    default: return nullptr;
  }
}

}  // namespace

void Expr::print_node(std::int32_t idx, int parent_prec, bool right_side, std::string& out) const {
  const ExprNode& n = nodes_[static_cast<std::size_t>(idx)];
  int p = prec_of(n.kind);
  bool paren = p < parent_prec || (p == parent_prec && right_side && p <= 2) ||
               (n.kind == NodeKind::Pow && parent_prec == 4 && !right_side);
  if (n.kind == NodeKind::Constant && n.value < 0.0) paren = parent_prec >= 2;
  if (paren) out += '(';
  switch (n.kind) {
    case NodeKind::Constant: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", n.value);
      out += buf;
      break;
    }
    case NodeKind::VarX: out += 'x'; break;
    case NodeKind::VarT: out += 't'; break;
    case NodeKind::Neg:
      out += '-';
      print_node(n.lhs, 3, true, out);
      break;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div:
    case NodeKind::Pow: {
      // ^ is right-associative; left child needs parens at equal precedence.
      print_node(n.lhs, p, n.kind == NodeKind::Pow, out);
      out += (n.kind == NodeKind::Add)   ? '+'
             : (n.kind == NodeKind::Sub) ? '-'
             : (n.kind == NodeKind::Mul) ? '*'
             : (n.kind == NodeKind::Div) ? '/'
                                         : '^';
      print_node(n.rhs, p, n.kind != NodeKind::Pow, out);
      break;
    }
    default: {
      out += func_name(n.kind);
      out += '(';
      print_node(n.lhs, 0, false, out);
      out += ')';
      break;
    }
  }
  if (paren) out += ')';
}

std::string Expr::str() const {
  std::string out;
  print_node(root_, 0, false, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr run() {
    Expr e;
    e.nodes_.clear();
    e.root_ = parse_expr_rule(e);
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError(pos_, "operator or end of input",
                       "syntax error at byte " + std::to_string(pos_) +
                           ": expected operator or end of input");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  [[noreturn]] void fail(const std::string& expected) {
    throw ParseError(pos_, expected,
                     "syntax error at byte " + std::to_string(pos_) + ": expected " + expected);
  }

  std::int32_t parse_expr_rule(Expr& e) {
    std::int32_t lhs = parse_term(e);
    while (true) {
      if (eat('+'))
        lhs = e.add_node({NodeKind::Add, 0.0, lhs, parse_term(e)});
      else if (eat('-'))
        lhs = e.add_node({NodeKind::Sub, 0.0, lhs, parse_term(e)});
      else
        return lhs;
    }
  }

  std::int32_t parse_term(Expr& e) {
    std::int32_t lhs = parse_factor(e);
    while (true) {
      if (eat('*'))
        lhs = e.add_node({NodeKind::Mul, 0.0, lhs, parse_factor(e)});
      else if (eat('/'))
        lhs = e.add_node({NodeKind::Div, 0.0, lhs, parse_factor(e)});
      else
        return lhs;
    }
  }

  // factor := "-" factor | power; power := atom ("^" factor)?
  // so ^ binds tighter than unary minus and is right-associative.
  std::int32_t parse_factor(Expr& e) {
    if (eat('-')) return e.add_node({NodeKind::Neg, 0.0, parse_factor(e), -1});
    std::int32_t base = parse_atom(e);
    if (eat('^')) return e.add_node({NodeKind::Pow, 0.0, base, parse_factor(e)});
    return base;
  }

  std::int32_t parse_atom(Expr& e) {
    skip_ws();
    if (pos_ >= src_.size()) fail("number, variable, function, or '('");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      std::int32_t inner = parse_expr_rule(e);
      if (!eat(')')) fail("')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number(e);
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident(e);
    fail("number, variable, function, or '('");
  }

  std::int32_t parse_number(Expr& e) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to the next token, not this number
      }
    }
    if (pos_ == start || (pos_ == start + 1 && src_[start] == '.')) fail("number");
    double v = std::strtod(std::string(src_.substr(start, pos_ - start)).c_str(), nullptr);
    return e.add_node({NodeKind::Constant, v, -1, -1});
  }

  std::int32_t parse_ident(Expr& e) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    std::string_view name = src_.substr(start, pos_ - start);
    if (name == "x") return e.add_node({NodeKind::VarX, 0.0, -1, -1});
    if (name == "t") return e.add_node({NodeKind::VarT, 0.0, -1, -1});
    if (name == "pi") return e.add_node({NodeKind::Constant, std::numbers::pi, -1, -1});
    if (name == "e") return e.add_node({NodeKind::Constant, std::numbers::e, -1, -1});
    NodeKind k;
    if (name == "sin")
      k = NodeKind::Sin;
    else if (name == "cos")
      k = NodeKind::Cos;
    else if (name == "exp")
      k = NodeKind::Exp;
    else if (name == "tanh")
      k = NodeKind::Tanh;
    else if (name == "sqrt")
      k = NodeKind::Sqrt;
    else if (name == "log")
      k = NodeKind::Log;
    else
      throw ParseError(start, "x, t, pi, e, sin, cos, exp, tanh, sqrt, log",
                       "unknown identifier '" + std::string(name) + "' at byte " +
                           std::to_string(start));
    if (!eat('(')) fail("'(' after function name");
    std::int32_t arg = parse_expr_rule(e);
    if (!eat(')')) fail("')'");
    return e.add_node({k, 0.0, arg, -1});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

Expr parse_expr(std::string_view source) { return Parser(source).run(); }

bool check_x_periodicity(const Expr& e, std::span<const double> t_samples, int n_x, double tol) {
  if (n_x < 16) throw std::invalid_argument("check_x_periodicity: n_x must be >= 16");
  for (double t : t_samples) {
    for (int i = 0; i < n_x; ++i) {
      double x = static_cast<double>(i) / n_x;
      if (std::abs(e.eval(x + 1.0, t) - e.eval(x, t)) > tol) return false;
    }
  }
  return true;
}

}  // namespace hyplab
