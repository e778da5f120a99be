#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hyplab {

/// Raised when evaluation hits a point outside an operation's domain
/// (log of a non-positive value, sqrt of a negative, division by zero,
/// zero to a negative power). Evaluation never returns NaN silently.
class EvalDomainError : public std::runtime_error {
 public:
  explicit EvalDomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by parse_expr on malformed input. Carries the byte offset of the
/// offending token and the set of tokens that would have been accepted.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string expected, const std::string& what)
      : std::runtime_error(what), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

enum class NodeKind : std::uint8_t {
  Constant,
  VarX,
  VarT,
  Neg,
  Sin,
  Cos,
  Exp,
  Tanh,
  Sqrt,
  Log,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

struct ExprNode {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;   // Constant payload
  std::int32_t lhs = -1;
  std::int32_t rhs = -1;
};

/// Immutable expression tree over the variables x and t, stored as a flat
/// node arena. Evaluation is pure; instances are safe to share across
/// threads after construction.
class Expr {
 public:
  Expr() { root_ = add_node({NodeKind::Constant, 0.0, -1, -1}); }

  static Expr constant(double v);
  static Expr var_x();
  static Expr var_t();

  double eval(double x, double t) const;
  double operator()(double x, double t) const { return eval(x, t); }

  /// Symbolic derivative with respect to 'x' or 't'. Light constant folding
  /// only; correctness is the only guarantee.
  Expr diff(char var) const;

  std::string str() const;

  bool depends_on(char var) const;
  bool structurally_equal(const Expr& other) const;

  // Combinators used to compose coefficient expressions symbolically.
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  const std::vector<ExprNode>& nodes() const { return nodes_; }
  std::int32_t root() const { return root_; }

 private:
  friend class Parser;
  friend class DiffBuilder;

  std::int32_t add_node(ExprNode n) {
    nodes_.push_back(n);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }
  std::int32_t import(const Expr& src, std::int32_t idx);

  double eval_node(std::int32_t idx, double x, double t) const;
  void print_node(std::int32_t idx, int parent_prec, bool right_side, std::string& out) const;

  std::vector<ExprNode> nodes_;
  std::int32_t root_ = -1;
};

/// Parses the coefficient grammar:
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := "-" factor | power
///   power  := atom ("^" factor)?          (right-associative, binds above unary -)
///   atom   := number | "x" | "t" | "pi" | "e" | func "(" expr ")" | "(" expr ")"
///   func   := sin|cos|exp|tanh|sqrt|log
/// pi and e parse to constants. Whitespace is insignificant.
Expr parse_expr(std::string_view source);

/// True iff max over the sample set of |e(x+1,t) - e(x,t)| <= tol,
/// with n_x equispaced x in [0,1) and the given t samples. n_x >= 16.
bool check_x_periodicity(const Expr& e, std::span<const double> t_samples, int n_x, double tol);

}  // namespace hyplab
