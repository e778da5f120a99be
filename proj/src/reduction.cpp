#include "hyplab/reduction.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace hyplab {

HyperbolicSystem reduce(const SecondOrderEq& eq) {
  Expr a = eq.a, a1 = eq.a1, a2 = eq.a2;
  Expr ax = a.diff('x');
  Expr at = a.diff('t');
  Expr two = Expr::constant(2.0);
  Expr half_a1 = a1 / two;
  Expr a2_over = a2 / (two * a);
  Expr minus_term = (a * ax - at) / (two * a);  // (a a_x - a_t) / (2a)
  Expr plus_term = (a * ax + at) / (two * a);   // (a a_x + a_t) / (2a)

  std::vector<Expr> speeds = {-a, a};
  std::vector<std::vector<Expr>> b(2, std::vector<Expr>(2));
  b[0][0] = half_a1 + a2_over + minus_term;
  b[0][1] = half_a1 - a2_over + minus_term;
  b[1][0] = half_a1 + a2_over + plus_term;
  b[1][1] = half_a1 - a2_over - plus_term;
  return HyperbolicSystem(std::move(speeds), std::move(b));
}

SecondOrderEq second_order_from_json_text(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  if (doc.contains("a3")) {
    std::string a3 = doc.at("a3").get<std::string>();
    Expr e = parse_expr(a3);
    bool zero = !e.depends_on('x') && !e.depends_on('t') && e.eval(0, 0) == 0.0;
    if (!zero)
      throw std::invalid_argument(
          "zero-order term a3 is not supported: with it the reduced first-order "
          "system meets neither sufficient condition checked here and requires "
          "different techniques");
  }
  SecondOrderEq eq;
  eq.a = parse_expr(doc.at("a").get<std::string>());
  eq.a1 = parse_expr(doc.at("a1").get<std::string>());
  eq.a2 = parse_expr(doc.at("a2").get<std::string>());
  return eq;
}

TrichotomyResult trichotomy_const_check(double a, double a1, double a2) {
  if (a == 0.0) throw std::invalid_argument("trichotomy_const_check requires a != 0");
  double p = a * a1 + a2;  // a*a1 + a2
  double q = a * a1 - a2;  // a*a1 - a2
  double a2sq = 2.0 * a * a;

  TrichotomyResult res;
  auto add = [&](const char* cond, bool applicable, double lhs, double rhs) {
    TrichotomyBranch br;
    br.condition = cond;
    br.applicable = applicable;
    br.lhs = lhs;
    br.rhs = rhs;
    br.margin = rhs - lhs;
    br.pass = applicable && br.margin > 0.0;
    res.branches.push_back(br);
  };
  add("a*a1+a2 > 0", p > 0.0, std::abs(q), p);
  add("a2-a*a1 > 0", a2 - a * a1 > 0.0, std::abs(p), a2 - a * a1);
  add("a*a1+a2 < 0", p < 0.0, std::abs(q), 2.0 * (-p) * (std::exp(-p / a2sq) - 1.0));
  add("a*a1-a2 > 0", q > 0.0, std::abs(p), 2.0 * q * (std::exp(q / a2sq) - 1.0));

  // Family one bounds |a*a1-a2| (branches 0 and 2), family two bounds
  // |a*a1+a2| (branches 1 and 3). Each family needs an applicable branch
  // that holds; an applicable branch that fails sinks the verdict.
  auto family_ok = [&](int i, int k) {
    bool any = false;
    for (int idx : {i, k}) {
      const TrichotomyBranch& br = res.branches[static_cast<std::size_t>(idx)];
      if (br.applicable) {
        if (!br.pass) return false;
        any = true;
      }
    }
    return any;
  };
  res.pass = family_ok(0, 2) && family_ok(1, 3);
  return res;
}

}  // namespace hyplab
