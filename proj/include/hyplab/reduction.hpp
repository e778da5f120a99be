#pragma once

#include <string>
#include <vector>

#include "hyplab/system.hpp"

namespace hyplab {

/// Second-order equation u_tt = a^2 u_xx + a1 u_t + a2 u_x with 1-periodic
/// coefficients; zero-order terms are rejected at parse time because the
/// resulting first-order system satisfies neither sufficient condition and
/// needs techniques outside this laboratory's scope.
struct SecondOrderEq {
  Expr a;   // wave speed (enters squared)
  Expr a1;  // coefficient of u_t
  Expr a2;  // coefficient of u_x
};

/// Rewrite in the Riemann-style unknowns u1 = u_t + a u_x, u2 = u_t - a u_x:
/// a 2x2 first-order system with speeds (-a, +a) and symbolic couplings
/// built from a1, a2 and the derivatives of a. The returned system keeps
/// that component order and is not yet validated.
HyperbolicSystem reduce(const SecondOrderEq& eq);

/// JSON document {"a": expr, "a1": expr, "a2": expr}; a nonzero "a3" key
/// is rejected with an explanatory error.
SecondOrderEq second_order_from_json_text(const std::string& text);

/// Conditional smallness inequalities for constant (a, a1, a2): two branch
/// families on |a*a1 -+ a2|, each applicable depending on signs. Pass means
/// every family has an applicable branch and all applicable branches hold
/// strictly.
struct TrichotomyBranch {
  std::string condition;  // which sign condition selects this branch
  bool applicable = false;
  double lhs = 0.0;   // the |.| quantity being bounded
  double rhs = 0.0;   // the printed bound
  double margin = 0.0;
  bool pass = false;
};

struct TrichotomyResult {
  std::vector<TrichotomyBranch> branches;  // fixed order: the 4 conditions
  bool pass = false;
};

TrichotomyResult trichotomy_const_check(double a, double a1, double a2);

}  // namespace hyplab
