#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hyplab/evolution.hpp"

using namespace hyplab;

namespace {

constexpr double kPi = std::numbers::pi;

HyperbolicSystem make2(const char* a1, const char* a2, const char* b11, const char* b12,
                       const char* b21, const char* b22, double window = 3.0) {
  std::vector<Expr> a = {parse_expr(a1), parse_expr(a2)};
  std::vector<std::vector<Expr>> b = {{parse_expr(b11), parse_expr(b12)},
                                      {parse_expr(b21), parse_expr(b22)}};
  return validate_system(HyperbolicSystem(std::move(a), std::move(b), window));
}

GridFunction wave2(int N) {
  GridFunction u(2, N);
  u.fill(0, [](double x) { return std::sin(2 * kPi * x); });
  u.fill(1, [](double x) { return std::cos(2 * kPi * x); });
  return u;
}

double sup_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (int j = 0; j < a.n(); ++j)
    for (int i = 0; i < a.N(); ++i) m = std::max(m, std::abs(a.at(j, i) - b.at(j, i)));
  return m;
}

}  // namespace

TEST_CASE("u0_apply: identity, shift, decay") {
  auto sys = make2("1", "-1", "1", "0", "0", "-1");
  GridFunction u = wave2(128);
  EvolutionConfig cfg;
  cfg.N = 128;

  GridFunction id = u0_apply(sys, 0.5, 0.5, u, cfg);
  CHECK(sup_diff(id, u) < 1e-14);

  // constants a=1, b_11=1, s=0, t=1: u_1 -> e^{-1} u_1(x-1) = e^{-1} u_1(x).
  GridFunction v = u0_apply(sys, 1.0, 0.0, u, cfg);
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < 128; ++i) {
    double x = i / 128.0;
    e1 = std::max(e1, std::abs(v.at(0, i) - std::exp(-1.0) * std::sin(2 * kPi * x)));
    e2 = std::max(e2, std::abs(v.at(1, i) - std::exp(1.0) * std::cos(2 * kPi * x)));
  }
  CHECK(e1 < 1e-10);
  CHECK(e2 < 1e-10);

  // pure transport over half a period.
  auto free2 = make2("1", "-1", "0", "0", "0", "0");
  GridFunction w = u0_apply(free2, 0.5, 0.0, u, cfg);
  double e3 = 0.0;
  for (int i = 0; i < 128; ++i) {
    double x = i / 128.0;
    e3 = std::max(e3, std::abs(w.at(0, i) - std::sin(2 * kPi * (x - 0.5))));
  }
  CHECK(e3 < 1e-10);
}

TEST_CASE("b_apply sign convention and pointwise action") {
  auto sys = make2("1", "-1", "0", "1", "cos(2*pi*x)", "0");
  GridFunction u(2, 64);
  u.fill(0, [](double) { return 1.0; });
  u.fill(1, [](double) { return 1.0; });
  GridFunction v = b_apply(sys, 0.0, u);
  for (int i = 0; i < 64; ++i) {
    double x = i / 64.0;
    CHECK(v.at(0, i) == doctest::Approx(-1.0));
    CHECK(v.at(1, i) == doctest::Approx(-std::cos(2 * kPi * x)).epsilon(1e-12));
  }
  auto diag = make2("1", "-1", "3", "0", "0", "-3");
  GridFunction z = b_apply(diag, 1.0, u);
  CHECK(z.sup_norm() == doctest::Approx(0.0));
}

TEST_CASE("u_apply on decoupled constants matches the explicit solution") {
  auto sys = make2("1", "-1", "1", "0", "0", "-1");
  EvolutionConfig cfg;
  cfg.N = 128;
  cfg.dt = 1.0 / 128;
  GridFunction u = wave2(128);
  GridFunction v = u_apply(sys, 1.0, 0.0, u, cfg);
  double err = 0.0;
  for (int i = 0; i < 128; ++i) {
    double x = i / 128.0;
    err = std::max(err, std::abs(v.at(0, i) - std::exp(-1.0) * std::sin(2 * kPi * x)));
    err = std::max(err, std::abs(v.at(1, i) - std::exp(1.0) * std::cos(2 * kPi * x)));
  }
  CHECK(err < 1e-8);
  // t == s is the identity.
  CHECK(sup_diff(u_apply(sys, 0.3, 0.3, u, cfg), u) == doctest::Approx(0.0));
}

TEST_CASE("coupled 2x2: forward/backward round trip") {
  auto sys = make2("2+sin(2*pi*x)", "-1", "-1", "0.5*cos(2*pi*x)", "0.25", "-1");
  EvolutionConfig cfg;
  cfg.N = 128;
  cfg.dt = 1.0 / 128;
  Evolver ev(sys, cfg);
  GridFunction u = wave2(128);
  GridFunction fwd = ev.apply(0.7, 0.0, u);
  GridFunction back = ev.apply(0.0, 0.7, fwd);
  CHECK(sup_diff(back, u) < 1e-3);
}

TEST_CASE("cocycle property") {
  auto sys = make2("2+sin(2*pi*x)", "-1", "-1", "0.5", "0.25", "-1");
  EvolutionConfig cfg;
  cfg.N = 128;
  cfg.dt = 1.0 / 128;
  GridFunction u = wave2(128);
  CHECK(cocycle_defect(sys, 0.4, 0.4, 0.4, u, cfg) == doctest::Approx(0.0));
  CHECK(cocycle_defect(sys, 1.0, 0.5, 0.0, u, cfg) < 1e-4);
}

TEST_CASE("exponential growth bound constants") {
  // n=2, sup|a|=1, sup|b|=2: theta = min(1/2, 1/24) = 1/24, omega = 24 ln 7.
  auto sys = make2("1", "-1", "2", "0.5", "0.5", "-2");
  ExpBound eb = exp_bound(sys);
  CHECK(eb.K == doctest::Approx(1.0));
  CHECK(eb.theta == doctest::Approx(1.0 / 24).epsilon(1e-6));
  CHECK(eb.omega == doctest::Approx(24 * std::log(7.0)).epsilon(1e-6));

  auto nob = validate_system(HyperbolicSystem({parse_expr("1")}, {{parse_expr("0")}}));
  ExpBound eb1 = exp_bound(nob);
  CHECK(eb1.theta == doctest::Approx(0.5));
  CHECK(eb1.omega == doctest::Approx(2 * std::log(5.0)));
}

TEST_CASE("growth bound holds on random systems") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> amp(-0.5, 0.5), tdist(0.1, 1.0);
  EvolutionConfig cfg;
  cfg.N = 64;
  cfg.dt = 1.0 / 64;
  for (int trial = 0; trial < 6; ++trial) {
    auto mk = [&](double c0) {
      return Expr::constant(c0) + Expr::constant(amp(rng)) * parse_expr("sin(2*pi*x)");
    };
    std::vector<Expr> a = {mk(1.5), mk(-1.5)};
    std::vector<std::vector<Expr>> b = {{mk(0.0), mk(0.0)}, {mk(0.0), mk(0.0)}};
    auto sys = validate_system(HyperbolicSystem(std::move(a), std::move(b), 2.0));
    ExpBound eb = exp_bound(sys);
    GridFunction u = wave2(64);
    double nrm = u.sup_norm();
    double dt = tdist(rng);
    GridFunction v = u_apply(sys, dt, 0.0, u, cfg);
    CHECK(v.sup_norm() / nrm <= std::exp(eb.omega * dt) * 1.01);
  }
}

TEST_CASE("Duhamel consistency of the coupled evolution") {
  auto sys = make2("1", "-1", "-0.5", "0.5", "0.25", "-0.5");
  EvolutionConfig cfg;
  cfg.N = 128;
  cfg.dt = 1.0 / 128;
  Evolver ev(sys, cfg);
  GridFunction u = wave2(128);
  double s = 0.0, t = 0.5;
  GridFunction lhs = ev.apply(t, s, u);

  // U0(t,s)u + Simpson over slab boundaries of U0(t,tau) B(tau) U(tau,s) u.
  int M = 64;
  GridFunction rhs = u0_apply(sys, t, s, u, cfg);
  for (int m = 0; m <= M; ++m) {
    double tau = s + (t - s) * m / M;
    double w = (m == 0 || m == M) ? 1.0 : (m % 2 == 1 ? 4.0 : 2.0);
    GridFunction term = u0_apply(sys, t, tau, b_apply(sys, tau, ev.apply(tau, s, u)), cfg);
    double coef = w * (t - s) / (3.0 * M);
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 128; ++i) rhs.at(j, i) += coef * term.at(j, i);
  }
  CHECK(sup_diff(lhs, rhs) < 1e-3);
}

TEST_CASE("slab matrix agrees with slab application") {
  auto sys = make2("1", "-1", "-0.5", "0.5", "0.25", "-0.5");
  EvolutionConfig cfg;
  cfg.N = 16;
  cfg.dt = 1.0 / 32;
  Evolver ev(sys, cfg);
  Eigen::MatrixXd A = ev.slab_matrix(0.0, 1.0 / 32);
  GridFunction u = wave2(16);
  Eigen::VectorXd via_matrix = A * u.to_stacked();
  GridFunction direct = ev.apply(1.0 / 32, 0.0, u);
  CHECK((via_matrix - direct.to_stacked()).cwiseAbs().maxCoeff() < 1e-12);
}
