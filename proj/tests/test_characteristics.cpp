#include <doctest.h>

#include <cmath>
#include <random>

#include "hyplab/characteristics.hpp"

using namespace hyplab;

namespace {

HyperbolicSystem scalar(const char* a, const char* b) {
  return validate_system(HyperbolicSystem({parse_expr(a)}, {{parse_expr(b)}}));
}

}  // namespace

TEST_CASE("xi on straight and curved characteristics") {
  auto sys = scalar("2", "0");
  CHECK(xi(sys, 0, 1.0, 0.0, 0.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(xi(sys, 0, 0.0, 0.3, 0.0) == doctest::Approx(0.3));  // tau == t
  auto curved = scalar("2+sin(2*pi*x)", "0");
  CharSolverConfig fine;
  fine.h = (1.0 / 1024) / 64;
  double ref = xi(curved, 0, 0.25, 0.0, 0.0, fine);
  CHECK(xi(curved, 0, 0.25, 0.0, 0.0) == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("tau with quadrature oracle") {
  auto sys = scalar("2", "0");
  CHECK(tau(sys, 0, 0.0, 1.0, 0.0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(tau(sys, 0, 0.7, 0.7, 3.0) == doctest::Approx(3.0));  // xi == x
  // t-independent speed: tau(0,1,0) = -int_0^1 dx/(2+sin 2pi x) = -1/sqrt(3).
  auto curved = scalar("2+sin(2*pi*x)", "0");
  CHECK(tau(curved, 0, 0.0, 1.0, 0.0) ==
        doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-10));
}

TEST_CASE("adaptive integrator matches fixed-step") {
  auto curved = scalar("2+sin(2*pi*x)", "0");
  CharSolverConfig ad;
  ad.method = CharSolverConfig::Method::RK45;
  ad.tol = 1e-12;
  CHECK(tau(curved, 0, 0.0, 1.0, 0.0, ad) ==
        doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-9));
  CHECK(xi(curved, 0, 0.25, 0.0, 0.0, ad) ==
        doctest::Approx(xi(curved, 0, 0.25, 0.0, 0.0)).epsilon(1e-9));
}

TEST_CASE("weights") {
  auto sys = scalar("1", "1");
  CHECK(weight_c(sys, 0, 0.0, 1.0, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(weight_d(sys, 0, 0.0, 1.0, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(weight_c(sys, 0, 0.4, 0.4, 2.0) == doctest::Approx(1.0));  // xi == x
  auto nob = scalar("2", "0");
  CHECK(weight_c(nob, 0, 0.1, 0.9, 0.5) == doctest::Approx(1.0));
  CHECK(weight_d(nob, 0, 0.1, 0.9, 0.5) == doctest::Approx(0.5));
  CHECK(weight_d(nob, 0, 0.4, 0.4, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("anchor derivatives of tau") {
  auto sys = scalar("2", "0");
  CHECK(dtau_dx(sys, 0, 0.3, 0.9, 1.2) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(dtau_dt(sys, 0, 0.3, 0.9, 1.2) == doctest::Approx(1.0).epsilon(1e-12));
  auto xonly = scalar("2+sin(2*pi*x)", "0");
  CHECK(dtau_dt(xonly, 0, 0.0, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));

  auto tdep = scalar("2+0.5*sin(2*pi*x)*tanh(t)", "0");
  double h = 1e-5;
  for (double x0 : {0.6, 1.0}) {
    for (double t0 : {-0.3, 0.8}) {
      double fd_x = (tau(tdep, 0, 0.0, x0 + h, t0) - tau(tdep, 0, 0.0, x0 - h, t0)) / (2 * h);
      double fd_t = (tau(tdep, 0, 0.0, x0, t0 + h) - tau(tdep, 0, 0.0, x0, t0 - h)) / (2 * h);
      CHECK(dtau_dx(tdep, 0, 0.0, x0, t0) == doctest::Approx(fd_x).epsilon(1e-5));
      CHECK(dtau_dt(tdep, 0, 0.0, x0, t0) == doctest::Approx(fd_t).epsilon(1e-5));
    }
  }
}

TEST_CASE("round trip, monotonicity, weight signs on random systems") {
  std::mt19937 rng(20260823);
  std::uniform_real_distribution<double> amp(-0.5, 0.5), base(1.0, 3.0), anchor(-1.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    double sgn = (trial % 2 == 0) ? 1.0 : -1.0;
    double c0 = sgn * base(rng), c1 = amp(rng), c2 = amp(rng);
    Expr a = Expr::constant(c0) +
             Expr::constant(c1) * parse_expr("sin(2*pi*x)") +
             Expr::constant(c2) * parse_expr("cos(t)");
    Expr b = Expr::constant(amp(rng)) + Expr::constant(amp(rng)) * parse_expr("cos(2*pi*x)");
    auto sys = validate_system(HyperbolicSystem({a}, {{b}}, 3.0));
    for (int k = 0; k < 4; ++k) {
      double x0 = anchor(rng), t0 = anchor(rng), xi0 = anchor(rng);
      double tt = tau(sys, 0, xi0, x0, t0);
      CHECK(xi(sys, 0, tt, x0, t0) == doctest::Approx(xi0).epsilon(1e-7));
      // tau is monotone in xi with the sign of a.
      double t_lo = tau(sys, 0, xi0 - 0.1, x0, t0);
      double t_hi = tau(sys, 0, xi0 + 0.1, x0, t0);
      CHECK(((t_hi - t_lo) * sgn) > 0.0);
      CHECK(weight_c(sys, 0, xi0, x0, t0) > 0.0);
      CHECK(weight_d(sys, 0, xi0, x0, t0) * sgn > 0.0);
    }
  }
}

TEST_CASE("trace matches per-node solves") {
  auto sys = scalar("2+sin(2*pi*x)", "-1+0.5*cos(2*pi*x)");
  double x0 = 0.875, t0 = 0.4;
  std::vector<double> nodes = {0.75, 0.5, 0.25, 0.0};
  auto tr = trace_by_xi(sys, 0, x0, t0, nodes);
  REQUIRE(tr.tau.size() == nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    CHECK(tr.tau[i] == doctest::Approx(tau(sys, 0, nodes[i], x0, t0)).epsilon(1e-10));
    CHECK(tr.c[i] == doctest::Approx(weight_c(sys, 0, nodes[i], x0, t0)).epsilon(1e-10));
    CHECK(tr.d[i] == doctest::Approx(weight_d(sys, 0, nodes[i], x0, t0)).epsilon(1e-10));
  }
}

TEST_CASE("sampled path is monotone with finite values") {
  auto sys = scalar("2+sin(2*pi*x)", "0");
  auto path = sample_path(sys, 0, 0.0, 0.0, 1.0, 33, CharacteristicPath::Param::ByTau);
  REQUIRE(path.nodes.size() == 33);
  for (std::size_t i = 1; i < path.nodes.size(); ++i) {
    CHECK(path.nodes[i].first > path.nodes[i - 1].first);
    CHECK(std::isfinite(path.nodes[i].second));
    CHECK(path.nodes[i].second > path.nodes[i - 1].second);  // positive speed
  }
}
