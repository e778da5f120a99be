#include "hyplab/characteristics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace hyplab {

namespace {

// Right-hand sides are tiny systems (value plus up to two running
// integrals), so a fixed-capacity state avoids allocation in the hot path.
constexpr int kMaxDim = 3;
using State = std::array<double, kMaxDim>;

template <class F>
void rk4_span(F&& f, double s0, double s1, double h, State& y, int dim) {
  double span = s1 - s0;
  if (span == 0.0) return;
  int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / h)));
  double dh = span / steps;
  State k1, k2, k3, k4, tmp;
  double s = s0;
  for (int m = 0; m < steps; ++m) {
    f(s, y.data(), k1.data());
    for (int i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dh * k1[i];
    f(s + 0.5 * dh, tmp.data(), k2.data());
    for (int i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dh * k2[i];
    f(s + 0.5 * dh, tmp.data(), k3.data());
    for (int i = 0; i < dim; ++i) tmp[i] = y[i] + dh * k3[i];
    f(s + dh, tmp.data(), k4.data());
    for (int i = 0; i < dim; ++i)
      y[i] += dh / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    s = s0 + (m + 1) * span / steps;
  }
}

// Cash-Karp embedded 4(5) pair for the adaptive path.
template <class F>
void rk45_span(F&& f, double s0, double s1, double h0, double tol, State& y, int dim) {
  static constexpr double a2 = 1.0 / 5, a3 = 3.0 / 10, a4 = 3.0 / 5, a5 = 1.0, a6 = 7.0 / 8;
  static constexpr double b21 = 1.0 / 5;
  static constexpr double b31 = 3.0 / 40, b32 = 9.0 / 40;
  static constexpr double b41 = 3.0 / 10, b42 = -9.0 / 10, b43 = 6.0 / 5;
  static constexpr double b51 = -11.0 / 54, b52 = 5.0 / 2, b53 = -70.0 / 27, b54 = 35.0 / 27;
  static constexpr double b61 = 1631.0 / 55296, b62 = 175.0 / 512, b63 = 575.0 / 13824,
                          b64 = 44275.0 / 110592, b65 = 253.0 / 4096;
  static constexpr double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594, c6 = 512.0 / 1771;
  static constexpr double d1 = c1 - 2825.0 / 27648, d3 = c3 - 18575.0 / 48384,
                          d4 = c4 - 13525.0 / 55296, d5 = -277.0 / 14336, d6 = c6 - 1.0 / 4;

  double span = s1 - s0;
  if (span == 0.0) return;
  double dir = span > 0 ? 1.0 : -1.0;
  double s = s0;
  double h = dir * std::min(std::abs(h0), std::abs(span));
  State k1, k2, k3, k4, k5, k6, tmp, y5;
  while (dir * (s1 - s) > 0.0) {
    if (std::abs(h) > std::abs(s1 - s)) h = s1 - s;
    f(s, y.data(), k1.data());
    for (int i = 0; i < dim; ++i) tmp[i] = y[i] + h * b21 * k1[i];
    f(s + a2 * h, tmp.data(), k2.data());
    for (int i = 0; i < dim; ++i) tmp[i] = y[i] + h * (b31 * k1[i] + b32 * k2[i]);
    f(s + a3 * h, tmp.data(), k3.data());
    for (int i = 0; i < dim; ++i) tmp[i] = y[i] + h * (b41 * k1[i] + b42 * k2[i] + b43 * k3[i]);
    f(s + a4 * h, tmp.data(), k4.data());
    for (int i = 0; i < dim; ++i)
      tmp[i] = y[i] + h * (b51 * k1[i] + b52 * k2[i] + b53 * k3[i] + b54 * k4[i]);
    f(s + a5 * h, tmp.data(), k5.data());
    for (int i = 0; i < dim; ++i)
      tmp[i] = y[i] + h * (b61 * k1[i] + b62 * k2[i] + b63 * k3[i] + b64 * k4[i] + b65 * k5[i]);
    f(s + a6 * h, tmp.data(), k6.data());
    double err = 0.0;
    for (int i = 0; i < dim; ++i) {
      y5[i] = y[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c6 * k6[i]);
      double e = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i]);
      err = std::max(err, std::abs(e) / (1.0 + std::abs(y5[i])));
    }
    if (err <= tol) {
      s += h;
      y = y5;
      if (err > 0.0) h *= std::min(5.0, 0.9 * std::pow(tol / err, 0.2));
    } else {
      h *= std::max(0.1, 0.9 * std::pow(tol / err, 0.25));
    }
    if (std::abs(h) < 1e-14 * (1.0 + std::abs(s)))
      throw IntegrationError("adaptive step underflow at parameter " + std::to_string(s),
                             {{s0, 0.0}, {s, y[0]}});
  }
}

template <class F>
void integrate(const CharSolverConfig& cfg, F&& f, double s0, double s1, State& y, int dim) {
  if (cfg.method == CharSolverConfig::Method::RK4)
    rk4_span(f, s0, s1, cfg.h, y, dim);
  else
    rk45_span(f, s0, s1, cfg.h, cfg.tol, y, dim);
}

}  // namespace

double xi(const HyperbolicSystem& sys, int j, double tau_target, double x, double t,
          const CharSolverConfig& cfg) {
  const Expr& a = sys.a(j);
  State y = {x, 0.0, 0.0};
  auto rhs = [&](double s, const double* v, double* dv) { dv[0] = a.eval(v[0], s); };
  integrate(cfg, rhs, t, tau_target, y, 1);
  return y[0];
}

double tau(const HyperbolicSystem& sys, int j, double xi_target, double x, double t,
           const CharSolverConfig& cfg) {
  const Expr& a = sys.a(j);
  State y = {t, 0.0, 0.0};
  auto rhs = [&](double s, const double* v, double* dv) { dv[0] = 1.0 / a.eval(s, v[0]); };
  integrate(cfg, rhs, x, xi_target, y, 1);
  return y[0];
}

namespace {

// y = (tau, I) with I(eta) = int_x^eta (b_jj/a_j); then c = exp(I) because
// the defining integral runs from xi to x with a leading minus sign.
State tau_and_logc(const HyperbolicSystem& sys, int j, double xi_target, double x, double t,
                   const CharSolverConfig& cfg) {
  const Expr& a = sys.a(j);
  const Expr& bjj = sys.b(j, j);
  State y = {t, 0.0, 0.0};
  auto rhs = [&](double s, const double* v, double* dv) {
    double av = a.eval(s, v[0]);
    dv[0] = 1.0 / av;
    dv[1] = bjj.eval(s, v[0]) / av;
  };
  integrate(cfg, rhs, x, xi_target, y, 2);
  return y;
}

}  // namespace

double weight_c(const HyperbolicSystem& sys, int j, double xi_target, double x, double t,
                const CharSolverConfig& cfg) {
  return std::exp(tau_and_logc(sys, j, xi_target, x, t, cfg)[1]);
}

double weight_d(const HyperbolicSystem& sys, int j, double xi_target, double x, double t,
                const CharSolverConfig& cfg) {
  State y = tau_and_logc(sys, j, xi_target, x, t, cfg);
  return std::exp(y[1]) / sys.a(j).eval(xi_target, y[0]);
}

namespace {

// Shared exponent of the anchor-derivative formulas:
// E = exp(int_xi^x (da/dt / a^2)(eta, tau(eta,x,t)) d eta).
double dtau_exponent(const HyperbolicSystem& sys, int j, double xi_target, double x, double t,
                     const CharSolverConfig& cfg) {
  const Expr& a = sys.a(j);
  Expr at = a.diff('t');
  State y = {t, 0.0, 0.0};
  auto rhs = [&](double s, const double* v, double* dv) {
    double av = a.eval(s, v[0]);
    dv[0] = 1.0 / av;
    dv[1] = at.eval(s, v[0]) / (av * av);
  };
  integrate(cfg, rhs, x, xi_target, y, 2);
  return std::exp(-y[1]);  // running integral is x->xi; the formula wants xi->x
}

}  // namespace

double dtau_dx(const HyperbolicSystem& sys, int j, double xi_target, double x, double t,
               const CharSolverConfig& cfg) {
  return -dtau_exponent(sys, j, xi_target, x, t, cfg) / sys.a(j).eval(x, t);
}

double dtau_dt(const HyperbolicSystem& sys, int j, double xi_target, double x, double t,
               const CharSolverConfig& cfg) {
  return dtau_exponent(sys, j, xi_target, x, t, cfg);
}

CharacteristicTrace trace_by_xi(const HyperbolicSystem& sys, int j, double x, double t,
                                std::span<const double> xi_nodes, const CharSolverConfig& cfg) {
  const Expr& a = sys.a(j);
  const Expr& bjj = sys.b(j, j);
  CharacteristicTrace tr;
  tr.xi.assign(xi_nodes.begin(), xi_nodes.end());
  tr.tau.reserve(xi_nodes.size());
  tr.c.reserve(xi_nodes.size());
  tr.d.reserve(xi_nodes.size());
  State y = {t, 0.0, 0.0};
  double cur = x;
  auto rhs = [&](double s, const double* v, double* dv) {
    double av = a.eval(s, v[0]);
    dv[0] = 1.0 / av;
    dv[1] = bjj.eval(s, v[0]) / av;
  };
  for (double node : xi_nodes) {
    integrate(cfg, rhs, cur, node, y, 2);
    cur = node;
    tr.tau.push_back(y[0]);
    double c = std::exp(y[1]);
    tr.c.push_back(c);
    tr.d.push_back(c / a.eval(node, y[0]));
  }
  return tr;
}

CharacteristicPath sample_path(const HyperbolicSystem& sys, int j, double x, double t,
                               double param_end, int n_samples, CharacteristicPath::Param param,
                               const CharSolverConfig& cfg) {
  if (n_samples < 2) throw std::invalid_argument("sample_path needs at least 2 samples");
  CharacteristicPath path;
  path.j = j;
  path.anchor_x = x;
  path.anchor_t = t;
  path.param = param;
  double start = (param == CharacteristicPath::Param::ByTau) ? t : x;
  State y = {(param == CharacteristicPath::Param::ByTau) ? x : t, 0.0, 0.0};
  const Expr& a = sys.a(j);
  auto rhs = [&](double s, const double* v, double* dv) {
    if (param == CharacteristicPath::Param::ByTau)
      dv[0] = a.eval(v[0], s);
    else
      dv[0] = 1.0 / a.eval(s, v[0]);
  };
  path.nodes.emplace_back(start, y[0]);
  for (int m = 1; m < n_samples; ++m) {
    double s0 = start + (param_end - start) * (m - 1) / (n_samples - 1);
    double s1 = start + (param_end - start) * m / (n_samples - 1);
    integrate(cfg, rhs, s0, s1, y, 1);
    path.nodes.emplace_back(s1, y[0]);
  }
  return path;
}

}  // namespace hyplab
