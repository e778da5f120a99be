#include "hyplab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyplab {

namespace {

// Characteristic foot point and accumulated diagonal decay for one
// component: integrates (xi, I) in tau from t to s with dxi = a_j,
// dI = b_jj(xi, tau); the transported value is exp(I) * u_j(xi(s)).
struct FootWeight {
  double foot;
  double weight;
};

FootWeight foot_and_weight(const HyperbolicSystem& sys, int j, double x, double t, double s,
                           const CharSolverConfig& cc) {
  const Expr& a = sys.a(j);
  const Expr& bjj = sys.b(j, j);
  double span = s - t;
  double xi = x, I = 0.0;
  if (span != 0.0) {
    int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / cc.h)));
    double dh = span / steps;
    for (int m = 0; m < steps; ++m) {
      double tau0 = t + m * span / steps;
      auto f = [&](double tau, double xv, double& dx, double& dI) {
        dx = a.eval(xv, tau);
        dI = bjj.eval(xv, tau);
      };
      double k1x, k1I, k2x, k2I, k3x, k3I, k4x, k4I;
      f(tau0, xi, k1x, k1I);
      f(tau0 + 0.5 * dh, xi + 0.5 * dh * k1x, k2x, k2I);
      f(tau0 + 0.5 * dh, xi + 0.5 * dh * k2x, k3x, k3I);
      f(tau0 + dh, xi + dh * k3x, k4x, k4I);
      xi += dh / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
      I += dh / 6.0 * (k1I + 2 * k2I + 2 * k3I + k4I);
    }
  }
  return {xi, std::exp(I)};
}

}  // namespace

GridFunction u0_apply(const HyperbolicSystem& sys, double t, double s, const GridFunction& u,
                      const EvolutionConfig& cfg) {
  if (!sys.validated()) throw ValidationError("u0_apply requires a validated system");
  GridFunction out(u.n(), u.N());
  for (int j = 0; j < u.n(); ++j) {
    for (int i = 0; i < u.N(); ++i) {
      double x = static_cast<double>(i) / u.N();
      FootWeight fw = foot_and_weight(sys, j, x, t, s, cfg.char_cfg);
      out.at(j, i) = fw.weight * u.eval(j, fw.foot);
    }
  }
  return out;
}

GridFunction b_apply(const HyperbolicSystem& sys, double t, const GridFunction& u) {
  GridFunction out(u.n(), u.N());
  for (int j = 0; j < u.n(); ++j) {
    for (int k = 0; k < u.n(); ++k) {
      if (k == j) continue;
      const Expr& bjk = sys.b(j, k);
      for (int i = 0; i < u.N(); ++i) {
        double x = static_cast<double>(i) / u.N();
        out.at(j, i) -= bjk.eval(x, t) * u.at(k, i);
      }
    }
  }
  return out;
}

Evolver::Evolver(const HyperbolicSystem& sys, EvolutionConfig cfg)
    : sys_(&sys), cfg_(cfg), autonomous_(sys.autonomous()) {
  if (!sys.validated()) throw ValidationError("Evolver requires a validated system");
  if (cfg_.N < 16 || (cfg_.N & (cfg_.N - 1)) != 0)
    throw std::invalid_argument("EvolutionConfig.N must be a power of two >= 16");
  if (!(cfg_.dt > 0.0) || !(cfg_.picard_tol > 0.0))
    throw std::invalid_argument("EvolutionConfig requires dt > 0 and picard_tol > 0");
}

Evolver::SlabOp Evolver::build_slab(double s0, double s1) const {
  const int n = sys_->n();
  const int N = cfg_.N;
  SlabOp op;
  op.s0 = s0;
  op.s1 = s1;
  op.mid = 0.5 * (s0 + s1);

  auto build_u0 = [&](double t_to, double t_from, std::vector<U0Stencil>& dst) {
    dst.resize(static_cast<std::size_t>(n) * N);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < N; ++i) {
        double x = static_cast<double>(i) / N;
        FootWeight fw = foot_and_weight(*sys_, j, x, t_to, t_from, cfg_.char_cfg);
        dst[static_cast<std::size_t>(j) * N + i] = {fw.weight, cubic_stencil(fw.foot, N)};
      }
    }
  };
  build_u0(op.mid, s0, op.mid_from_s0);
  build_u0(s1, s0, op.s1_from_s0);
  build_u0(s1, op.mid, op.s1_from_mid);

  auto build_b = [&](double t, std::vector<double>& dst) {
    dst.assign(static_cast<std::size_t>(n) * n * N, 0.0);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        const Expr& bjk = sys_->b(j, k);
        for (int i = 0; i < N; ++i)
          dst[(static_cast<std::size_t>(j) * n + k) * N + i] =
              bjk.eval(static_cast<double>(i) / N, t);
      }
  };
  build_b(s0, op.b_s0);
  build_b(op.mid, op.b_mid);
  build_b(s1, op.b_s1);
  return op;
}

const Evolver::SlabOp& Evolver::slab(double s0, double s1) {
  // For autonomous coefficients the operator depends only on the span.
  std::pair<double, double> key =
      autonomous_ ? std::pair<double, double>{0.0, s1 - s0} : std::pair<double, double>{s0, s1};
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, build_slab(s0, s1)).first;
  return it->second;
}

GridFunction Evolver::advance_slab(const SlabOp& op, const GridFunction& v0) const {
  const int n = v0.n();
  const int N = v0.N();
  const double delta = op.s1 - op.s0;

  auto u0_op = [&](const std::vector<U0Stencil>& sts, const GridFunction& u) {
    GridFunction out(n, N);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < N; ++i) {
        const U0Stencil& s = sts[static_cast<std::size_t>(j) * N + i];
        double acc = 0.0;
        for (int m = 0; m < 4; ++m) acc += s.st.w[m] * u.at(j, s.st.idx[m]);
        out.at(j, i) = s.w * acc;
      }
    return out;
  };
  auto b_op = [&](const std::vector<double>& bv, const GridFunction& u) {
    GridFunction out(n, N);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        const double* row = &bv[(static_cast<std::size_t>(j) * n + k) * N];
        for (int i = 0; i < N; ++i) out.at(j, i) -= row[i] * u.at(k, i);
      }
    return out;
  };
  auto axpy = [&](GridFunction& y, double alpha, const GridFunction& x) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < N; ++i) y.at(j, i) += alpha * x.at(j, i);
  };
  auto sup_diff = [&](const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < N; ++i) m = std::max(m, std::abs(a.at(j, i) - b.at(j, i)));
    return m;
  };

  GridFunction g0 = b_op(op.b_s0, v0);
  GridFunction base_mid = u0_op(op.mid_from_s0, v0);
  GridFunction base_s1 = u0_op(op.s1_from_s0, v0);
  GridFunction g0_mid = u0_op(op.mid_from_s0, g0);  // U0(mid,s0) B(s0) v0
  GridFunction g0_s1 = u0_op(op.s1_from_s0, g0);    // U0(s1,s0)  B(s0) v0

  GridFunction u_mid = base_mid;
  GridFunction u_s1 = base_s1;
  double defect = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg_.picard_max; ++it) {
    // Midpoint by trapezoid, endpoint by Simpson on the Duhamel integral.
    GridFunction u_mid_new = base_mid;
    axpy(u_mid_new, delta / 4.0, g0_mid);
    GridFunction bm = b_op(op.b_mid, u_mid);
    axpy(u_mid_new, delta / 4.0, bm);

    GridFunction u_s1_new = base_s1;
    axpy(u_s1_new, delta / 6.0, g0_s1);
    GridFunction bm_new = b_op(op.b_mid, u_mid_new);
    GridFunction mid_term = u0_op(op.s1_from_mid, bm_new);
    axpy(u_s1_new, 4.0 * delta / 6.0, mid_term);
    GridFunction b1 = b_op(op.b_s1, u_s1);
    axpy(u_s1_new, delta / 6.0, b1);

    defect = std::max(sup_diff(u_mid_new, u_mid), sup_diff(u_s1_new, u_s1));
    u_mid = std::move(u_mid_new);
    u_s1 = std::move(u_s1_new);
    if (defect < cfg_.picard_tol) return u_s1;
  }
  throw PicardError("slab fixed point did not contract to tolerance " +
                        std::to_string(cfg_.picard_tol) + " within " +
                        std::to_string(cfg_.picard_max) + " iterations (shrink dt)",
                    defect);
}

GridFunction Evolver::apply(double t, double s, GridFunction u) {
  if (t == s) return u;
  double span = t - s;
  int slabs = std::max(1, static_cast<int>(std::ceil(std::abs(span) / cfg_.dt)));
  for (int m = 0; m < slabs; ++m) {
    double s0 = s + span * m / slabs;
    double s1 = s + span * (m + 1) / slabs;
    u = advance_slab(slab(s0, s1), u);
  }
  return u;
}

Eigen::MatrixXd Evolver::slab_matrix(double s0, double s1) {
  const int n = sys_->n();
  const int N = cfg_.N;
  const SlabOp& op = slab(s0, s1);
  Eigen::MatrixXd A(static_cast<Eigen::Index>(n) * N, static_cast<Eigen::Index>(n) * N);
  GridFunction e(n, N);
  for (int col = 0; col < n * N; ++col) {
    e.at(col / N, col % N) = 1.0;
    GridFunction out = advance_slab(op, e);
    A.col(col) = out.to_stacked();
    e.at(col / N, col % N) = 0.0;
  }
  return A;
}

GridFunction u_apply(const HyperbolicSystem& sys, double t, double s, const GridFunction& u,
                     const EvolutionConfig& cfg) {
  Evolver ev(sys, cfg);
  return ev.apply(t, s, u);
}

ExpBound exp_bound(const HyperbolicSystem& sys) {
  CoefficientSups s = coefficient_sups(sys);
  const double n = sys.n();
  ExpBound b;
  double theta_a = 1.0 / (2.0 * s.sup_a);
  if (s.sup_b > 0.0)
    b.theta = std::min(theta_a, 1.0 / (2.0 * n * (n + 1.0) * s.sup_b));
  else
    b.theta = theta_a;
  b.omega = std::log(3.0 + 2.0 * n) / b.theta;
  b.K = 1.0;
  return b;
}

double cocycle_defect(const HyperbolicSystem& sys, double t, double r, double s,
                      const GridFunction& u, const EvolutionConfig& cfg) {
  Evolver ev(sys, cfg);
  GridFunction direct = ev.apply(t, s, u);
  GridFunction stepped = ev.apply(t, r, ev.apply(r, s, u));
  double m = 0.0;
  for (int j = 0; j < u.n(); ++j)
    for (int i = 0; i < u.N(); ++i)
      m = std::max(m, std::abs(direct.at(j, i) - stepped.at(j, i)));
  return m;
}

}  // namespace hyplab
