#include "hyplab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyplab {

const char* to_string(SignCase c) {
  switch (c) {
    case SignCase::PP: return "PP";
    case SignCase::MM: return "MM";
    case SignCase::PM: return "PM";
    case SignCase::MP: return "MP";
    default: return "INDEFINITE";
  }
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    default: return "indeterminate";
  }
}

SignCase classify_sign_case(const ComponentExtrema& e) {
  bool a_pos = e.alpha_minus > 0.0;
  bool a_neg = e.alpha_plus < 0.0;
  if (e.beta_minus > 0.0) return a_pos ? SignCase::PP : (a_neg ? SignCase::MP : SignCase::Indefinite);
  if (e.beta_plus < 0.0) return a_neg ? SignCase::MM : (a_pos ? SignCase::PM : SignCase::Indefinite);
  return SignCase::Indefinite;
}

double remark_constant_thresholds(double a_j, double b_jj) {
  if (a_j == 0.0 || b_jj == 0.0)
    throw std::invalid_argument("remark_constant_thresholds requires nonzero a_j and b_jj");
  if (a_j * b_jj > 0.0) return std::abs(b_jj);
  return std::abs(b_jj) / (2.0 * std::exp(-b_jj / a_j) - 1.0);
}

namespace {

double threshold_for_case(SignCase c, const ComponentExtrema& e) {
  const double am = e.alpha_minus, ap = e.alpha_plus;
  const double bm = e.beta_minus, bp = e.beta_plus;
  switch (c) {
    case SignCase::PP:
      return bm * am / ap;
    case SignCase::MM:
      return -bp * ap * (1.0 - std::exp(-bp / am)) / (am * (1.0 - std::exp(-bp / ap)));
    case SignCase::PM:
      return bm * (1.0 - std::exp(bp / ap)) / (1.0 - std::exp(-bm / am)) /
             (std::exp(bp / ap - bm / am) - std::exp(bp / ap) + 1.0);
    case SignCase::MP:
      return -bp * (1.0 - std::exp(bm / am)) / (1.0 - std::exp(-bp / ap)) /
             (std::exp(bm / am - bp / ap) - std::exp(bm / am) + 1.0);
    default:
      return 0.0;
  }
}

}  // namespace

double lemma_iso_bound(SignCase c, const ComponentExtrema& e) {
  const double am = e.alpha_minus, ap = e.alpha_plus;
  const double bm = e.beta_minus, bp = e.beta_plus;
  switch (c) {
    case SignCase::PP:
      return 1.0 / (1.0 - std::exp(-bm / ap));
    case SignCase::MM:
      return 1.0 / (1.0 - std::exp(-bp / am));
    case SignCase::PM:
      return std::exp(bp / ap - bm / am) / (1.0 - std::exp(bp / ap)) + 1.0;
    case SignCase::MP:
      return std::exp(bm / am - bp / ap) / (1.0 - std::exp(bm / am)) + 1.0;
    default:
      throw std::invalid_argument("no isomorphism bound for an indefinite sign case");
  }
}

double lemma_dest_bound(SignCase c, const ComponentExtrema& e) {
  const double am = e.alpha_minus, ap = e.alpha_plus;
  const double bm = e.beta_minus, bp = e.beta_plus;
  const double bj = e.beta_offdiag;
  if (bj == 0.0 && c != SignCase::Indefinite) return 0.0;
  // Sup-norm bound on the inhomogeneity operator D_j alone, composed with
  // the inverse bound above.
  double dnorm;
  switch (c) {
    case SignCase::PP:
      dnorm = (bj / bm) * (ap / am) * (1.0 - std::exp(-bm / ap));
      break;
    case SignCase::MM:
      dnorm = -(bj / bp) * (am / ap) * (1.0 - std::exp(-bp / ap));
      break;
    case SignCase::PM:
      dnorm = (bj / bm) * (1.0 - std::exp(-bm / am));
      break;
    case SignCase::MP:
      dnorm = -(bj / bp) * (1.0 - std::exp(-bp / ap));
      break;
    default:
      throw std::invalid_argument("no contraction bound for an indefinite sign case");
  }
  return dnorm * lemma_iso_bound(c, e);
}

ConditionReport theorem3_check(const HyperbolicSystem& sys, const ExtremaReport& ex) {
  ConditionReport rep;
  rep.pass = true;
  for (int j = 0; j < sys.n(); ++j) {
    const ComponentExtrema& e = ex.comp[static_cast<std::size_t>(j)];
    ComponentCondition cc;
    cc.j = j;
    cc.sign_case = classify_sign_case(e);
    cc.beta_j = e.beta_offdiag;
    if (cc.sign_case == SignCase::Indefinite) {
      cc.threshold = 0.0;
      cc.margin = -cc.beta_j;
      cc.pass = false;
      cc.note = "diagonal coupling b_" + std::to_string(j + 1) + std::to_string(j + 1) +
                " is not of definite sign on the sample window";
    } else {
      cc.threshold = threshold_for_case(cc.sign_case, e);
      cc.margin = cc.threshold - cc.beta_j;
      cc.pass = cc.margin > 0.0;  // strict inequality; ties fail
    }
    rep.pass = rep.pass && cc.pass;
    rep.comp.push_back(std::move(cc));
  }
  rep.overall = rep.pass ? Verdict::Pass : Verdict::Fail;
  return rep;
}

CorollaryResult corollary_check(const HyperbolicSystem& sys, const ExtremaReport& ex) {
  CorollaryResult res;
  res.pass = true;
  for (int j = 0; j < sys.n(); ++j) {
    const ComponentExtrema& e = ex.comp[static_cast<std::size_t>(j)];
    SignCase c = classify_sign_case(e);
    double bound;
    if (c == SignCase::Indefinite) {
      bound = std::numeric_limits<double>::infinity();
      res.pass = false;
    } else {
      bound = lemma_dest_bound(c, e);
      if (!(bound < 1.0)) res.pass = false;
    }
    res.bounds.push_back(bound);
    res.max_bound = std::max(res.max_bound, bound);
  }
  return res;
}

ConditionReport theorem2_check(const HyperbolicSystem& sys, const ExtremaReport& ex,
                               double t0, double t1, const std::vector<double>& eps_grid,
                               int n_x, int n_t) {
  if (!(t1 > t0)) throw std::invalid_argument("theorem2_check needs t1 > t0");
  const int n = sys.n();
  ConditionReport rep;

  bool all_neg = true, all_pos = true;
  for (int j = 0; j < n; ++j) {
    all_neg = all_neg && (ex.comp[static_cast<std::size_t>(j)].beta_plus < 0.0);
    all_pos = all_pos && (ex.comp[static_cast<std::size_t>(j)].beta_minus > 0.0);
  }
  rep.diag_negative = all_neg;
  rep.diag_positive = all_pos;
  bool diag_ok = all_neg || all_pos;

  // Off-diagonal magnitude profile over the time samples: m(l) = max over x
  // and (j,k) of |b_jk(x, t_l)|.
  std::vector<double> tl(static_cast<std::size_t>(n_t));
  std::vector<double> prof(static_cast<std::size_t>(n_t), 0.0);
  bool any_offdiag = false;
  for (int l = 0; l < n_t; ++l) {
    double t = t0 + (t1 - t0) * l / (n_t - 1);
    tl[static_cast<std::size_t>(l)] = t;
    double m = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        for (int i = 0; i < n_x; ++i) {
          double x = static_cast<double>(i) / (n_x - 1);
          m = std::max(m, std::abs(sys.b(j, k).eval(x, t)));
        }
      }
    prof[static_cast<std::size_t>(l)] = m;
    if (m > 0.0) any_offdiag = true;
  }
  double edge = std::min(std::abs(t0), std::abs(t1));
  double global_max = *std::max_element(prof.begin(), prof.end());

  rep.decay_verdict = Verdict::Pass;
  for (double eps : eps_grid) {
    DecayEntry de;
    de.eps = eps;
    // Smallest sampled cutoff c with |b_jk| < eps for every |t_l| >= c.
    double c = std::numeric_limits<double>::infinity();
    for (double cand : tl) {
      double acand = std::abs(cand);
      bool ok = true;
      for (int l = 0; l < n_t; ++l)
        if (std::abs(tl[static_cast<std::size_t>(l)]) >= acand &&
            prof[static_cast<std::size_t>(l)] >= eps) {
          ok = false;
          break;
        }
      if (ok) c = std::min(c, acand);
    }
    if (std::isfinite(c) && c <= 0.95 * edge) {
      de.c = c;
      de.verdict = Verdict::Pass;
    } else {
      // Near-edge tail still above eps: call it indeterminate when the
      // tail has clearly dropped from the global peak, fail otherwise.
      double tail = 0.0;
      for (int l = 0; l < n_t; ++l)
        if (std::abs(tl[static_cast<std::size_t>(l)]) >= 0.9 * edge)
          tail = std::max(tail, prof[static_cast<std::size_t>(l)]);
      de.c = std::numeric_limits<double>::quiet_NaN();
      de.verdict = (tail < 0.5 * global_max) ? Verdict::Indeterminate : Verdict::Fail;
    }
    if (de.verdict == Verdict::Fail) rep.decay_verdict = Verdict::Fail;
    else if (de.verdict == Verdict::Indeterminate && rep.decay_verdict == Verdict::Pass)
      rep.decay_verdict = Verdict::Indeterminate;
    rep.decay.push_back(de);
  }
  if (!any_offdiag) rep.decay_verdict = Verdict::Pass;

  // Factorization b_jk = btilde_jk (a_j - a_k): either the speeds are
  // uniformly separated (the quotient exists) or an explicit btilde is
  // supplied and reproduces b_jk on samples.
  rep.factor_verdict = Verdict::Pass;
  for (int j = 0; j < n && rep.factor_verdict == Verdict::Pass; ++j)
    for (int k = 0; k < n && rep.factor_verdict == Verdict::Pass; ++k) {
      if (k == j) continue;
      bool b_nonzero = false;
      double min_gap = std::numeric_limits<double>::infinity();
      double gap_x = 0.0, gap_t = 0.0;
      double max_mismatch = 0.0;
      const std::optional<Expr>& bt = sys.btilde(j, k);
      for (int l = 0; l < std::min(n_t, 65); ++l) {
        double t = t0 + (t1 - t0) * l / (std::min(n_t, 65) - 1);
        for (int i = 0; i < n_x; ++i) {
          double x = static_cast<double>(i) / (n_x - 1);
          double bv = sys.b(j, k).eval(x, t);
          if (std::abs(bv) > 0.0) b_nonzero = true;
          double gap = std::abs(sys.a(j).eval(x, t) - sys.a(k).eval(x, t));
          if (gap < min_gap) {
            min_gap = gap;
            gap_x = x;
            gap_t = t;
          }
          if (bt)
            max_mismatch = std::max(
                max_mismatch,
                std::abs(bt->eval(x, t) * (sys.a(j).eval(x, t) - sys.a(k).eval(x, t)) - bv));
        }
      }
      if (!b_nonzero) continue;  // zero coupling factors trivially
      if (bt) {
        if (max_mismatch >= 1e-10) {
          rep.factor_verdict = Verdict::Fail;
          rep.factor_note = "supplied quotient for b_" + std::to_string(j + 1) +
                            std::to_string(k + 1) + " mismatches by " +
                            std::to_string(max_mismatch);
        }
      } else if (min_gap < 1e-8) {
        rep.factor_verdict = Verdict::Fail;
        rep.factor_note = "speeds a_" + std::to_string(j + 1) + " and a_" +
                          std::to_string(k + 1) + " nearly coincide at (x=" +
                          std::to_string(gap_x) + ", t=" + std::to_string(gap_t) +
                          "); supply an explicit quotient";
      }
    }

  if (!diag_ok)
    rep.overall = Verdict::Fail;
  else if (rep.decay_verdict == Verdict::Fail || rep.factor_verdict == Verdict::Fail)
    rep.overall = Verdict::Fail;
  else if (rep.decay_verdict == Verdict::Indeterminate)
    rep.overall = Verdict::Indeterminate;
  else
    rep.overall = Verdict::Pass;
  rep.pass = rep.overall == Verdict::Pass;
  return rep;
}

double uniqueness_integral(const HyperbolicSystem& sys, int j, double t,
                           const CharSolverConfig& cfg) {
  if (!sys.validated()) throw ValidationError("uniqueness_integral requires a validated system");
  double xj = static_cast<double>(sys.signature().chi[static_cast<std::size_t>(j)]);
  double anchor = 1.0 - xj;
  const Expr& a = sys.a(j);
  const Expr& bjj = sys.b(j, j);
  // Oriented integral from 1-x_j to x_j of b_jj/a_j along the path, with
  // the path time tau carried alongside.
  double span = xj - anchor;
  int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / cfg.h)));
  double dh = span / steps;
  double tauv = t, I = 0.0;
  for (int m = 0; m < steps; ++m) {
    double s0 = anchor + m * span / steps;
    auto f = [&](double s, double tv, double& dtau, double& dI) {
      double av = a.eval(s, tv);
      dtau = 1.0 / av;
      dI = bjj.eval(s, tv) / av;
    };
    double k1t, k1I, k2t, k2I, k3t, k3I, k4t, k4I;
    f(s0, tauv, k1t, k1I);
    f(s0 + 0.5 * dh, tauv + 0.5 * dh * k1t, k2t, k2I);
    f(s0 + 0.5 * dh, tauv + 0.5 * dh * k2t, k3t, k3I);
    f(s0 + dh, tauv + dh * k3t, k4t, k4I);
    tauv += dh / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t);
    I += dh / 6.0 * (k1I + 2 * k2I + 2 * k3I + k4I);
  }
  return I;
}

UniquenessReport uniqueness_check(const HyperbolicSystem& sys, double T, int n_samples,
                                  const CharSolverConfig& cfg) {
  if (n_samples < 2) throw std::invalid_argument("uniqueness_check needs >= 2 samples");
  UniquenessReport rep;
  rep.past_negative = true;
  rep.future_positive = true;
  // Sample t strictly beyond +/-T, reaching out by one extra window length.
  double reach = std::max(T, sys.sample_window());
  for (int j = 0; j < sys.n(); ++j) {
    UniquenessReport::PerComponent pc{j, std::numeric_limits<double>::infinity(),
                                      -std::numeric_limits<double>::infinity()};
    for (int m = 0; m < n_samples; ++m) {
      double s = reach * (static_cast<double>(m) + 1.0) / n_samples;
      pc.inf_past = std::min(pc.inf_past, uniqueness_integral(sys, j, -T - s, cfg));
      pc.sup_future = std::max(pc.sup_future, uniqueness_integral(sys, j, T + s, cfg));
    }
    rep.past_negative = rep.past_negative && (pc.inf_past < 0.0);
    rep.future_positive = rep.future_positive && (pc.sup_future > 0.0);
    rep.comp.push_back(pc);
  }
  return rep;
}

}  // namespace hyplab
