#include "hyplab/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace hyplab {

HyperbolicSystem::HyperbolicSystem(std::vector<Expr> a, std::vector<std::vector<Expr>> b,
                                   double sample_window)
    : a_(std::move(a)), b_(std::move(b)), sample_window_(sample_window) {
  if (a_.empty()) throw ValidationError("system must have n >= 1 components");
  std::size_t n = a_.size();
  if (b_.size() != n) throw ValidationError("coupling matrix b must be n x n");
  for (const auto& row : b_)
    if (row.size() != n) throw ValidationError("coupling matrix b must be n x n");
  if (!(sample_window_ > 0.0)) throw ValidationError("sample_window must be positive");
  btilde_.assign(n, std::vector<std::optional<Expr>>(n));
}

bool HyperbolicSystem::autonomous() const {
  for (const Expr& e : a_)
    if (e.depends_on('t')) return false;
  for (const auto& row : b_)
    for (const Expr& e : row)
      if (e.depends_on('t')) return false;
  return true;
}

namespace {

std::vector<double> time_samples(double window, int n_t) {
  std::vector<double> ts(static_cast<std::size_t>(n_t));
  for (int l = 0; l < n_t; ++l)
    ts[static_cast<std::size_t>(l)] = -window + 2.0 * window * l / (n_t - 1);
  return ts;
}

}  // namespace

HyperbolicSystem validate_system(HyperbolicSystem sys, const ValidationOptions& opt) {
  const int n = sys.n();
  std::vector<double> ts = time_samples(sys.sample_window_, std::min(opt.n_t, 33));

  auto check_periodic = [&](const Expr& e, const std::string& name) {
    if (!check_x_periodicity(e, ts, std::min(opt.n_x, 129), opt.periodicity_tol))
      throw ValidationError("coefficient " + name + " is not 1-periodic in x (tol " +
                            std::to_string(opt.periodicity_tol) + ")");
  };
  for (int j = 0; j < n; ++j) check_periodic(sys.a_[j], "a_" + std::to_string(j + 1));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      check_periodic(sys.b_[j][k], "b_" + std::to_string(j + 1) + std::to_string(k + 1));

  // Hyperbolicity: |a_j| bounded away from 0 and of constant sign on the grid.
  std::vector<double> tfull = time_samples(sys.sample_window_, opt.n_t);
  std::vector<int> sign(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < n; ++j) {
    double min_abs = std::numeric_limits<double>::infinity();
    double min_x = 0.0, min_t = 0.0;
    int sgn = 0;
    for (double t : tfull) {
      for (int i = 0; i < opt.n_x; ++i) {
        double x = static_cast<double>(i) / (opt.n_x - 1);
        double v = sys.a_[j].eval(x, t);
        int s = (v > 0.0) - (v < 0.0);
        if (sgn == 0) sgn = s;
        if (s == 0 || s != sgn)
          throw ValidationError("hyperbolicity violated: a_" + std::to_string(j + 1) +
                                (s == 0 ? " vanishes" : " changes sign") + " near (x=" +
                                std::to_string(x) + ", t=" + std::to_string(t) + ")");
        if (std::abs(v) < min_abs) {
          min_abs = std::abs(v);
          min_x = x;
          min_t = t;
        }
      }
    }
    if (!(min_abs > 1e-12))
      throw ValidationError("hyperbolicity violated: |a_" + std::to_string(j + 1) +
                            "| ~ 0 at (x=" + std::to_string(min_x) + ", t=" +
                            std::to_string(min_t) + ")");
    sign[static_cast<std::size_t>(j)] = sgn;
  }

  // Stable permutation putting positive speeds first.
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int p, int q) {
    return sign[static_cast<std::size_t>(p)] > sign[static_cast<std::size_t>(q)];
  });

  HyperbolicSystem out;
  out.sample_window_ = sys.sample_window_;
  out.a_.resize(static_cast<std::size_t>(n));
  out.b_.assign(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(n)));
  out.btilde_.assign(static_cast<std::size_t>(n),
                     std::vector<std::optional<Expr>>(static_cast<std::size_t>(n)));
  int m = 0;
  for (int j = 0; j < n; ++j) {
    int pj = perm[static_cast<std::size_t>(j)];
    out.a_[j] = sys.a_[pj];
    if (sign[static_cast<std::size_t>(pj)] > 0) ++m;
    for (int k = 0; k < n; ++k) {
      int pk = perm[static_cast<std::size_t>(k)];
      out.b_[j][k] = sys.b_[pj][pk];
      out.btilde_[j][k] = sys.btilde_[pj][pk];
    }
  }
  out.signature_.m = m;
  out.signature_.permutation = perm;
  out.signature_.chi.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out.signature_.chi[static_cast<std::size_t>(j)] = (j < m) ? 0 : 1;
  out.validated_ = true;
  return out;
}

namespace {

ExtremaReport sample_extrema(const HyperbolicSystem& sys, int n_x, int n_t) {
  const int n = sys.n();
  ExtremaReport rep;
  rep.n_x = n_x;
  rep.n_t = n_t;
  rep.sample_window = sys.sample_window();
  rep.comp.assign(static_cast<std::size_t>(n), ComponentExtrema{});
  for (int j = 0; j < n; ++j) {
    ComponentExtrema& c = rep.comp[static_cast<std::size_t>(j)];
    c.alpha_minus = c.beta_minus = std::numeric_limits<double>::infinity();
    c.alpha_plus = c.beta_plus = -std::numeric_limits<double>::infinity();
    c.beta_offdiag = 0.0;
    for (int l = 0; l < n_t; ++l) {
      double t = -sys.sample_window() + 2.0 * sys.sample_window() * l / (n_t - 1);
      for (int i = 0; i < n_x; ++i) {
        double x = static_cast<double>(i) / (n_x - 1);
        double av = sys.a(j).eval(x, t);
        c.alpha_minus = std::min(c.alpha_minus, av);
        c.alpha_plus = std::max(c.alpha_plus, av);
        double bv = sys.b(j, j).eval(x, t);
        c.beta_minus = std::min(c.beta_minus, bv);
        c.beta_plus = std::max(c.beta_plus, bv);
        double row = 0.0;
        for (int k = 0; k < n; ++k)
          if (k != j) row += std::abs(sys.b(j, k).eval(x, t));
        c.beta_offdiag = std::max(c.beta_offdiag, row);
      }
    }
  }
  return rep;
}

double rel_change(double coarse, double fine) {
  return std::abs(fine - coarse) / (1.0 + std::abs(fine));
}

}  // namespace

ExtremaReport compute_extrema(const HyperbolicSystem& sys, int n_x, int n_t) {
  if (!sys.validated()) throw ValidationError("compute_extrema requires a validated system");
  ExtremaReport coarse = sample_extrema(sys, n_x, n_t);
  ExtremaReport fine = sample_extrema(sys, 2 * n_x - 1, 2 * n_t - 1);
  fine.refinement_converged = true;
  for (int j = 0; j < sys.n(); ++j) {
    const ComponentExtrema& c = coarse.comp[static_cast<std::size_t>(j)];
    const ComponentExtrema& f = fine.comp[static_cast<std::size_t>(j)];
    double worst = std::max({rel_change(c.alpha_minus, f.alpha_minus),
                             rel_change(c.alpha_plus, f.alpha_plus),
                             rel_change(c.beta_minus, f.beta_minus),
                             rel_change(c.beta_plus, f.beta_plus),
                             rel_change(c.beta_offdiag, f.beta_offdiag)});
    if (worst >= 1e-3) fine.refinement_converged = false;
  }
  return fine;
}

CoefficientSups coefficient_sups(const HyperbolicSystem& sys, int n_x, int n_t) {
  CoefficientSups s;
  const int n = sys.n();
  for (int l = 0; l < n_t; ++l) {
    double t = -sys.sample_window() + 2.0 * sys.sample_window() * l / (n_t - 1);
    for (int i = 0; i < n_x; ++i) {
      double x = static_cast<double>(i) / (n_x - 1);
      for (int j = 0; j < n; ++j) {
        s.sup_a = std::max(s.sup_a, std::abs(sys.a(j).eval(x, t)));
        for (int k = 0; k < n; ++k)
          s.sup_b = std::max(s.sup_b, std::abs(sys.b(j, k).eval(x, t)));
      }
    }
  }
  return s;
}

HyperbolicSystem system_from_json_text(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  int n = doc.at("n").get<int>();
  if (n < 1) throw ValidationError("n must be >= 1");
  auto a_doc = doc.at("a");
  auto b_doc = doc.at("b");
  if (static_cast<int>(a_doc.size()) != n) throw ValidationError("'a' must list n expressions");
  if (static_cast<int>(b_doc.size()) != n) throw ValidationError("'b' must be an n x n matrix");
  std::vector<Expr> a;
  for (const auto& s : a_doc) a.push_back(parse_expr(s.get<std::string>()));
  std::vector<std::vector<Expr>> b;
  for (const auto& row : b_doc) {
    if (static_cast<int>(row.size()) != n) throw ValidationError("'b' must be an n x n matrix");
    std::vector<Expr> r;
    for (const auto& s : row) r.push_back(parse_expr(s.get<std::string>()));
    b.push_back(std::move(r));
  }
  double window = doc.value("sample_window", 10.0);
  HyperbolicSystem sys(std::move(a), std::move(b), window);
  if (doc.contains("btilde")) {
    auto bt = doc.at("btilde");
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        std::string s = bt.at(static_cast<std::size_t>(j)).at(static_cast<std::size_t>(k))
                            .get<std::string>();
        if (!s.empty() && j != k) sys.set_btilde(j, k, parse_expr(s));
      }
  }
  return sys;
}

std::string system_to_json_text(const HyperbolicSystem& sys) {
  nlohmann::ordered_json doc;
  doc["n"] = sys.n();
  std::vector<std::string> a;
  for (int j = 0; j < sys.n(); ++j) a.push_back(sys.a(j).str());
  doc["a"] = a;
  std::vector<std::vector<std::string>> b;
  for (int j = 0; j < sys.n(); ++j) {
    std::vector<std::string> row;
    for (int k = 0; k < sys.n(); ++k) row.push_back(sys.b(j, k).str());
    b.push_back(std::move(row));
  }
  doc["b"] = b;
  doc["sample_window"] = sys.sample_window();
  return doc.dump(2) + "\n";
}

}  // namespace hyplab
