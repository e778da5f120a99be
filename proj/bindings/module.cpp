// Python bindings for the hyperbolic-system dichotomy laboratory.
// Report-producing calls return plain dicts (round-tripped through the
// canonical JSON renderings) so Python consumers see the same documents
// the CLI prints.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <functional>
#include <string>
#include <vector>

#include "hyplab/conditions.hpp"
#include "hyplab/dichotomy.hpp"
#include "hyplab/evolution.hpp"
#include "hyplab/expr.hpp"
#include "hyplab/grid.hpp"
#include "hyplab/reduction.hpp"
#include "hyplab/report_json.hpp"
#include "hyplab/system.hpp"

namespace py = pybind11;
using namespace hyplab;

namespace {

py::object json_loads(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

HyperbolicSystem make_system(const std::vector<std::string>& a,
                             const std::vector<std::vector<std::string>>& b,
                             double sample_window) {
  std::vector<Expr> ae;
  ae.reserve(a.size());
  for (const auto& s : a) ae.push_back(parse_expr(s));
  std::vector<std::vector<Expr>> be;
  be.reserve(b.size());
  for (const auto& row : b) {
    std::vector<Expr> r;
    r.reserve(row.size());
    for (const auto& s : row) r.push_back(parse_expr(s));
    be.push_back(std::move(r));
  }
  return HyperbolicSystem(std::move(ae), std::move(be), sample_window);
}

GridFunction grid_from_lists(const std::vector<std::vector<double>>& values) {
  int n = static_cast<int>(values.size());
  if (n < 1) throw std::invalid_argument("need at least one component");
  int N = static_cast<int>(values[0].size());
  GridFunction u(n, N);
  for (int j = 0; j < n; ++j) {
    if (static_cast<int>(values[static_cast<std::size_t>(j)].size()) != N)
      throw std::invalid_argument("all components need the same number of samples");
    for (int i = 0; i < N; ++i) u.at(j, i) = values[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  }
  return u;
}

std::vector<std::vector<double>> grid_to_lists(const GridFunction& u) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(u.n()),
                                       std::vector<double>(static_cast<std::size_t>(u.N())));
  for (int j = 0; j < u.n(); ++j)
    for (int i = 0; i < u.N(); ++i) out[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = u.at(j, i);
  return out;
}

}  // namespace

PYBIND11_MODULE(_hyplab, m) {
  m.doc() = "Numerical laboratory for exponential dichotomies of periodic "
            "first-order hyperbolic systems";

  py::register_exception<ParseError>(m, "ExprParseError");
  py::register_exception<ValidationError>(m, "SystemValidationError");
  py::register_exception<EvalDomainError>(m, "EvalDomainError");
  py::register_exception<PicardError>(m, "PicardError");
  py::register_exception<SingularSystemError>(m, "SingularSystemError");

  py::class_<Expr>(m, "Expr")
      .def(py::init([](const std::string& src) { return parse_expr(src); }), py::arg("source"))
      .def("__call__", &Expr::eval, py::arg("x"), py::arg("t"))
      .def("diff", [](const Expr& e, const std::string& var) {
             if (var != "x" && var != "t") throw std::invalid_argument("var must be 'x' or 't'");
             return e.diff(var[0]);
           },
           py::arg("var"))
      .def("depends_on", [](const Expr& e, const std::string& var) {
             if (var != "x" && var != "t") throw std::invalid_argument("var must be 'x' or 't'");
             return e.depends_on(var[0]);
           },
           py::arg("var"))
      .def("__str__", &Expr::str)
      .def("__repr__", [](const Expr& e) { return "Expr(\"" + e.str() + "\")"; });

  m.def("parse_expr", [](const std::string& src) { return parse_expr(src); }, py::arg("source"),
        "Parse a coefficient expression over the variables x and t.");

  py::class_<HyperbolicSystem>(m, "System")
      .def(py::init(&make_system), py::arg("a"), py::arg("b"), py::arg("sample_window") = 10.0,
           "Build a system from per-component speed expressions `a` and the "
           "coupling matrix `b` (row-major expression strings).")
      .def_static("from_json", [](const std::string& text) { return system_from_json_text(text); },
                  py::arg("text"))
      .def("to_json", &system_to_json_text)
      .def_property_readonly("n", &HyperbolicSystem::n)
      .def_property_readonly("validated", &HyperbolicSystem::validated)
      .def_property_readonly("autonomous", &HyperbolicSystem::autonomous)
      .def_property_readonly("positive_speeds",
                             [](const HyperbolicSystem& s) { return s.signature().m; })
      .def("speed", [](const HyperbolicSystem& s, int j) { return s.a(j); }, py::arg("j"))
      .def("coupling", [](const HyperbolicSystem& s, int j, int k) { return s.b(j, k); },
           py::arg("j"), py::arg("k"))
      .def("__repr__", [](const HyperbolicSystem& s) {
        return "System(n=" + std::to_string(s.n()) +
               (s.validated() ? ", validated" : ", unvalidated") + ")";
      });

  m.def("validate", [](const HyperbolicSystem& sys) { return validate_system(sys); },
        py::arg("system"),
        "Check periodicity, uniform hyperbolicity, and speed-sign constancy; "
        "returns the validated system with positive speeds first.");

  m.def("extrema", [](const HyperbolicSystem& sys, int n_x, int n_t) {
          return json_loads(report_json(compute_extrema(sys, n_x, n_t)));
        },
        py::arg("system"), py::arg("n_x") = 257, py::arg("n_t") = 257,
        "Sampled coefficient extrema per component (dict).");

  m.def("check_smallness", [](const HyperbolicSystem& sys) {
          auto ex = compute_extrema(sys);
          return json_loads(report_json(theorem3_check(sys, ex)));
        },
        py::arg("system"),
        "Smallness-of-coupling sufficient condition for a dichotomy (dict).");

  m.def("check_contraction", [](const HyperbolicSystem& sys) {
          auto ex = compute_extrema(sys);
          return json_loads(report_json(corollary_check(sys, ex)));
        },
        py::arg("system"),
        "Equivalent contraction restatement of the smallness condition (dict).");

  m.def("check_decaying_coupling",
        [](const HyperbolicSystem& sys, double t0, double t1, const std::vector<double>& eps) {
          auto ex = compute_extrema(sys);
          return json_loads(report_json(theorem2_check(sys, ex, t0, t1, eps)));
        },
        py::arg("system"), py::arg("t0") = -10.0, py::arg("t1") = 10.0,
        py::arg("eps") = std::vector<double>{1e-1, 1e-2, 1e-3},
        "Asymptotically-vanishing-coupling sufficient condition (dict).");

  m.def("check_uniqueness", [](const HyperbolicSystem& sys, double T, int samples) {
          return json_loads(report_json(uniqueness_check(sys, T, samples)));
        },
        py::arg("system"), py::arg("T") = 10.0, py::arg("samples") = 33,
        "Characteristic-integral sign certificates for uniqueness of the "
        "splitting projection (dict).");

  m.def("evolve",
        [](const HyperbolicSystem& sys, double t, double s,
           const std::vector<std::vector<double>>& initial, int N, double dt) {
          EvolutionConfig cfg;
          if (N > 0) cfg.N = N;
          if (dt > 0) cfg.dt = dt;
          GridFunction u = grid_from_lists(initial);
          if (u.N() != cfg.N) {
            GridFunction r(u.n(), cfg.N);
            for (int j = 0; j < u.n(); ++j)
              r.fill(j, [&](double x) { return u.eval(j, x); });
            u = std::move(r);
          }
          return grid_to_lists(u_apply(sys, t, s, u, cfg));
        },
        py::arg("system"), py::arg("t"), py::arg("s"), py::arg("initial"), py::arg("N") = 0,
        py::arg("dt") = 0.0,
        "Apply the evolution operator from time s to time t to per-component "
        "samples on the uniform periodic grid; returns samples at time t.");

  m.def("detect_dichotomy",
        [](const HyperbolicSystem& sys, int monodromy_N, double gap_tol, int assembly_N,
           int assembly_M, double T, double T_alt, int refinements) {
          DetectOptions opt;
          opt.monodromy_N = monodromy_N;
          opt.gap_tol = gap_tol;
          opt.assembly_N = assembly_N;
          opt.assembly_M = assembly_M;
          opt.T = T;
          opt.T_alt = T_alt;
          opt.refinements = refinements;
          return json_loads(report_json(detect_dichotomy(sys, opt)));
        },
        py::arg("system"), py::arg("monodromy_N") = 64, py::arg("gap_tol") = 1e-2,
        py::arg("assembly_N") = 24, py::arg("assembly_M") = 49, py::arg("T") = 10.0,
        py::arg("T_alt") = 15.0, py::arg("refinements") = 1,
        "Numerical dichotomy verdict: period-map spectrum for autonomous "
        "coefficients, singular-value trace otherwise (dict).");

  m.def("bounded_solution",
        [](const HyperbolicSystem& sys, const std::vector<std::string>& forcing, int N, int M,
           double T) {
          std::vector<Expr> fe;
          fe.reserve(forcing.size());
          for (const auto& s : forcing) fe.push_back(parse_expr(s));
          if (static_cast<int>(fe.size()) != sys.n())
            throw std::invalid_argument("need one forcing expression per component");
          AssemblyConfig cfg;
          cfg.T = T;
          OperatorAssembly asmb = assemble(sys, N, M, cfg);
          Eigen::VectorXd f = sample_forcing(asmb, [&](int j, double x, double t) {
            return fe[static_cast<std::size_t>(j)].eval(x, t);
          });
          BoundedSolution sol = solve_bounded(asmb, f);
          py::dict out;
          out["residual"] = sol.residual;
          out["sigma_min"] = sol.sigma_min;
          std::vector<double> u(sol.u.data(), sol.u.data() + sol.u.size());
          out["u"] = u;
          out["shape"] = py::make_tuple(asmb.n, asmb.N, asmb.M);
          return out;
        },
        py::arg("system"), py::arg("forcing"), py::arg("N") = 24, py::arg("M") = 49,
        py::arg("T") = 10.0,
        "Bounded space-time solution of u_t + a u_x + b u = f via the "
        "discretized integral operator; flat layout ((j*N + i-1)*M + l).");

  m.def("reduce_second_order",
        [](const std::string& a, const std::string& a1, const std::string& a2) {
          SecondOrderEq eq{parse_expr(a), parse_expr(a1), parse_expr(a2)};
          return reduce(eq);
        },
        py::arg("a"), py::arg("a1"), py::arg("a2"),
        "First-order 2x2 system equivalent to u_tt = a^2 u_xx - a1 u_t - a2 u_x "
        "in the Riemann-style unknowns u_t +/- a u_x (unvalidated).");

  m.def("trichotomy_const_check", [](double a, double a1, double a2) {
          return json_loads(report_json(trichotomy_const_check(a, a1, a2)));
        },
        py::arg("a"), py::arg("a1"), py::arg("a2"),
        "Branch-wise smallness inequalities for the constant-coefficient "
        "second-order equation (dict).");
}
