// Command-line front end: parse system documents, dispatch analyses, and
// emit machine-readable reports. Exit codes: 0 analysis completed (whatever
// the mathematical verdict), 1 usage error, 2 invalid input, 3 numerical
// failure.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyplab/conditions.hpp"
#include "hyplab/dichotomy.hpp"
#include "hyplab/evolution.hpp"
#include "hyplab/reduction.hpp"
#include "hyplab/report_json.hpp"

using namespace hyplab;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
}

HyperbolicSystem load_system(const std::string& path) {
  return validate_system(system_from_json_text(read_file(path)));
}

struct CsvWriter {
  std::ostringstream ss;
  explicit CsvWriter(std::initializer_list<const char*> header) {
    ss.precision(17);
    bool first = true;
    for (const char* h : header) {
      if (!first) ss << ",";
      ss << h;
      first = false;
    }
    ss << "\n";
  }
  template <class... Vals>
  void row(Vals... vals) {
    bool first = true;
    ((ss << (first ? "" : ","), ss << vals, first = false), ...);
    ss << "\n";
  }
};

int dispatch(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << error_json("expression-syntax", e.what());
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << error_json("validation", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << error_json("document-syntax", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << error_json("invalid-input", e.what());
    return 2;
  } catch (const PicardError& e) {
    std::cerr << error_json("non-convergence",
                            std::string(e.what()) + " (defect " + std::to_string(e.defect()) + ")");
    return 3;
  } catch (const SingularSystemError& e) {
    std::cerr << error_json("singular-system", e.what());
    return 3;
  } catch (const IntegrationError& e) {
    std::cerr << error_json("integration-failure", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::cerr << error_json("numerical-failure", e.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analysis lab for periodic first-order hyperbolic systems"};
  app.require_subcommand(1);

  std::string input, output;
  auto add_io = [&](CLI::App* cmd, bool with_output = true) {
    cmd->add_option("input", input, "system definition JSON")->required();
    if (with_output) cmd->add_option("-o,--output", output, "report path (default stdout)");
  };

  // validate
  auto* c_validate = app.add_subcommand("validate", "validate a system document");
  add_io(c_validate);
  c_validate->callback([&] {
    std::exit(dispatch([&] {
      auto sys = load_system(input);
      nlohmann::ordered_json j;
      j["valid"] = true;
      j["n"] = sys.n();
      j["positive_speeds"] = sys.signature().m;
      j["autonomous"] = sys.autonomous();
      write_output(output, j.dump(2) + "\n");
      return 0;
    }));
  });

  // extrema
  auto* c_extrema = app.add_subcommand("extrema", "sample coefficient extrema");
  int nx = 257, nt = 257;
  add_io(c_extrema);
  c_extrema->add_option("--nx", nx, "spatial sample count");
  c_extrema->add_option("--nt", nt, "temporal sample count");
  c_extrema->callback([&] {
    std::exit(dispatch([&] {
      auto sys = load_system(input);
      write_output(output, report_json(compute_extrema(sys, nx, nt)));
      return 0;
    }));
  });

  // check-th3
  auto* c_th3 = app.add_subcommand("check-th3", "smallness-of-coupling sufficient condition");
  add_io(c_th3);
  c_th3->callback([&] {
    std::exit(dispatch([&] {
      auto sys = load_system(input);
      auto ex = compute_extrema(sys);
      write_output(output, report_json(theorem3_check(sys, ex)));
      return 0;
    }));
  });

  // check-th2
  auto* c_th2 = app.add_subcommand("check-th2", "vanishing-coupling sufficient condition");
  double t0 = -10.0, t1 = 10.0;
  std::vector<double> eps_grid = {1e-1, 1e-2, 1e-3};
  add_io(c_th2);
  c_th2->add_option("--t0", t0, "window start");
  c_th2->add_option("--t1", t1, "window end");
  c_th2->add_option("--eps", eps_grid, "decay thresholds");
  c_th2->callback([&] {
    std::exit(dispatch([&] {
      auto sys = load_system(input);
      auto ex = compute_extrema(sys);
      write_output(output, report_json(theorem2_check(sys, ex, t0, t1, eps_grid)));
      return 0;
    }));
  });

  // check-uniqueness
  auto* c_uni = app.add_subcommand("check-uniqueness", "bounded-solution uniqueness certificate");
  double uni_T = 10.0;
  int uni_samples = 33;
  add_io(c_uni);
  c_uni->add_option("--T", uni_T, "certificate horizon");
  c_uni->add_option("--samples", uni_samples, "sample count beyond the horizon");
  c_uni->callback([&] {
    std::exit(dispatch([&] {
      auto sys = load_system(input);
      write_output(output, report_json(uniqueness_check(sys, uni_T, uni_samples)));
      return 0;
    }));
  });

  // simulate
  auto* c_sim = app.add_subcommand("simulate", "evolve initial data and dump snapshots");
  double sim_s = 0.0, sim_t = 1.0, sim_dt = 1.0 / 256;
  int sim_N = 256;
  std::vector<std::string> initial;
  std::vector<double> snapshot_times;
  add_io(c_sim);
  c_sim->add_option("--from", sim_s, "initial time");
  c_sim->add_option("--to", sim_t, "final time");
  c_sim->add_option("--N", sim_N, "spatial grid size (power of two)");
  c_sim->add_option("--dt", sim_dt, "time slab length");
  c_sim->add_option("--initial", initial, "initial data expressions, one per component")
      ->required();
  c_sim->add_option("--at", snapshot_times, "snapshot times (default: final time)");
  c_sim->callback([&] {
    std::exit(dispatch([&] {
      auto sys = load_system(input);
      if (static_cast<int>(initial.size()) != sys.n())
        throw std::invalid_argument("--initial needs exactly n expressions");
      EvolutionConfig cfg;
      cfg.N = sim_N;
      cfg.dt = sim_dt;
      GridFunction u(sys.n(), sim_N);
      for (int j = 0; j < sys.n(); ++j) {
        Expr e = parse_expr(initial[static_cast<std::size_t>(j)]);
        u.fill(j, [&](double x) { return e.eval(x, sim_s); });
      }
      if (snapshot_times.empty()) snapshot_times.push_back(sim_t);
      CsvWriter csv({"t", "x", "u"});
      csv.ss.str("");
      csv.ss << "t,x";
      for (int j = 0; j < sys.n(); ++j) csv.ss << ",u_" << (j + 1);
      csv.ss << "\n";
      Evolver ev(sys, cfg);
      for (double ts : snapshot_times) {
        GridFunction v = ev.apply(ts, sim_s, u);
        for (int i = 0; i < sim_N; ++i) {
          csv.ss << ts << "," << static_cast<double>(i) / sim_N;
          for (int j = 0; j < sys.n(); ++j) csv.ss << "," << v.at(j, i);
          csv.ss << "\n";
        }
      }
      write_output(output, csv.ss.str());
      return 0;
    }));
  });

  // dichotomy
  auto* c_dich = app.add_subcommand("dichotomy", "detect or refute exponential dichotomy");
  DetectOptions dopt;
  std::string fit_csv;
  add_io(c_dich);
  c_dich->add_option("--monodromy-N", dopt.monodromy_N, "grid for the period map");
  c_dich->add_option("--gap-tol", dopt.gap_tol, "unit-circle annulus half-width");
  c_dich->add_option("--assembly-N", dopt.assembly_N, "spatial grid for the operator route");
  c_dich->add_option("--assembly-M", dopt.assembly_M, "temporal grid for the operator route");
  c_dich->add_option("--T", dopt.T, "temporal half-window");
  c_dich->add_option("--T-alt", dopt.T_alt, "sensitivity re-run half-window");
  c_dich->add_option("--refinements", dopt.refinements, "doublings in the sigma-min trace");
  c_dich->add_option("--fit-csv", fit_csv, "write (gap, log-norm) samples as CSV");
  c_dich->callback([&] {
    std::exit(dispatch([&] {
      auto sys = load_system(input);
      DichotomyReport rep = detect_dichotomy(sys, dopt);
      write_output(output, report_json(rep));
      if (!fit_csv.empty()) {
        CsvWriter csv({"gap", "log_norm"});
        for (const auto& [g, l] : rep.fit.samples) csv.row(g, l);
        write_output(fit_csv, csv.ss.str());
      }
      return 0;
    }));
  });

  // green
  auto* c_green = app.add_subcommand("green",
                                     "bounded solution via the dichotomy kernel (autonomous)");
  double g_t = 0.0, g_window = 10.0;
  int g_N = 64;
  std::vector<std::string> forcing;
  add_io(c_green);
  c_green->add_option("--t", g_t, "evaluation time");
  c_green->add_option("--window", g_window, "integration half-window");
  c_green->add_option("--N", g_N, "spatial grid (power of two)");
  c_green->add_option("--forcing", forcing, "forcing expressions of x and t, one per component")
      ->required();
  c_green->callback([&] {
    std::exit(dispatch([&] {
      auto sys = load_system(input);
      if (static_cast<int>(forcing.size()) != sys.n())
        throw std::invalid_argument("--forcing needs exactly n expressions");
      if (!sys.autonomous())
        throw std::invalid_argument(
            "the kernel route needs t-independent coefficients; use dichotomy + "
            "the operator route instead");
      std::vector<Expr> fe;
      for (const auto& s : forcing) fe.push_back(parse_expr(s));
      MonodromyResult mono = monodromy_projection(sys, 1.0, g_N);
      if (mono.verdict != DichotomyVerdict::Dichotomy)
        throw SingularSystemError("no dichotomy detected; kernel undefined", mono.gap);
      auto f = [&](double s) {
        GridFunction g(sys.n(), g_N);
        for (int j = 0; j < sys.n(); ++j)
          g.fill(j, [&](double x) { return fe[static_cast<std::size_t>(j)].eval(x, s); });
        return g;
      };
      EvolutionConfig ecfg;
      ecfg.N = g_N;
      ecfg.dt = 1.0 / g_N;
      GridFunction u = greens_apply(sys, mono.P, f, g_t, g_window, ecfg);
      CsvWriter csv({"x", "u"});
      csv.ss.str("");
      csv.ss << "x";
      for (int j = 0; j < sys.n(); ++j) csv.ss << ",u_" << (j + 1);
      csv.ss << "\n";
      for (int i = 0; i < g_N; ++i) {
        csv.ss << static_cast<double>(i) / g_N;
        for (int j = 0; j < sys.n(); ++j) csv.ss << "," << u.at(j, i);
        csv.ss << "\n";
      }
      write_output(output, csv.ss.str());
      return 0;
    }));
  });

  // reduce
  auto* c_reduce = app.add_subcommand("reduce",
                                      "second-order equation -> first-order system document");
  add_io(c_reduce);
  c_reduce->callback([&] {
    std::exit(dispatch([&] {
      SecondOrderEq eq = second_order_from_json_text(read_file(input));
      HyperbolicSystem sys = reduce(eq);
      write_output(output, system_to_json_text(sys));
      return 0;
    }));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << error_json("usage", e.what());
    return 1;
  }
  return 0;
}
