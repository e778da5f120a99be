#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hyplab/evolution.hpp"

namespace hyplab {

/// Raised when a linear solve hits a (near-)singular discretized operator;
/// carries the smallest-singular-value estimate as refutation evidence.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, double sigma_min)
      : std::runtime_error(what), sigma_min_(sigma_min) {}
  double sigma_min() const { return sigma_min_; }

 private:
  double sigma_min_;
};

struct AssemblyConfig {
  double T = 10.0;            // temporal half-window [-T, T]
  CharSolverConfig char_cfg = {CharSolverConfig::Method::RK4, 1.0 / 64, 1e-10};
  double max_flagged_fraction = 0.10;
};

/// Discretization of the boundary/integral operators on the space-time
/// grid x_i = i/N (i = 1..N, position 0 identified with node N by
/// periodicity) and t_l = -T + 2T l/(M-1). Stacked index
/// r = (j*N + (i-1))*M + l. C rows read the trace at x = 1 with the
/// characteristic decay weight; D and F rows integrate over [0, x_i] by
/// fourth-order Newton-Cotes with cubic interpolation in time.
struct OperatorAssembly {
  int n = 0, N = 0, M = 0;
  double T = 0.0;
  Eigen::SparseMatrix<double> C, D, F;
  int flagged_rows = 0;  // rows whose characteristic time left [-T, T]

  Eigen::Index size() const { return static_cast<Eigen::Index>(n) * N * M; }
  Eigen::Index index(int j, int i, int l) const {  // i in 1..N
    return (static_cast<Eigen::Index>(j) * N + (i - 1)) * M + l;
  }
};

OperatorAssembly assemble(const HyperbolicSystem& sys, int N, int M,
                          const AssemblyConfig& cfg = {});

/// Only the diagonal boundary operator of one component (4 nonzeros per
/// row); cheap enough for fine grids used in norm estimation.
Eigen::SparseMatrix<double> assemble_component_c(const HyperbolicSystem& sys, int j, int N,
                                                 int M, const AssemblyConfig& cfg = {});

/// Smallest singular value via inverse power iteration on A^T A using
/// sparse LU solves.
double smallest_singular_value(const Eigen::SparseMatrix<double>& A, int iters = 30);

/// Estimate of ||A^{-1}||_inf (Hager-Higham 1-norm estimation on A^{-T}).
double inverse_inf_norm_estimate(const Eigen::SparseMatrix<double>& A);

/// Sample a space-time forcing into the stacked assembly layout.
Eigen::VectorXd sample_forcing(const OperatorAssembly& asmb,
                               const std::function<double(int j, double x, double t)>& f);

struct BoundedSolution {
  Eigen::VectorXd u;
  double residual = 0.0;   // ||u - Cu - Du - Ff||_inf
  double sigma_min = 0.0;  // estimate for I - C - D
};

/// Solve (I - C - D) u = F f directly.
BoundedSolution solve_bounded(const OperatorAssembly& asmb, const Eigen::VectorXd& f,
                              double sigma_threshold = 1e-8);

enum class DichotomyVerdict { Dichotomy, NoDichotomy, Indeterminate };
const char* to_string(DichotomyVerdict v);

struct MonodromyResult {
  Eigen::MatrixXd monodromy;                   // U(s+period, s) on the grid basis
  std::vector<std::complex<double>> eigenvalues;
  double gap = 0.0;                            // min | |lambda| - 1 |
  bool has_gap = false;
  Eigen::MatrixXd P;                           // spectral projection, real part
  double idempotence_defect = 0.0;             // ||P^2 - P||_inf
  double rank_fraction = 0.0;                  // rank(P) / (n N)
  DichotomyVerdict verdict = DichotomyVerdict::Indeterminate;
};

/// Period map on the grid basis with spectral splitting about the unit
/// circle. Requires t-independent coefficients or a known time period.
MonodromyResult monodromy_projection(const HyperbolicSystem& sys, double period, int N,
                                     double gap_tol = 1e-2, const EvolutionConfig& cfg = {});

struct DecayFit {
  double M = 0.0;
  double omega = 0.0;
  double residual = 0.0;  // RMS of the log-norm regression
  std::vector<std::pair<double, double>> samples;  // (gap, log combined norm)
};

/// Fit log||U(t,0)P U(0,s)|| + log-side of the complementary factor
/// against the gap t-s on sampled pairs within [0, window].
DecayFit decay_fit(const HyperbolicSystem& sys, const Eigen::MatrixXd& P, double window,
                   int samples, const EvolutionConfig& cfg = {});

/// Bounded solution via the dichotomy kernel: forward panels accumulate
/// the P-part, backward panels the (I-P)-part, Simpson inside each panel.
/// Assumes the projection commutes with the flow (autonomous systems).
GridFunction greens_apply(const HyperbolicSystem& sys, const Eigen::MatrixXd& P,
                          const std::function<GridFunction(double)>& f, double t, double window,
                          const EvolutionConfig& cfg = {});

struct DetectOptions {
  int monodromy_N = 64;
  double gap_tol = 1e-2;
  int assembly_N = 24;
  int assembly_M = 49;
  double T = 10.0;
  double T_alt = 15.0;
  int refinements = 1;  // number of doublings in the sigma-min trace
  EvolutionConfig evolution;
};

struct DichotomyReport {
  DichotomyVerdict verdict = DichotomyVerdict::Indeterminate;
  std::string route;  // "monodromy" or "svd-trace"
  MonodromyResult monodromy;          // monodromy route only
  std::vector<double> svd_trace;      // relative sigma_min per refinement level
  std::vector<int> svd_sizes;         // N per level
  DecayFit fit;                       // dichotomy verdicts only
  std::string note;
};

/// Orchestrated detection: monodromy route for autonomous coefficients,
/// otherwise the singular-value trace of I - C - D across refinements with
/// a window-sensitivity re-run.
DichotomyReport detect_dichotomy(const HyperbolicSystem& sys, const DetectOptions& opt = {});

}  // namespace hyplab
