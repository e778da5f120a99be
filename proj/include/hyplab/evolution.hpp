#pragma once

#include <map>
#include <stdexcept>

#include <Eigen/Core>

#include "hyplab/characteristics.hpp"
#include "hyplab/grid.hpp"
#include "hyplab/system.hpp"

namespace hyplab {

/// Raised when the slab fixed-point iteration fails to contract; carries
/// the last defect so callers can decide how much to shrink dt.
class PicardError : public std::runtime_error {
 public:
  PicardError(const std::string& what, double defect)
      : std::runtime_error(what), defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

struct EvolutionConfig {
  int N = 256;                 // spatial points, power of two, >= 16
  double dt = 1.0 / 256;       // time slab length
  double picard_tol = 1e-10;
  int picard_max = 50;
  CharSolverConfig char_cfg;
};

/// A-priori growth bound ||U(t,s)|| <= K exp(omega (t-s)).
struct ExpBound {
  double K = 1.0;
  double theta = 0.0;
  double omega = 0.0;
};

/// Diagonal (uncoupled) transport-decay: component j is carried along its
/// characteristic from time s with the accumulated diagonal decay factor.
GridFunction u0_apply(const HyperbolicSystem& sys, double t, double s, const GridFunction& u,
                      const EvolutionConfig& cfg = {});

/// Off-diagonal coupling as a pointwise operator:
/// result_j(x) = -sum_{k != j} b_jk(x,t) u_k(x).
GridFunction b_apply(const HyperbolicSystem& sys, double t, const GridFunction& u);

/// Advances u from time s to time t (either direction) through the coupled
/// system, caching slab operators across calls. Reuse one Evolver when many
/// applications over the same time range are needed.
class Evolver {
 public:
  Evolver(const HyperbolicSystem& sys, EvolutionConfig cfg = {});

  const EvolutionConfig& config() const { return cfg_; }
  const HyperbolicSystem& system() const { return *sys_; }

  GridFunction apply(double t, double s, GridFunction u);

  /// Dense matrix of the one-slab propagator on stacked coordinates
  /// (size nN x nN); used for monodromy and spectral work.
  Eigen::MatrixXd slab_matrix(double s0, double s1);

 private:
  struct U0Stencil {
    double w;
    CubicStencil st;
  };
  struct SlabOp {
    double s0, mid, s1;
    std::vector<U0Stencil> mid_from_s0, s1_from_s0, s1_from_mid;  // n*N each
    std::vector<double> b_s0, b_mid, b_s1;                        // (j*n+k)*N+i
  };

  const SlabOp& slab(double s0, double s1);
  SlabOp build_slab(double s0, double s1) const;
  GridFunction advance_slab(const SlabOp& op, const GridFunction& u0) const;

  const HyperbolicSystem* sys_;
  EvolutionConfig cfg_;
  bool autonomous_;
  std::map<std::pair<double, double>, SlabOp> cache_;
};

/// One-shot convenience wrapper around Evolver.
GridFunction u_apply(const HyperbolicSystem& sys, double t, double s, const GridFunction& u,
                     const EvolutionConfig& cfg = {});

/// theta = min(1/(2 sup|a|), 1/(2n(n+1) sup|b|)), omega = log(3+2n)/theta,
/// K = 1. When b vanishes identically only the a-branch applies.
ExpBound exp_bound(const HyperbolicSystem& sys);

/// sup-norm of u_apply(t,s,u) - u_apply(t,r, u_apply(r,s,u)).
double cocycle_defect(const HyperbolicSystem& sys, double t, double r, double s,
                      const GridFunction& u, const EvolutionConfig& cfg = {});

}  // namespace hyplab
