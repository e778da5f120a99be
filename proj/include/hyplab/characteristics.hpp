#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "hyplab/system.hpp"

namespace hyplab {

/// Raised when adaptive integration cannot proceed (step-size underflow).
/// Carries the nodes accumulated before the failure.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::vector<std::pair<double, double>> partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const std::vector<std::pair<double, double>>& partial() const { return partial_; }

 private:
  std::vector<std::pair<double, double>> partial_;
};

struct CharSolverConfig {
  enum class Method { RK4, RK45 };
  Method method = Method::RK4;
  double h = 1.0 / 1024;   // base step in the integration variable
  double tol = 1e-10;      // adaptive only
};

/// Sampled characteristic curve for inspection / CSV dumps. Nodes are
/// (parameter, value) pairs, strictly monotone in the parameter.
struct CharacteristicPath {
  int j = 0;
  double anchor_x = 0.0;
  double anchor_t = 0.0;
  enum class Param { ByTau, ByXi };
  Param param = Param::ByTau;
  std::vector<std::pair<double, double>> nodes;
};

/// Position of the j-th characteristic through (x,t) at time tau_target:
/// solves dxi/dtau = a_j(xi,tau), xi(t)=x. Raw real, not wrapped to [0,1).
double xi(const HyperbolicSystem& sys, int j, double tau_target, double x, double t,
          const CharSolverConfig& cfg = {});

/// Time at which the j-th characteristic through (x,t) crosses position
/// xi_target: solves dtau/dxi = 1/a_j(xi,tau), tau(x)=t.
double tau(const HyperbolicSystem& sys, int j, double xi_target, double x, double t,
           const CharSolverConfig& cfg = {});

/// Exponential decay weight along the characteristic:
/// exp(-int_xi^x (b_jj/a_j)(eta, tau_j(eta,x,t)) d eta).
double weight_c(const HyperbolicSystem& sys, int j, double xi_target, double x, double t,
                const CharSolverConfig& cfg = {});

/// weight_c divided by a_j at the foot point (xi, tau_j(xi,x,t)).
double weight_d(const HyperbolicSystem& sys, int j, double xi_target, double x, double t,
                const CharSolverConfig& cfg = {});

/// Partial derivatives of tau_j(xi,x,t) with respect to the anchor, via the
/// closed forms with the symbolic t-derivative of a_j inside the exponent.
double dtau_dx(const HyperbolicSystem& sys, int j, double xi_target, double x, double t,
               const CharSolverConfig& cfg = {});
double dtau_dt(const HyperbolicSystem& sys, int j, double xi_target, double x, double t,
               const CharSolverConfig& cfg = {});

/// tau / c / d evaluated at a monotone sequence of xi nodes starting from x,
/// in a single sweep (one augmented integration instead of per-node solves).
struct CharacteristicTrace {
  std::vector<double> xi;
  std::vector<double> tau;
  std::vector<double> c;
  std::vector<double> d;
};
CharacteristicTrace trace_by_xi(const HyperbolicSystem& sys, int j, double x, double t,
                                std::span<const double> xi_nodes,
                                const CharSolverConfig& cfg = {});

/// Evenly sampled path for plotting; param selects the parametrization.
CharacteristicPath sample_path(const HyperbolicSystem& sys, int j, double x, double t,
                               double param_end, int n_samples, CharacteristicPath::Param param,
                               const CharSolverConfig& cfg = {});

}  // namespace hyplab
