#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyplab/expr.hpp"

namespace hyplab {

/// Raised when a system fails validation (periodicity, hyperbolicity,
/// or speed sign change across the sample set).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationOptions {
  double periodicity_tol = 1e-9;
  int n_x = 257;  // odd counts hit endpoints and midpoints
  int n_t = 257;
};

/// Per-component extrema of the coefficients over the sample window:
/// alpha are min/max of the speed, beta_minus/plus of the diagonal
/// coupling, beta_offdiag the max row sum of off-diagonal magnitudes.
struct ComponentExtrema {
  double alpha_minus = 0.0;
  double alpha_plus = 0.0;
  double beta_minus = 0.0;
  double beta_plus = 0.0;
  double beta_offdiag = 0.0;
};

struct ExtremaReport {
  std::vector<ComponentExtrema> comp;
  int n_x = 0;
  int n_t = 0;
  double sample_window = 0.0;
  bool refinement_converged = true;  // false -> warn, not an error
};

struct SpeedSignature {
  int m = 0;                      // number of positive speeds
  std::vector<int> chi;           // x_j: 0 for j < m, 1 otherwise
  std::vector<int> permutation;   // internal index -> original input index
};

/// A validated n-component hyperbolic system. After validate_system the
/// components are stored positive-speeds-first; `signature().permutation`
/// maps back to the input order. Instances are immutable once validated.
class HyperbolicSystem {
 public:
  HyperbolicSystem() = default;
  HyperbolicSystem(std::vector<Expr> a, std::vector<std::vector<Expr>> b,
                   double sample_window = 10.0);

  int n() const { return static_cast<int>(a_.size()); }
  double sample_window() const { return sample_window_; }
  const Expr& a(int j) const { return a_[static_cast<std::size_t>(j)]; }
  const Expr& b(int j, int k) const {
    return b_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
  }
  const std::optional<Expr>& btilde(int j, int k) const {
    return btilde_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
  }
  void set_btilde(int j, int k, Expr e) {
    btilde_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = std::move(e);
  }

  bool validated() const { return validated_; }
  const SpeedSignature& signature() const { return signature_; }

  /// True when no coefficient depends on t; slab propagators are then
  /// reusable across time.
  bool autonomous() const;

 private:
  friend HyperbolicSystem validate_system(HyperbolicSystem sys, const ValidationOptions& opt);

  std::vector<Expr> a_;
  std::vector<std::vector<Expr>> b_;
  std::vector<std::vector<std::optional<Expr>>> btilde_;
  double sample_window_ = 10.0;
  bool validated_ = false;
  SpeedSignature signature_;
};

/// Checks 1-periodicity of every coefficient, the uniform hyperbolicity
/// bound inf |a_j| > 0 on the sample grid, and constancy of each speed's
/// sign; reorders components positive-speeds-first.
HyperbolicSystem validate_system(HyperbolicSystem sys, const ValidationOptions& opt = {});

/// Samples coefficient extrema over [0,1] x [-T_s, T_s] with one
/// refinement pass (doubled resolution; relative change above 1e-3 sets
/// the warning flag).
ExtremaReport compute_extrema(const HyperbolicSystem& sys, int n_x = 257, int n_t = 257);

/// sup over samples of |a_j| (all j) and |b_jk| (all j,k); used by the
/// a-priori exponential bound.
struct CoefficientSups {
  double sup_a = 0.0;
  double sup_b = 0.0;
};
CoefficientSups coefficient_sups(const HyperbolicSystem& sys, int n_x = 257, int n_t = 257);

/// JSON (de)serialization of the system definition document:
/// {"n": int, "a": [...], "b": [[...]], "sample_window": real,
///  "btilde": [[...]] (optional)}
HyperbolicSystem system_from_json_text(const std::string& text);
std::string system_to_json_text(const HyperbolicSystem& sys);

}  // namespace hyplab
