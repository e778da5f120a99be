#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyplab/characteristics.hpp"
#include "hyplab/system.hpp"

namespace hyplab {

/// Joint sign pattern of (speed, diagonal coupling) for one component.
/// First letter: sign of a_j; second: sign of b_jj. Indefinite means b_jj
/// changes sign (or touches zero) on the sample window.
enum class SignCase { PP, MM, PM, MP, Indefinite };

const char* to_string(SignCase c);

/// Classify component j from its sampled extrema. The speed sign is
/// definite after validation; only b_jj can be indefinite.
SignCase classify_sign_case(const ComponentExtrema& e);

/// Smallness threshold for the off-diagonal row sum beta_j in the
/// constant-coefficient simplification: |b_jj| when a_j*b_jj > 0, else
/// |b_jj| / (2 e^{-b_jj/a_j} - 1).
double remark_constant_thresholds(double a_j, double b_jj);

/// Bound on ||(I - C_j)^{-1}|| for the per-component boundary operator.
double lemma_iso_bound(SignCase c, const ComponentExtrema& e);

/// Bound on ||(I - C_j)^{-1} D_j||; strictly below 1 forces a dichotomy.
double lemma_dest_bound(SignCase c, const ComponentExtrema& e);

struct ComponentCondition {
  int j = 0;
  SignCase sign_case = SignCase::Indefinite;
  double beta_j = 0.0;     // off-diagonal row-sum sup
  double threshold = 0.0;  // case-specific smallness bound on beta_j
  double margin = 0.0;     // threshold - beta_j (strict: pass iff > 0)
  bool pass = false;
  std::string note;
};

enum class Verdict { Pass, Fail, Indeterminate };
const char* to_string(Verdict v);

struct DecayEntry {
  double eps = 0.0;
  double c = 0.0;  // smallest sampled cutoff with |b_jk| < eps off [-c,c]
  Verdict verdict = Verdict::Indeterminate;
};

struct ConditionReport {
  std::vector<ComponentCondition> comp;
  bool pass = false;

  // Filled by theorem2_check only.
  std::optional<bool> diag_negative;  // sup b_jj < 0 for all j
  std::optional<bool> diag_positive;  // inf b_jj > 0 for all j
  std::vector<DecayEntry> decay;
  Verdict decay_verdict = Verdict::Indeterminate;
  Verdict factor_verdict = Verdict::Indeterminate;
  std::string factor_note;
  Verdict overall = Verdict::Indeterminate;
};

/// Smallness-of-coupling test: per component, beta_j strictly below the
/// sign-case threshold. Indefinite b_jj fails that component.
ConditionReport theorem3_check(const HyperbolicSystem& sys, const ExtremaReport& ex);

/// Equivalent contraction restatement: max_j lemma_dest_bound < 1.
/// Verdict always agrees with theorem3_check.
struct CorollaryResult {
  bool pass = false;
  double max_bound = 0.0;
  std::vector<double> bounds;  // per component
};
CorollaryResult corollary_check(const HyperbolicSystem& sys, const ExtremaReport& ex);

/// Asymptotically-vanishing-coupling test: definite diagonal sign plus a
/// finite-window decay certificate for the off-diagonal entries plus the
/// speed-difference factorization of b_jk.
ConditionReport theorem2_check(const HyperbolicSystem& sys, const ExtremaReport& ex,
                               double t0, double t1, const std::vector<double>& eps_grid,
                               int n_x = 129, int n_t = 513);

/// Oriented integral of b_jj/a_j along the characteristic of component j
/// from position 1-x_j to x_j at anchor time t (x_j = 0 for positive
/// speeds, 1 for negative). Its sign drives the uniqueness certificates.
double uniqueness_integral(const HyperbolicSystem& sys, int j, double t,
                           const CharSolverConfig& cfg = {});

/// Sampled inf of the integral over t < -T and sup over t > T.
struct UniquenessReport {
  struct PerComponent {
    int j;
    double inf_past;   // inf over sampled t < -T
    double sup_future; // sup over sampled t > T
  };
  std::vector<PerComponent> comp;
  bool past_negative = false;   // inf_past < 0 for all j
  bool future_positive = false; // sup_future > 0 for all j
};
UniquenessReport uniqueness_check(const HyperbolicSystem& sys, double T, int n_samples = 33,
                                  const CharSolverConfig& cfg = {});

}  // namespace hyplab
