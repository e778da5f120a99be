#include "hyplab/report_json.hpp"

#include <json.hpp>

namespace hyplab {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

const char* verdict_str(Verdict v) { return to_string(v); }

ordered_json components_json(const std::vector<ComponentCondition>& comp) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : comp) {
    ordered_json e;
    e["j"] = c.j;
    e["case"] = to_string(c.sign_case);
    e["beta_j"] = c.beta_j;
    e["threshold"] = c.threshold;
    e["margin"] = c.margin;
    e["verdict"] = c.pass ? "pass" : "fail";
    if (!c.note.empty()) e["note"] = c.note;
    arr.push_back(std::move(e));
  }
  return arr;
}

}  // namespace

std::string report_json(const ExtremaReport& rep) {
  ordered_json j;
  j["sample_window"] = rep.sample_window;
  j["n_x"] = rep.n_x;
  j["n_t"] = rep.n_t;
  j["refinement_converged"] = rep.refinement_converged;
  ordered_json arr = ordered_json::array();
  for (std::size_t k = 0; k < rep.comp.size(); ++k) {
    const auto& c = rep.comp[k];
    ordered_json e;
    e["j"] = static_cast<int>(k);
    e["alpha_minus"] = c.alpha_minus;
    e["alpha_plus"] = c.alpha_plus;
    e["beta_minus"] = c.beta_minus;
    e["beta_plus"] = c.beta_plus;
    e["beta_offdiag"] = c.beta_offdiag;
    arr.push_back(std::move(e));
  }
  j["components"] = std::move(arr);
  return dump(j);
}

std::string report_json(const ConditionReport& rep) {
  ordered_json j;
  j["components"] = components_json(rep.comp);
  j["pass"] = rep.pass;
  if (rep.diag_negative.has_value() || rep.diag_positive.has_value()) {
    if (rep.diag_negative) j["diag_negative"] = *rep.diag_negative;
    if (rep.diag_positive) j["diag_positive"] = *rep.diag_positive;
    ordered_json decay = ordered_json::array();
    for (const auto& d : rep.decay) {
      ordered_json e;
      e["eps"] = d.eps;
      e["cutoff"] = d.c;
      e["verdict"] = verdict_str(d.verdict);
      decay.push_back(std::move(e));
    }
    j["decay"] = std::move(decay);
    j["decay_verdict"] = verdict_str(rep.decay_verdict);
    j["factor_verdict"] = verdict_str(rep.factor_verdict);
    if (!rep.factor_note.empty()) j["factor_note"] = rep.factor_note;
    j["overall"] = verdict_str(rep.overall);
  }
  return dump(j);
}

std::string report_json(const CorollaryResult& rep) {
  ordered_json j;
  j["pass"] = rep.pass;
  j["max_bound"] = rep.max_bound;
  j["bounds"] = rep.bounds;
  return dump(j);
}

std::string report_json(const UniquenessReport& rep) {
  ordered_json j;
  ordered_json arr = ordered_json::array();
  for (const auto& c : rep.comp) {
    ordered_json e;
    e["j"] = c.j;
    e["inf_past"] = c.inf_past;
    e["sup_future"] = c.sup_future;
    arr.push_back(std::move(e));
  }
  j["components"] = std::move(arr);
  j["past_negative"] = rep.past_negative;
  j["future_positive"] = rep.future_positive;
  return dump(j);
}

std::string report_json(const TrichotomyResult& rep) {
  ordered_json j;
  ordered_json arr = ordered_json::array();
  for (const auto& br : rep.branches) {
    ordered_json e;
    e["condition"] = br.condition;
    e["applicable"] = br.applicable;
    e["lhs"] = br.lhs;
    e["rhs"] = br.rhs;
    e["margin"] = br.margin;
    e["verdict"] = br.pass ? "pass" : (br.applicable ? "fail" : "n/a");
    arr.push_back(std::move(e));
  }
  j["branches"] = std::move(arr);
  j["pass"] = rep.pass;
  return dump(j);
}

std::string report_json(const DichotomyReport& rep) {
  ordered_json j;
  j["verdict"] = to_string(rep.verdict);
  j["route"] = rep.route;
  if (rep.route == "monodromy") {
    const MonodromyResult& m = rep.monodromy;
    j["rank"] = m.rank_fraction;
    j["gap"] = m.gap;
    j["idempotence_defect"] = m.idempotence_defect;
    ordered_json eig = ordered_json::array();
    for (const auto& lam : m.eigenvalues)
      eig.push_back(ordered_json::array({lam.real(), lam.imag()}));
    j["eigenvalues"] = std::move(eig);
  }
  if (!rep.svd_trace.empty()) {
    j["svd_trace"] = rep.svd_trace;
    j["svd_sizes"] = rep.svd_sizes;
  }
  if (rep.verdict == DichotomyVerdict::Dichotomy && !rep.fit.samples.empty()) {
    j["M"] = rep.fit.M;
    j["omega"] = rep.fit.omega;
    j["fit_residual"] = rep.fit.residual;
  }
  if (!rep.note.empty()) j["note"] = rep.note;
  return dump(j);
}

std::string error_json(const std::string& kind, const std::string& message) {
  ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  return dump(j);
}

}  // namespace hyplab
