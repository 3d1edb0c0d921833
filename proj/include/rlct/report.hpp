#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rlct/blowup.hpp"
#include "rlct/io.hpp"
#include "rlct/model.hpp"
#include "rlct/rlct_core.hpp"
#include "rlct/verifier.hpp"
#include "rlct/volume.hpp"

namespace rlct {

inline constexpr const char* kToolName = "rlct-kit";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitInconsistent = 1,
  kExitInapplicable = 2,
  kExitInvalidModel = 3,
  kExitTruncation = 4,
};

inline int exit_code_for(VerifierStatus s) {
  if (s == VerifierStatus::Verified) return kExitOk;
  if (s == VerifierStatus::TruncationExhausted) return kExitTruncation;
  return kExitInapplicable;
}

struct CommandResult {
  int exit_code = kExitOk;
  Json report;
  std::string text;
  std::vector<std::string> warnings;
};

struct RunOptions {
  std::optional<int> d_theta;
  std::optional<int> d_tau;
  bool charts = false;
  bool mt1_check = false;
  CrossingConfig crossing;
  EstimateDefaults estimate;  // command-line values; unset fields fall back to the model file
  bool fit_multiplicity = false;
};

inline VerifyOptions verify_options(const ModelFile& mf, const RunOptions& run) {
  VerifyOptions opt;
  if (auto dt = run.d_theta ? run.d_theta : mf.d_theta) opt.theta_bound = *dt;
  if (auto du = run.d_tau ? run.d_tau : mf.d_tau) opt.tau_bound = *du;
  return opt;
}

inline Json model_json(const ModelSpec& m) {
  Json out;
  out["name"] = m.name;
  out["kind"] = to_string(m.kind);
  out["theta"] = m.vars().theta;
  out["tau"] = m.vars().tau;
  out["provenance"] = m.provenance;
  return out;
}

inline Json realizability_json(const ModelSpec& m) {
  RealizabilityReport r = check_realizable_by_theta(m);
  Json out;
  out["realizable_by_theta_zero"] = r.holds;
  if (!r.holds) {
    out["witness_outcome"] = r.witness_outcome;
    out["witness"] = r.witness;
  }
  return out;
}

inline Json outcome_json(const VerifierOutcome& v) {
  Json out;
  out["status"] = to_string(v.status);
  out["d1"] = v.d1;
  out["d2"] = v.d2;
  out["r"] = v.r;
  out["m"] = v.m;
  out["m_declared"] = v.m_declared;
  out["basis"] = v.basis_params;
  Json transforms = Json::array();
  for (const auto& t : v.transforms)
    transforms.push_back({{"target", t.target_param}, {"monomial", t.monomial_text}, {"coefficient", t.coeff.to_string()}});
  out["transforms"] = transforms;
  out["classification"] = {{"kind", to_string(v.classification.kind)},
                           {"method", v.classification.method},
                           {"exact", v.classification.exact},
                           {"evidence", v.classification.evidence}};
  out["evidence"] = v.direction_evidence;
  out["truncation_used"] = {{"d_theta", v.theta_truncation}, {"d_tau", v.tau_truncation}};
  return out;
}

inline Json rlct_json(const RlctResult& r) {
  Json out;
  out["lambda"] = r.lambda_string();
  out["multiplicity"] = r.multiplicity;
  out["kind"] = to_string(r.kind);
  out["source"] = to_string(r.source);
  out["numeric_positivity"] = r.numeric_positivity;
  return out;
}

inline Json tuple_json(const std::vector<int>& v) { return Json(v); }

inline Json chart_json(const Chart& c) {
  Json out;
  auto lam = c.lambda();
  out["label"] = c.label;
  out["coordinates"] = coordinates_text(c);
  out["terminal"] = c.terminal;
  out["k"] = tuple_json(c.k);
  out["h"] = tuple_json(c.h);
  out["lambda"] = lam ? to_string(*lam) : "inf";
  out["multiplicity"] = c.multiplicity();
  out["jacobian_verified"] = c.jacobian_verified;
  out["normal_crossing"] = {{"checked", c.crossing.checked},
                            {"passed", c.crossing.passed},
                            {"unit_nonzero_at_origin", c.crossing.unit_nonzero_at_origin},
                            {"samples", c.crossing.samples},
                            {"samples_in_exclusion", c.crossing.samples_in_s},
                            {"unit_on_divisor", c.crossing.unit_on_divisor},
                            {"notes", c.crossing.notes},
                            {"nature", "exact check at the chart origin and at seeded rational sample points"}};
  out["exclusion"] = {{"applicable", c.exclusion.applicable},
                      {"empty", c.exclusion.empty},
                      {"exact", c.exclusion.exact},
                      {"description", c.exclusion.description}};
  return out;
}

inline Json series_coefficients_json(const ParamSeries& s) {
  Json out = Json::array();
  for (const auto& [m, c] : s.terms()) out.push_back({{"monomial", s.monomial_string(m)}, {"coefficient", to_string(c)}});
  return out;
}

inline Json mt1_json(const MainTheorem1Report& r) {
  Json out;
  out["passed"] = r.passed;
  out["half_square"] = r.half_square.to_string();
  out["violations"] = r.violations;
  out["checked_terms"] = r.checked_terms;
  return out;
}

inline Json volume_json(const VolumeEstimate& e) {
  Json out;
  out["lambda_hat"] = e.lambda_hat;
  out["slope_stderr"] = e.slope_stderr;
  if (e.multiplicity_hat) out["multiplicity_hat"] = *e.multiplicity_hat;
  out["n_samples"] = e.n_samples;
  out["seed"] = e.seed;
  out["box"] = e.box;
  out["out_of_domain"] = e.out_of_domain;
  out["out_of_domain_fraction"] = e.out_of_domain_fraction();
  Json grid = Json::array();
  for (std::size_t i = 0; i < e.eps_grid.size(); ++i)
    grid.push_back({{"eps", e.eps_grid[i]}, {"volume", e.volumes[i]}, {"stderr", e.stderrs[i]}, {"hits", e.hits[i]}});
  out["grid"] = grid;
  out["note"] = "Monte Carlo estimate of the sublevel-volume exponent; external background, not an exact result";
  return out;
}

inline Json report_header(const char* command, const ModelSpec& m) {
  Json out;
  out["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  out["command"] = command;
  out["model"] = model_json(m);
  out["realizability"] = realizability_json(m);
  return out;
}

inline Json seeds_json(const VerifyOptions& opt, const RunOptions& run) {
  return {{"classification", opt.seed}, {"normal_crossing", run.crossing.seed}};
}

inline CommandResult cmd_verify(const ModelFile& mf, const RunOptions& run = {}) {
  CommandResult out;
  VerifyOptions opt = verify_options(mf, run);
  VerifierOutcome v = verify(mf.model, opt);
  out.report = report_header("verify", mf.model);
  out.report["verifier"] = outcome_json(v);
  out.report["seeds"] = seeds_json(opt, run);
  out.exit_code = exit_code_for(v.status);
  return out;
}

inline CommandResult cmd_rlct(const ModelFile& mf, const RunOptions& run = {}) {
  CommandResult out;
  VerifyOptions opt = verify_options(mf, run);
  VerifierOutcome v = verify(mf.model, opt);
  out.report = report_header("rlct", mf.model);
  out.report["verifier"] = outcome_json(v);
  out.exit_code = exit_code_for(v.status);
  if (auto formula = rlct_for(v)) {
    Json r;
    r["formula"] = rlct_json(*formula);
    r["upper_bound_d1_over_2"] = to_string(upper_bound(static_cast<long>(v.d1)));
    r["model_upper_bound"] = formula->lambda_string();
    r["scope"] = "real log canonical threshold at the analyzed point; an upper bound for the model's learning coefficient";
    if (run.charts) {
      ChartAnalysis ca = analyze_charts(v, run.crossing);
      const bool agree = !ca.result.infinite && ca.result.lambda == formula->lambda &&
                         ca.result.multiplicity == formula->multiplicity && ca.all_crossings_passed &&
                         ca.all_jacobians_verified && ca.all_exclusions_empty;
      r["charts"] = rlct_json(ca.result);
      r["agreement"] = {{"agree", agree},
                        {"all_jacobians_verified", ca.all_jacobians_verified},
                        {"all_normal_crossings_passed", ca.all_crossings_passed},
                        {"all_exclusions_empty", ca.all_exclusions_empty}};
      Json table = Json::array();
      for (const auto& c : ca.charts) table.push_back(chart_json(c));
      out.report["rlct"] = r;
      out.report["charts"] = table;
      if (!agree) {
        out.exit_code = kExitInconsistent;
        out.warnings.push_back("chart analysis does not agree with the formula");
      }
    } else {
      out.report["rlct"] = r;
    }
    if (run.mt1_check) {
      MainTheorem1Report mt = maintheorem1_check(v);
      out.report["main_theorem_1"] = mt1_json(mt);
      if (!mt.passed) {
        out.exit_code = kExitInconsistent;
        out.warnings.push_back("Main Theorem 1 exclusion check failed");
      }
    }
  }
  out.report["seeds"] = seeds_json(opt, run);
  return out;
}

inline CommandResult cmd_table(const ModelFile& mf, const RunOptions& run = {}) {
  CommandResult out;
  VerifyOptions opt = verify_options(mf, run);
  VerifierOutcome v = verify(mf.model, opt);
  out.exit_code = exit_code_for(v.status);
  if (!v.verified()) {
    out.warnings.push_back(std::string("no chart table: verification status is ") + to_string(v.status));
    return out;
  }
  ChartAnalysis ca = analyze_charts(v, run.crossing);
  out.text = emit_chart_table(ca.charts);
  return out;
}

inline VolumeConfig volume_config(const ModelFile& mf, const RunOptions& run) {
  const EstimateDefaults& cli = run.estimate;
  const EstimateDefaults& file = mf.estimate;
  auto pick = [](const auto& a, const auto& b) { return a ? a : b; };
  VolumeConfig cfg;
  if (auto box = pick(cli.box, file.box)) cfg.box = *box;
  else cfg.box = default_box(*mf.model.ring);
  const double hi = pick(cli.eps_hi, file.eps_hi).value_or(1e-2);
  const double lo = pick(cli.eps_lo, file.eps_lo).value_or(1e-5);
  cfg.eps_grid = log_grid(hi, lo, pick(cli.per_decade, file.per_decade).value_or(8));
  cfg.n_samples = pick(cli.samples, file.samples).value_or(1'000'000);
  cfg.seed = pick(cli.seed, file.seed).value_or(20240531);
  cfg.fit_multiplicity = run.fit_multiplicity;
  return cfg;
}

inline CommandResult cmd_estimate(const ModelFile& mf, const RunOptions& run = {}) {
  CommandResult out;
  VolumeConfig cfg = volume_config(mf, run);
  if (cfg.box.size() != mf.model.ring->size())
    throw Error(ErrorKind::Precondition, "box has " + std::to_string(cfg.box.size()) + " half-widths, model has " +
                                             std::to_string(mf.model.ring->size()) + " variables");
  VolumeEstimate e = estimate_lambda(mf.model, cfg);
  out.report = report_header("estimate", mf.model);
  out.report["estimate"] = volume_json(e);
  VerifierOutcome v = verify(mf.model, verify_options(mf, run));
  if (auto formula = rlct_for(v)) {
    const double target = formula->lambda.get_d();
    out.report["formula_comparison"] = {{"lambda", formula->lambda_string()},
                                        {"deviation_in_stderr", std::fabs(e.lambda_hat - target) / e.slope_stderr}};
  }
  out.text = e.csv();
  if (e.out_of_domain > 0)
    out.warnings.push_back(std::to_string(e.out_of_domain) + " of " + std::to_string(e.n_samples) +
                           " samples fell outside the valid parameter region and were counted as excluded volume");
  return out;
}

}  // namespace rlct
