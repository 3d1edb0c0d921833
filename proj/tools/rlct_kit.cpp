#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rlct/rlct.hpp"

namespace {

using namespace rlct;

bool is_model_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::ModelFile:
    case ErrorKind::InvalidModel:
    case ErrorKind::InvalidSpace:
    case ErrorKind::IncompleteMoments:
    case ErrorKind::VarMismatch:
    case ErrorKind::DegenerateTruePoint:
      return true;
    default:
      return false;
  }
}

std::vector<double> parse_doubles(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Precondition, std::string(flag) + ": not a number: '" + item + "'");
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Precondition, "cannot write '" + path + "'");
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"real log canonical thresholds at realizable points"};
  app.require_subcommand(1);
  std::string model_path, out_path, csv_path, box_text, eps_text;
  int d_theta = 0, d_tau = -1;
  bool charts = false, mt1 = false, fit_mult = false;
  std::uint64_t samples = 0, seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("model", model_path, "model file (JSON)")->required();
    sub->add_option("--out", out_path, "write the report to this file instead of standard output");
    sub->add_option("--d-theta", d_theta, "fixed theta truncation degree");
    sub->add_option("--d-tau", d_tau, "tau truncation degree");
  };
  CLI::App* verify_cmd = app.add_subcommand("verify", "check the assumptions and report (d1, d2, r, m)");
  add_common(verify_cmd);
  CLI::App* rlct_cmd = app.add_subcommand("rlct", "real log canonical threshold from the formula");
  add_common(rlct_cmd);
  rlct_cmd->add_flag("--charts", charts, "also run the blow-up charts and check agreement");
  rlct_cmd->add_flag("--mt1-check", mt1, "check the expansion of K");
  CLI::App* table_cmd = app.add_subcommand("table", "print the chart table");
  add_common(table_cmd);
  CLI::App* est_cmd = app.add_subcommand("estimate", "Monte Carlo sublevel-volume estimate of lambda");
  add_common(est_cmd);
  est_cmd->add_option("--box", box_text, "comma-separated half-widths, one per variable");
  est_cmd->add_option("--eps", eps_text, "HI,LO[,PER_DECADE] for the eps grid");
  est_cmd->add_option("--samples", samples, "number of samples");
  est_cmd->add_option("--seed", seed, "random seed");
  est_cmd->add_option("--csv", csv_path, "write (eps, volume, stderr, hits) rows to this file");
  est_cmd->add_flag("--fit-multiplicity", fit_mult, "also fit a log log term");

  CLI11_PARSE(app, argc, argv);

  try {
    ModelFile mf = load_model_file(model_path);
    RunOptions run;
    if (d_theta > 0) run.d_theta = d_theta;
    if (d_tau >= 0) run.d_tau = d_tau;
    run.charts = charts;
    run.mt1_check = mt1;
    run.fit_multiplicity = fit_mult;
    if (!box_text.empty()) run.estimate.box = parse_doubles(box_text, "--box");
    if (!eps_text.empty()) {
      auto e = parse_doubles(eps_text, "--eps");
      if (e.size() < 2 || e.size() > 3) throw Error(ErrorKind::Precondition, "--eps expects HI,LO[,PER_DECADE]");
      run.estimate.eps_hi = e[0];
      run.estimate.eps_lo = e[1];
      if (e.size() == 3) run.estimate.per_decade = static_cast<int>(e[2]);
    }
    if (samples) run.estimate.samples = samples;
    if (est_cmd->count("--seed")) run.estimate.seed = seed;

    CommandResult res;
    if (*verify_cmd) res = cmd_verify(mf, run);
    else if (*rlct_cmd) res = cmd_rlct(mf, run);
    else if (*table_cmd) res = cmd_table(mf, run);
    else res = cmd_estimate(mf, run);

    for (const auto& w : res.warnings) std::cerr << "rlct-kit: warning: " << w << "\n";
    if (*table_cmd) {
      if (out_path.empty()) std::cout << res.text;
      else write_text(out_path, res.text);
      return res.exit_code;
    }
    if (*est_cmd && !csv_path.empty()) write_text(csv_path, res.text);
    const std::string json = res.report.dump(2) + "\n";
    if (out_path.empty()) std::cout << json;
    else write_text(out_path, json);
    return res.exit_code;
  } catch (const Error& e) {
    std::cerr << "rlct-kit: error: " << e.what() << "\n";
    return is_model_error(e.kind()) ? kExitInvalidModel : kExitInapplicable;
  } catch (const std::exception& e) {
    std::cerr << "rlct-kit: error: " << e.what() << "\n";
    return kExitInapplicable;
  }
}
