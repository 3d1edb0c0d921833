#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rlct/report.hpp"

using namespace rlct;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  fs::path d = fs::temp_directory_path() / ("rlct_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

Invocation run(const std::string& args) {
  const fs::path err = scratch_dir() / "stderr.txt";
  const std::string cmd = std::string(RLCT_KIT_PATH) + " " + args + " 2>" + err.string();
  Invocation r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_file(err);
  return r;
}

std::string model(const char* name) { return std::string(RLCT_SOURCE_DIR) + "/models/" + name; }

fs::path write_temp(const std::string& name, const std::string& text) {
  fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, VerifyIntroExitsZero) {
  Invocation r = run("verify " + model("intro.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["tool"]["name"], "rlct-kit");
  EXPECT_EQ(j["verifier"]["status"], "Verified");
  EXPECT_EQ(j["verifier"]["r"], 1);
  EXPECT_EQ(j["verifier"]["m"], 2);
  EXPECT_EQ(j["realizability"]["realizable_by_theta_zero"], true);
}

TEST(Cli, RemarkIsInapplicable) {
  Invocation r = run("verify " + model("remark.json"));
  EXPECT_EQ(r.code, 2);
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["verifier"]["status"], "InapplicableConditionThreeI");
  Invocation t = run("table " + model("remark.json"));
  EXPECT_EQ(t.code, 2);
  EXPECT_TRUE(t.out.empty());
  EXPECT_NE(t.err.find("warning"), std::string::npos);
}

TEST(Cli, MalformedModelExitsThree) {
  fs::path bad = write_temp("bad.json", "{\"format_version\": 1, \"name\": \"x\", \"kind\": \"discrete\"}");
  Invocation r = run("verify " + bad.string());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("field 'vars'"), std::string::npos) << r.err;
  fs::path not_json = write_temp("not.json", "{ nope");
  EXPECT_EQ(run("verify " + not_json.string()).code, 3);
  EXPECT_EQ(run("verify " + (scratch_dir() / "missing.json").string()).code, 3);
  fs::path unbalanced = write_temp(
      "sum.json",
      "{\"format_version\": 1, \"name\": \"x\", \"kind\": \"discrete\", \"vars\": {\"theta\": [\"a\"]},"
      " \"outcomes\": [\"0\", \"1\"], \"pmf\": [{\"outcome\": \"0\", \"polynomial\": [[[0], \"1/2\"]]},"
      " {\"outcome\": \"1\", \"polynomial\": [[[0], \"1/3\"]]}]}");
  EXPECT_EQ(run("verify " + unbalanced.string()).code, 3);
}

TEST(Cli, RlctWithChartsAndMainTheoremCheck) {
  Invocation r = run("rlct --charts --mt1-check " + model("intro.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["rlct"]["formula"]["lambda"], "3/4");
  EXPECT_EQ(j["rlct"]["charts"]["lambda"], "3/4");
  EXPECT_EQ(j["rlct"]["agreement"]["agree"], true);
  EXPECT_EQ(j["rlct"]["upper_bound_d1_over_2"], "1");
  EXPECT_EQ(j["main_theorem_1"]["passed"], true);
  EXPECT_EQ(j["charts"].size(), 4u);
}

TEST(Cli, TableMatchesGolden) {
  Invocation r = run("table " + model("intro.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, read_file(std::string(RLCT_SOURCE_DIR) + "/tests/golden/intro_table.txt"));
  fs::path out = scratch_dir() / "table.txt";
  EXPECT_EQ(run("table " + model("intro.json") + " --out " + out.string()).code, 0);
  EXPECT_EQ(read_file(out), r.out);
}

TEST(Cli, EstimateIsByteIdenticalForFixedSeed) {
  const std::string args = "estimate " + model("gaussian_mean_2.json") + " --samples 200000 --eps 1e-2,1e-4 --seed 5";
  fs::path csv1 = scratch_dir() / "a.csv", csv2 = scratch_dir() / "b.csv";
  Invocation a = run(args + " --csv " + csv1.string());
  Invocation b = run(args + " --csv " + csv2.string());
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(read_file(csv1), read_file(csv2));
  EXPECT_FALSE(read_file(csv1).empty());
  Json j = Json::parse(a.out);
  EXPECT_EQ(j["estimate"]["seed"], 5);
  EXPECT_EQ(j["estimate"]["n_samples"], 200000);
  EXPECT_EQ(j["formula_comparison"]["lambda"], "1");
  Invocation c = run("estimate " + model("gaussian_mean_2.json") + " --samples 200000 --eps 1e-2,1e-4 --seed 6");
  EXPECT_NE(c.out, a.out);
}

TEST(Cli, EstimateRejectsWrongBox) {
  Invocation r = run("estimate " + model("gaussian_mean_2.json") + " --box 0.1 --samples 1000");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("box"), std::string::npos);
}

TEST(Cli, RoundTripGivesIdenticalReport) {
  for (const char* name : {"intro.json", "binomial_h2.json", "rrr.json", "gaussian_mean_2.json", "remark.json"}) {
    ModelFile mf = load_model_file(model(name));
    fs::path copy = write_temp(std::string("copy_") + name, model_to_json(mf).dump(2));
    Invocation a = run("verify " + model(name));
    Invocation b = run("verify " + copy.string());
    EXPECT_EQ(a.code, b.code) << name;
    EXPECT_EQ(a.out, b.out) << name;
  }
}

TEST(Cli, UnknownSubcommandFails) {
  EXPECT_NE(run("frobnicate").code, 0);
  EXPECT_NE(run("").code, 0);
}

TEST(Cli, TruncationOverride) {
  Invocation r = run("verify --d-theta 6 --d-tau 3 " + model("intro.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["verifier"]["truncation_used"]["d_theta"], 6);
  EXPECT_EQ(j["verifier"]["truncation_used"]["d_tau"], 3);
}

TEST(ExitCodes, StatusMapping) {
  EXPECT_EQ(exit_code_for(VerifierStatus::Verified), 0);
  EXPECT_EQ(exit_code_for(VerifierStatus::TruncationExhausted), 4);
  EXPECT_EQ(exit_code_for(VerifierStatus::InapplicableConditionThreeI), 2);
  EXPECT_EQ(exit_code_for(VerifierStatus::NotRealizable), 2);
}
