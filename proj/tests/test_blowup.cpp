#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "rlct/blowup.hpp"
#include "rlct/builders.hpp"
#include "rlct/io.hpp"

using namespace rlct;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<ModelSpec> verified_models() {
  return {intro_model(),
          intro_model(true),
          binomial_mixture(default_binomial_args(2)),
          binomial_mixture(default_binomial_args(3)),
          rrr_model(),
          gaussian_mean_model(2),
          bilinear_link_model(true)};
}

}  // namespace

TEST(ChartTable, IntroMatchesGolden) {
  const std::string golden = read_file(std::string(RLCT_SOURCE_DIR) + "/tests/golden/intro_table.txt");
  ASSERT_FALSE(golden.empty());
  ModelFile mf = load_model_file(std::string(RLCT_SOURCE_DIR) + "/models/intro.json");
  ChartAnalysis ca = analyze_charts(verify(mf.model));
  EXPECT_EQ(emit_chart_table(ca.charts), golden);
  ChartAnalysis tr = analyze_charts(verify(intro_model()));
  EXPECT_EQ(emit_chart_table(tr.charts), golden);
}

TEST(ChartTable, OrderOneHasTwoRows) {
  ChartAnalysis ca = analyze_charts(verify(gaussian_mean_model(2)));
  const std::string table = emit_chart_table(ca.charts);
  EXPECT_EQ(table,
            "No. | Local Coord. | K | Jacobian | k | h | lambda\n"
            "(a) | (theta1, theta2') | theta1^2 a1(theta1, theta2') | theta1 | (2,0) | (1,0) | 1\n"
            "(b) | (theta1', theta2) | theta2^2 a2(theta1', theta2) | theta2 | (0,2) | (0,1) | 1\n");
  EXPECT_EQ(ca.result.lambda, 1);
  EXPECT_EQ(ca.result.multiplicity, 1);
}

TEST(ChartTable, EmptyListIsHeaderOnly) {
  EXPECT_EQ(emit_chart_table({}), "No. | Local Coord. | K | Jacobian | k | h | lambda\n");
}

TEST(Charts, IntroLambdaAndMultiplicity) {
  ChartAnalysis ca = analyze_charts(verify(intro_model(true)));
  EXPECT_EQ(ca.result.lambda, rational(3, 4));
  EXPECT_EQ(ca.result.multiplicity, 1);
  EXPECT_EQ(ca.result.source, RlctSource::Charts);
  EXPECT_TRUE(ca.all_crossings_passed);
  EXPECT_TRUE(ca.all_jacobians_verified);
  EXPECT_TRUE(ca.all_exclusions_empty);
}

TEST(Charts, LambdaFromChartsOnEmpty) {
  RlctResult r = lambda_from_charts({});
  EXPECT_TRUE(r.infinite);
  EXPECT_EQ(r.lambda_string(), "inf");
}

TEST(Property, ChartsAgreeWithFormula) {
  for (const ModelSpec& m : verified_models()) {
    VerifierOutcome v = verify(m);
    ASSERT_TRUE(v.verified()) << m.name;
    ChartAnalysis ca = analyze_charts(v);
    auto formula = rlct_for(v);
    ASSERT_TRUE(formula);
    EXPECT_FALSE(ca.result.infinite) << m.name;
    EXPECT_EQ(ca.result.lambda, formula->lambda) << m.name;
    EXPECT_EQ(ca.result.multiplicity, formula->multiplicity) << m.name;
    EXPECT_TRUE(ca.all_crossings_passed) << m.name;
    EXPECT_TRUE(ca.all_jacobians_verified) << m.name;
    EXPECT_TRUE(ca.all_exclusions_empty) << m.name;
  }
}

// h is the column sum of the monomial map minus one, and K pulls back to u^k times a unit
TEST(Property, ChartExponentsFromMonomialMap) {
  for (const ModelSpec& m : verified_models()) {
    ChartAnalysis ca = analyze_charts(verify(m));
    for (const Chart& c : ca.charts) {
      const std::size_t n = c.k.size();
      ASSERT_EQ(c.exponents.size(), n) << m.name << " " << c.label;
      RationalMatrix e(n, n, Rational(0));
      for (std::size_t row = 0; row < n; ++row)
        for (std::size_t l = 0; l < n; ++l) e(row, l) = c.exponents[row][l];
      EXPECT_EQ(abs(determinant(e)), 1) << m.name << " " << c.label;
      for (std::size_t l = 0; l < n; ++l) {
        int column = 0;
        for (std::size_t row = 0; row < n; ++row) column += c.exponents[row][l];
        EXPECT_EQ(c.h[l], column - 1) << m.name << " " << c.label << " var " << l;
      }
      bool leading_found = false;
      for (const auto& [mono, coef] : c.k_pullback.terms()) {
        bool exact = true;
        for (std::size_t l = 0; l < n; ++l) {
          EXPECT_GE(mono[l], c.k[l]) << m.name << " " << c.label;
          exact = exact && mono[l] == c.k[l];
        }
        for (std::size_t t = n; t < c.k_pullback.ring()->size(); ++t) exact = exact && mono[t] == 0;
        leading_found = leading_found || exact;
      }
      if (c.terminal) { EXPECT_TRUE(leading_found) << m.name << " " << c.label; }
    }
  }
}
