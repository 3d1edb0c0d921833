#include <gtest/gtest.h>

#include "rlct/builders.hpp"
#include "rlct/rlct_core.hpp"
#include "rlct/verifier.hpp"

using namespace rlct;

TEST(Formula, Examples) {
  EXPECT_EQ(rlct_formula(2, 1, 2).lambda, rational(3, 4));
  EXPECT_EQ(rlct_formula(3, 3, 2).lambda, rational(3, 2));
  EXPECT_EQ(rlct_formula(4, 3, 2).lambda, rational(7, 4));
  EXPECT_EQ(rlct_formula(2, 2, 1).lambda, 1);
  EXPECT_EQ(rlct_formula(1, 1, 1).lambda, rational(1, 2));
  EXPECT_EQ(rlct_formula(5, 2, 3).lambda, rational(3, 2));
  EXPECT_EQ(rlct_formula(2, 1, 2).multiplicity, 1);
  EXPECT_EQ(rlct_formula(2, 1, 2).lambda_string(), "3/4");
}

TEST(Formula, Preconditions) {
  EXPECT_THROW(rlct_formula(0, 1, 1), Error);
  EXPECT_THROW(rlct_formula(2, 0, 2), Error);
  EXPECT_THROW(rlct_formula(2, 3, 2), Error);
  EXPECT_THROW(rlct_formula(2, 1, 0), Error);
  EXPECT_THROW(rlct_formula(2, 1, 1), Error);
  EXPECT_THROW(upper_bound(0), Error);
  EXPECT_EQ(upper_bound(3), rational(3, 2));
}

TEST(Formula, FromVerifierOutcome) {
  auto lam = rlct_for(verify(intro_model()));
  ASSERT_TRUE(lam);
  EXPECT_EQ(lam->lambda, rational(3, 4));
  EXPECT_EQ(lam->kind, RlctKind::ExactAtPoint);
  EXPECT_FALSE(rlct_for(verify(remark_model())));
}

// lambda <= d1/2, with equality exactly when m = 1 or r = d1
TEST(Property, BoundedByHalfDimension) {
  int cases = 0;
  for (long d1 = 1; d1 <= 10; ++d1)
    for (long r = 1; r <= d1; ++r)
      for (long m = 1; m <= 8; ++m) {
        if (m == 1 && r != d1) continue;
        Rational lam = rlct_formula(d1, r, m).lambda;
        EXPECT_LE(lam, upper_bound(d1));
        EXPECT_GT(lam, 0);
        EXPECT_EQ(lam == upper_bound(d1), m == 1 || r == d1) << d1 << " " << r << " " << m;
        ++cases;
      }
  EXPECT_GT(cases, 300);
}

TEST(MainTheorem1, HoldsForVerifiedBuilders) {
  for (const ModelSpec& m : {intro_model(), intro_model(true), binomial_mixture(default_binomial_args(2)),
                             binomial_mixture(default_binomial_args(3)), rrr_model(), gaussian_mean_model(2),
                             bilinear_link_model(true)}) {
    VerifierOutcome v = verify(m);
    ASSERT_TRUE(v.verified()) << m.name;
    MainTheorem1Report r = maintheorem1_check(v);
    EXPECT_TRUE(r.passed) << m.name << ": " << ::testing::PrintToString(r.violations);
    EXPECT_GT(r.checked_terms, 0u) << m.name;
  }
}

TEST(MainTheorem1, IntroHalfSquare) {
  VerifierOutcome v = verify(intro_model(true));
  MainTheorem1Report r = maintheorem1_check(v);
  Monomial t1sq, t2four;
  t1sq[0] = 2;
  t2four[1] = 4;
  // (1 - 2 tau)^2 theta1^2 + 8 (1 + 2 tau)^2 / (1 - 2 tau)^2 theta2^4
  EXPECT_EQ(r.half_square.coefficient(t1sq), 1);
  EXPECT_EQ(r.half_square.coefficient(t2four), 8);
  t1sq[2] = 1;
  t2four[2] = 1;
  EXPECT_EQ(r.half_square.coefficient(t1sq), -4);
  EXPECT_EQ(r.half_square.coefficient(t2four), 64);
}

TEST(MainTheorem1, RejectsUnverified) { EXPECT_THROW(maintheorem1_check(verify(remark_model())), Error); }

// for m = 1 the quadratic part of K is half the Gram form of the first derivatives at tau = 0
TEST(MainTheorem1, OrderOneIsHalfGram) {
  for (const ModelSpec& m : {gaussian_mean_model(2), rrr_model(), bilinear_link_model(true)}) {
    VerifierOutcome v = verify(m);
    ASSERT_EQ(v.m, 1) << m.name;
    const ObsSeries& f = *v.f_normalized;
    const Ring& ring = f.ring();
    std::vector<Observable> d;
    for (std::size_t i = 0; i < ring->d1(); ++i) {
      Monomial e;
      e[i] = 1;
      d.push_back(f.coefficient(e));
    }
    RationalMatrix g = gram(f.space(), d);
    ParamSeries k = expectation(f);
    for (std::size_t i = 0; i < ring->d1(); ++i)
      for (std::size_t j = i; j < ring->d1(); ++j) {
        Monomial e;
        e[i] += 1;
        e[j] += 1;
        EXPECT_EQ(k.coefficient(e), i == j ? g(i, i) / 2 : g(i, j)) << m.name << " " << i << j;
      }
  }
}

TEST(Independence, DistinctCentres) {
  IndependenceReport r = binomial_family_independence(4, {rational(1, 4), rational(3, 4)});
  EXPECT_TRUE(r.independent);
  EXPECT_EQ(r.rank, 5u);
  EXPECT_FALSE(r.out_of_lemma_scope);
  EXPECT_NE(r.w_determinant, 0);
}

TEST(Independence, EqualCentresAreSingular) {
  IndependenceReport r = binomial_family_independence(4, {rational(1, 3), rational(1, 3)});
  EXPECT_FALSE(r.independent);
  EXPECT_EQ(r.w_determinant, 0);
  EXPECT_TRUE(binomial_family_independence(3, {rational(1, 3), rational(2, 3)}).out_of_lemma_scope);
}

TEST(Independence, WDeterminantProportionalToProduct) {
  const std::vector<Rational> base{rational(1, 5), rational(3, 5)};
  const Rational c = determinant(lemma_w_matrix(base)) / lemma_w_product(base);
  EXPECT_NE(c, 0);
  for (long a = 1; a <= 9; ++a)
    for (long b = 1; b <= 9; ++b) {
      if (a == b) continue;
      std::vector<Rational> t{rational(a, 10), rational(b, 10)};
      EXPECT_EQ(determinant(lemma_w_matrix(t)), c * lemma_w_product(t)) << a << "," << b;
    }
}

TEST(Independence, ThreeCentres) {
  std::vector<Rational> t{rational(1, 7), rational(3, 7), rational(5, 7)};
  IndependenceReport r = binomial_family_independence(6, t);
  EXPECT_TRUE(r.independent);
  const std::vector<Rational> base{rational(1, 5), rational(2, 5), rational(4, 5)};
  const Rational c = determinant(lemma_w_matrix(base)) / lemma_w_product(base);
  EXPECT_EQ(determinant(lemma_w_matrix(t)), c * lemma_w_product(t));
}
