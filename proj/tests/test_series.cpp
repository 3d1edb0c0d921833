#include <gtest/gtest.h>

#include <random>

#include "rlct/series.hpp"

using namespace rlct;

namespace {

Ring t_ring() { return make_ring(VarSet{{"t"}, {}}); }
Ring main_ring() { return make_ring(VarSet{{"theta1", "theta2"}, {"tau"}}); }

Monomial mono(std::initializer_list<int> e) {
  Monomial m;
  std::size_t i = 0;
  for (int x : e) m[i++] = static_cast<std::uint8_t>(x);
  return m;
}

ParamSeries var(const Ring& r, const char* n, int dt = kUnbounded, int du = kUnbounded) {
  return ParamSeries::variable(r, n, dt, du);
}

ParamSeries one(const Ring& r, int dt = kUnbounded, int du = kUnbounded) {
  return ParamSeries::constant(r, Rational(1), dt, du);
}

ParamSeries random_series(const Ring& r, std::mt19937_64& gen, int dt, int du) {
  std::uniform_int_distribution<int> c(-3, 3), e(0, 2);
  ParamSeries s(r, dt, du);
  for (int k = 0; k < 4; ++k) s.add_term(mono({e(gen), e(gen), e(gen)}), Rational(c(gen)));
  return s;
}

}  // namespace

TEST(Series, DifferenceOfSquares) {
  Ring r = t_ring();
  ParamSeries t = var(r, "t", 2);
  ParamSeries p = (one(r, 2) + t) * (one(r, 2) - t);
  EXPECT_EQ(p.to_string(), "1 - t^2");
  EXPECT_EQ(p.coefficient(mono({2})), -1);
  EXPECT_EQ(p.coefficient(mono({1})), 0);
}

TEST(Series, ProductBeyondTruncationVanishes) {
  Ring r = main_ring();
  ParamSeries a = var(r, "theta1", 3);
  ParamSeries b = var(r, "theta2", 3);
  EXPECT_TRUE((a * a * b * b).is_zero());
  ParamSeries s = (a + b) * (a + b);
  EXPECT_EQ(s.coefficient(mono({1, 1, 0})), 2);
}

TEST(Series, CoefficientPastTruncationThrows) {
  Ring r = t_ring();
  ParamSeries t = var(r, "t", 2);
  try {
    t.coefficient(mono({3}));
    FAIL() << "expected OutOfTruncation";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfTruncation);
  }
}

TEST(Series, Log1pExamples) {
  Ring r = t_ring();
  ParamSeries t = var(r, "t", 3);
  ParamSeries l = log1p(t);
  EXPECT_EQ(l.coefficient(mono({1})), 1);
  EXPECT_EQ(l.coefficient(mono({2})), rational(-1, 2));
  EXPECT_EQ(l.coefficient(mono({3})), rational(1, 3));

  EXPECT_TRUE(log1p(ParamSeries(r, 3)).is_zero());

  ParamSeries t2 = var(r, "t", 2);
  ParamSeries u = -t2 + t2 * t2;
  ParamSeries lu = log1p(u);
  EXPECT_EQ(lu.coefficient(mono({1})), -1);
  EXPECT_EQ(lu.coefficient(mono({2})), rational(1, 2));
}

TEST(Series, Log1pRejectsConstant) {
  Ring r = t_ring();
  try {
    log1p(one(r, 2) + var(r, "t", 2));
    FAIL() << "expected NotNilpotent";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotNilpotent);
  }
}

TEST(Series, InvertUnitAndNonUnit) {
  Ring r = main_ring();
  ParamSeries tau = var(r, "tau", kUnbounded, 4);
  ParamSeries inv = invert(one(r, kUnbounded, 4) - Rational(2) * tau);
  for (int k = 0; k <= 4; ++k) EXPECT_EQ(inv.coefficient(mono({0, 0, k})), Rational(1 << k));
  EXPECT_THROW(invert(tau), NotAUnitError);
  try {
    invert(tau);
  } catch (const NotAUnitError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotAUnit);
    EXPECT_EQ(e.offending(), tau);
  }
  ParamSeries two = ParamSeries::constant(r, Rational(2));
  EXPECT_EQ(invert(two).constant_term(), rational(1, 2));
}

TEST(Series, SubstituteBlowUpChart) {
  Ring r = main_ring();
  ParamSeries t1 = var(r, "theta1"), t2 = var(r, "theta2");
  ParamSeries f = t1 * t1 + power(t2, 4);
  // theta2 -> theta1 theta2
  ParamSeries g = substitute(f, {{"theta2", t1 * t2}});
  EXPECT_EQ(g.coefficient(mono({2, 0, 0})), 1);
  EXPECT_EQ(g.coefficient(mono({4, 4, 0})), 1);
  EXPECT_EQ(g.size(), 2u);
}

TEST(Series, SubstituteShift) {
  Ring r = main_ring();
  ParamSeries t1 = var(r, "theta1"), t2 = var(r, "theta2"), tau = var(r, "tau");
  ParamSeries f = t1 - tau * t2;
  ParamSeries g = substitute(f, {{"theta1", t1 + tau * t2}});
  EXPECT_EQ(g, t1);
}

TEST(Series, IdentitySubstitution) {
  Ring r = main_ring();
  std::mt19937_64 gen(3);
  ParamSeries s = random_series(r, gen, 5, 5);
  EXPECT_EQ(substitute(s, r, identity_images(r)), s);
}

TEST(Series, HomogeneousPart) {
  Ring r = main_ring();
  ParamSeries t1 = var(r, "theta1"), t2 = var(r, "theta2"), tau = var(r, "tau");
  ParamSeries f = t2 * t2 * (one(r) + tau) + t1 * t2 + power(t2, 3);
  ParamSeries h = homogeneous_part(f, {1}, 2);
  EXPECT_EQ(h, t2 * t2 * (one(r) + tau));
  ParamSeries z = restrict_to_zero(f, {0});
  EXPECT_EQ(z, t2 * t2 * (one(r) + tau) + power(t2, 3));
}

TEST(Series, EvaluateRationalAndDouble) {
  Ring r = main_ring();
  ParamSeries t1 = var(r, "theta1"), tau = var(r, "tau");
  ParamSeries f = t1 * t1 - Rational(3) * tau;
  EXPECT_EQ(f.evaluate<Rational>({rational(1, 2), Rational(0), rational(1, 3)}), rational(-3, 4));
  EXPECT_DOUBLE_EQ(f.evaluate<double>({0.5, 0.0, 1.0 / 3}), 0.25 - 1.0);
}

TEST(Series, RingMismatch) {
  ParamSeries a = var(t_ring(), "t");
  ParamSeries b = var(main_ring(), "theta1");
  EXPECT_THROW(a + b, Error);
}

TEST(Property, RingLaws) {
  Ring r = main_ring();
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 100; ++trial) {
    ParamSeries a = random_series(r, gen, 4, 3), b = random_series(r, gen, 4, 3), c = random_series(r, gen, 4, 3);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a - a, ParamSeries(r, 4, 3));
  }
}

TEST(Property, InverseTimesUnitIsOne) {
  Ring r = main_ring();
  std::mt19937_64 gen(23);
  std::uniform_int_distribution<int> c(1, 5);
  for (int trial = 0; trial < 50; ++trial) {
    ParamSeries a = random_series(r, gen, 4, 3);
    a.add_term(Monomial{}, Rational(c(gen)) - a.constant_term());
    EXPECT_EQ(a * invert(a), one(r, 4, 3));
  }
}

TEST(Property, ExpOfLog) {
  Ring r = main_ring();
  std::mt19937_64 gen(29);
  for (int trial = 0; trial < 30; ++trial) {
    ParamSeries u = random_series(r, gen, 4, 3);
    u.add_term(Monomial{}, -u.constant_term());
    EXPECT_EQ(expm1(log1p(u)), u);
  }
}

TEST(Property, SubstitutionComposes) {
  Ring r = main_ring();
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 30; ++trial) {
    ParamSeries f = random_series(r, gen, 5, 3);
    ParamSeries g1 = random_series(r, gen, 5, 3), g2 = random_series(r, gen, 5, 3);
    // images keep theta valuation at least one
    g1 = var(r, "theta1", 5, 3) * g1;
    g2 = var(r, "theta2", 5, 3) * g2;
    std::vector<ParamSeries> first{var(r, "theta1", 5, 3) + g2, var(r, "theta2", 5, 3), var(r, "tau", 5, 3)};
    std::vector<ParamSeries> second{var(r, "theta1", 5, 3), var(r, "theta2", 5, 3) + g1, var(r, "tau", 5, 3)};
    std::vector<ParamSeries> composed;
    for (const auto& img : first) composed.push_back(substitute(img, r, second));
    EXPECT_TRUE(substitute(substitute(f, r, first), r, second).agrees_with(substitute(f, r, composed)));
  }
}
