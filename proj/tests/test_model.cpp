#include <gtest/gtest.h>

#include <cmath>

#include "rlct/builders.hpp"
#include "rlct/io.hpp"
#include "rlct/model.hpp"

using namespace rlct;

namespace {

Monomial mono(std::initializer_list<int> e) {
  Monomial m;
  std::size_t i = 0;
  for (int x : e) m[i++] = static_cast<std::uint8_t>(x);
  return m;
}

// tau-coefficients of a series in the last variable, lowest first
std::vector<Rational> tau_coefficients(const ParamSeries& s, Monomial theta_part, std::size_t tau_index, int upto) {
  std::vector<Rational> out;
  for (int k = 0; k <= upto; ++k) {
    Monomial m = theta_part;
    m[tau_index] = static_cast<std::uint8_t>(k);
    out.push_back(s.coefficient(m));
  }
  return out;
}

// power-series coefficients of a polynomial in tau, up to tau^n
std::vector<Rational> poly(std::vector<long> c, int n) {
  std::vector<Rational> out(n + 1, Rational(0));
  for (std::size_t k = 0; k < c.size() && static_cast<int>(k) <= n; ++k) out[k] = c[k];
  return out;
}

std::vector<Rational> mul(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  std::vector<Rational> out(a.size(), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// 1/(1 - 2 tau) = sum (2 tau)^k
std::vector<Rational> geometric_2tau(int n) {
  std::vector<Rational> out;
  for (int k = 0; k <= n; ++k) out.push_back(Rational(1L << k));
  return out;
}

double kl(const std::vector<double>& q, const std::vector<double>& p) {
  double s = 0;
  for (std::size_t x = 0; x < q.size(); ++x) s += q[x] * std::log(q[x] / p[x]);
  return s;
}

std::vector<double> bin2(double t) { return {(1 - t) * (1 - t), 2 * t * (1 - t), t * t}; }

}  // namespace

TEST(IntroModel, FirstDerivativesAtOrigin) {
  ModelSpec m = intro_model();
  ObsSeries f = build_f_series(m, 3, 2);
  const Space& s = f.space();
  Observable d1 = f.coefficient(mono({1, 0, 0}));
  Observable d2 = f.coefficient(mono({0, 1, 0}));
  Observable dt = f.coefficient(mono({0, 0, 1}));
  // 2 - 2x on outcomes 0, 1, 2
  EXPECT_EQ(d1, observable(s, {Rational(2), Rational(0), Rational(-2)}));
  EXPECT_EQ(d2, d1);
  EXPECT_TRUE(is_as_zero(s, dt));
}

TEST(IntroModel, FixedTauDerivatives) {
  ModelSpec m = intro_model();
  ObsSeries f = build_f_series(m, 3, 3);
  // d f / d theta1 = 2 (1 - 2 tau)(1 - x), d f / d theta2 = 2 (1 + 2 tau)(1 - x)
  for (std::size_t x = 0; x < 3; ++x) {
    Rational base = 2 * (1 - Rational(static_cast<long>(x)));
    EXPECT_EQ(tau_coefficients(f.component(x), mono({1, 0, 0}), 2, 3), mul(poly({1, -2}, 3), poly({base.get_num().get_si()}, 3)));
    EXPECT_EQ(tau_coefficients(f.component(x), mono({0, 1, 0}), 2, 3), mul(poly({1, 2}, 3), poly({base.get_num().get_si()}, 3)));
  }
}

TEST(IntroModel, TransformedSecondOrderAtTauZero) {
  ModelSpec m = intro_model(true);
  ObsSeries f = build_f_series(m, 3, 2);
  const Space& s = f.space();
  EXPECT_TRUE(is_as_zero(s, f.coefficient(mono({0, 1, 0}))));
  // F2 at tau = 0 is -4 (1 - 4x + 2x^2) theta2^2
  Observable f2 = f.coefficient(mono({0, 2, 0}));
  EXPECT_EQ(f2, observable(s, {Rational(-4), Rational(4), Rational(-4)}));
  EXPECT_EQ(f.coefficient(mono({1, 0, 0})), observable(s, {Rational(2), Rational(0), Rational(-2)}));
}

TEST(IntroModel, KExpansionMatchesPaper) {
  ModelSpec m = intro_model(true);
  ParamSeries k = build_K_series(m, 4, 4);
  const int n = 4;
  auto g = geometric_2tau(n);
  EXPECT_EQ(tau_coefficients(k, mono({2, 0, 0}), 2, n), poly({1, -4, 4}, n));
  EXPECT_EQ(tau_coefficients(k, mono({4, 0, 0}), 2, n), poly({0, 0, 8, -32, 32}, n));
  EXPECT_EQ(tau_coefficients(k, mono({3, 1, 0}), 2, n), poly({0, -16, 0, 64}, n));
  EXPECT_EQ(tau_coefficients(k, mono({2, 2, 0}), 2, n), poly({8, 48, 64}, n));
  // 8 (1 + 2 tau)^2 / (1 - 2 tau)^2 and -16 (1 + 2 tau)^2 / (1 - 2 tau)
  EXPECT_EQ(tau_coefficients(k, mono({0, 4, 0}), 2, n), mul(mul(poly({8, 32, 32}, n), g), g));
  EXPECT_EQ(tau_coefficients(k, mono({1, 3, 0}), 2, n), mul(poly({-16, -64, -64}, n), g));
  // no other terms of theta-degree at most 4
  for (const auto& [mono_, c] : k.terms()) {
    int td = mono_[0] + mono_[1];
    EXPECT_TRUE(td == 2 || td == 4) << k.monomial_string(mono_);
    if (td == 2) { EXPECT_EQ(mono_[0], 2); }
  }
}

TEST(IntroModel, KAtPointAgainstDirectKl) {
  ModelSpec m = intro_model();
  std::vector<double> q = bin2(0.5);
  auto p_at = [](double t1, double t2, double tau) {
    auto a = bin2(t2 + 0.5), b = bin2(t1 + 0.5);
    return std::vector<double>{(tau + 0.5) * a[0] + (0.5 - tau) * b[0], (tau + 0.5) * a[1] + (0.5 - tau) * b[1],
                               (tau + 0.5) * a[2] + (0.5 - tau) * b[2]};
  };
  const double expected = kl(q, p_at(0.1, 0, 0));
  EXPECT_NEAR(m.closed_form_k({0.1, 0.0, 0.0}), expected, 1e-15);
  // frozen from the direct evaluation above
  EXPECT_NEAR(expected, 0.0100013737, 1e-9);
  ParamSeries k = build_K_series(m, 10, 2);
  EXPECT_NEAR(k.evaluate<double>({0.1, 0.0, 0.0}), expected, 1e-9);
  for (const auto& pt : std::vector<std::vector<double>>{{0.05, -0.03, 0.1}, {-0.1, 0.08, -0.2}})
    EXPECT_NEAR(m.closed_form_k(pt), kl(q, p_at(pt[0], pt[1], pt[2])), 1e-15);
}

TEST(RemarkModel, SecondParameterCoefficient) {
  ModelSpec m = remark_model();
  ObsSeries f = build_f_series(m, 3, 3);
  const Space& s = f.space();
  // 4 tau (1 - x)
  EXPECT_TRUE(is_as_zero(s, f.coefficient(mono({0, 1, 0}))));
  EXPECT_EQ(f.coefficient(mono({0, 1, 1})), observable(s, {Rational(4), Rational(0), Rational(-4)}));
  EXPECT_TRUE(is_as_zero(s, f.coefficient(mono({0, 1, 2}))));
}

TEST(Realizability, ShippedBuilders) {
  EXPECT_TRUE(check_realizable_by_theta(intro_model()).holds);
  EXPECT_TRUE(check_realizable_by_theta(intro_model(true)).holds);
  EXPECT_TRUE(check_realizable_by_theta(remark_model()).holds);
  EXPECT_TRUE(check_realizable_by_theta(binomial_mixture(default_binomial_args(2))).holds);
  EXPECT_TRUE(check_realizable_by_theta(rrr_model()).holds);
  EXPECT_TRUE(check_realizable_by_theta(gaussian_mean_model(2)).holds);
  EXPECT_TRUE(check_realizable_by_theta(bilinear_link_model(true)).holds);
}

TEST(Realizability, BilinearUntransformedFails) {
  RealizabilityReport r = check_realizable_by_theta(bilinear_link_model(false));
  EXPECT_FALSE(r.holds);
  EXPECT_FALSE(r.witness.empty());
}

TEST(Realizability, RrrUntransformedFails) {
  auto a = default_rrr_args();
  a.transformed = false;
  EXPECT_FALSE(check_realizable_by_theta(rrr_model(a)).holds);
}

TEST(RrrModel, SeriesAgreesWithFactorizedForm) {
  ModelSpec m = rrr_model();
  EXPECT_EQ(m.d1(), 2u);
  EXPECT_EQ(m.d2(), 4u);
  ParamSeries k = build_K_series(m, 6, 4);
  for (double h : {1e-2, 3e-3}) {
    std::vector<double> pt{h, -0.7 * h, 0.5 * h, -0.3 * h, 0.9 * h, 0.2 * h};
    const double exact = m.closed_form_k(pt);
    EXPECT_NEAR(k.evaluate<double>(pt), exact, 1e-3 * exact + 1e-15);
  }
}

TEST(GaussianModel, QuadraticK) {
  ModelSpec m = gaussian_mean_model(2);
  ParamSeries k = build_K_series(m, 4, 0);
  EXPECT_EQ(k.coefficient(mono({2, 0})), rational(1, 2));
  EXPECT_EQ(k.coefficient(mono({0, 2})), rational(1, 2));
  EXPECT_EQ(k.coefficient(mono({1, 1})), 0);
  EXPECT_EQ(k.size(), 2u);
}

TEST(DiscreteModel, RejectsPmfNotSummingToOne) {
  Ring r = make_ring(VarSet{{"a"}, {}});
  ParamSeries half = ParamSeries::constant(r, rational(1, 2));
  EXPECT_THROW(discrete_model("bad", r, {"0", "1"}, {half, half + ParamSeries::variable(r, "a")}), Error);
  EXPECT_THROW(discrete_model("bad", r, {"0"}, {half, half}), Error);
}

TEST(DiscreteModel, DegenerateTruePoint) {
  Ring r = make_ring(VarSet{{"a"}, {}});
  ParamSeries a = ParamSeries::variable(r, "a");
  ModelSpec m = discrete_model("edge", r, {"0", "1"}, {a, ParamSeries::constant(r, Rational(1)) - a});
  try {
    model_space(m);
    FAIL() << "expected DegenerateTruePoint";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateTruePoint);
  }
}

TEST(BinomialMixture, PreconditionChecks) {
  auto a = default_binomial_args(2);
  a.H0 = 3;
  EXPECT_THROW(binomial_mixture(a), Error);
  EXPECT_THROW(binomial_mixture(default_binomial_args(1)), Error);
}

TEST(ModelFile, RoundTripExplicitForm) {
  for (const char* name : {"intro.json", "remark.json", "gaussian_mean_2.json", "binomial_h2.json", "rrr.json"}) {
    ModelFile mf = load_model_file(std::string(RLCT_SOURCE_DIR) + "/models/" + name);
    ModelFile back = parse_model_file(model_to_json(mf));
    EXPECT_EQ(back.model.name, mf.model.name) << name;
    EXPECT_EQ(back.model.vars(), mf.model.vars()) << name;
    ParamSeries k1 = build_K_series(mf.model, 4, 2), k2 = build_K_series(back.model, 4, 2);
    EXPECT_TRUE(k1.agrees_with(k2)) << name;
  }
}

TEST(ModelFile, ExplicitIntroMatchesBuilder) {
  ModelFile mf = load_model_file(std::string(RLCT_SOURCE_DIR) + "/models/intro.json");
  EXPECT_TRUE(build_K_series(mf.model, 4, 3).agrees_with(build_K_series(intro_model(), 4, 3)));
}

TEST(ModelFile, FieldAddressedErrors) {
  auto message = [](const std::string& text) {
    try {
      parse_model_text(text);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ModelFile);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("{\"format_version\": 2}").find("format_version"), std::string::npos);
  EXPECT_NE(message("{\"format_version\": 1, \"name\": \"x\", \"kind\": \"other\", \"vars\": {\"theta\": [\"a\"]}}").find("kind"),
            std::string::npos);
  EXPECT_NE(message("{\"format_version\": 1, \"builder\": \"nope\"}").find("builder"), std::string::npos);
  const std::string bad_pmf =
      "{\"format_version\": 1, \"name\": \"x\", \"kind\": \"discrete\", \"vars\": {\"theta\": [\"a\"]},"
      " \"outcomes\": [\"0\", \"1\"], \"pmf\": [{\"outcome\": \"0\", \"polynomial\": [[[0], \"1/2\"]]}]}";
  EXPECT_NE(message(bad_pmf).find("pmf"), std::string::npos);
}
