#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rlct/compiled.hpp"
#include "rlct/error.hpp"
#include "rlct/matrix.hpp"
#include "rlct/model.hpp"
#include "rlct/obs_series.hpp"
#include "rlct/observable.hpp"
#include "rlct/rational.hpp"
#include "rlct/series.hpp"

namespace rlct {

// C(M,x) t^x (1-t)^(M-x)
inline ParamSeries binomial_pmf(unsigned M, unsigned x, const ParamSeries& t) {
  ParamSeries one = ParamSeries::constant(t.ring(), Rational(1), t.theta_bound(), t.tau_bound());
  return power(t, x) * power(one - t, M - x) * Rational(binomial(M, x));
}

inline std::vector<std::string> integer_outcomes(unsigned M) {
  std::vector<std::string> out;
  for (unsigned x = 0; x <= M; ++x) out.push_back(std::to_string(x));
  return out;
}

// E[v^k] for k = 0..max_order of a standard normal
inline std::vector<Rational> normal_moments(int max_order) {
  std::vector<Rational> out(max_order + 1, Rational(0));
  out[0] = 1;
  for (int k = 2; k <= max_order; k += 2) out[k] = out[k - 2] * (k - 1);
  return out;
}

// joint moments of independent variables; seqs[v][k] = E[v^k]
inline std::map<std::vector<int>, Rational> independent_moments(const std::vector<std::vector<Rational>>& seqs, int max_total) {
  std::map<std::vector<int>, Rational> out;
  std::vector<int> e(seqs.size(), 0);
  auto rec = [&](auto&& self, std::size_t v, int remaining) -> void {
    if (v == seqs.size()) {
      Rational m = 1;
      for (std::size_t i = 0; i < seqs.size(); ++i) {
        if (e[i] >= static_cast<int>(seqs[i].size()))
          throw Error(ErrorKind::IncompleteMoments, "moment of order " + std::to_string(e[i]) + " not supplied");
        m *= seqs[i][e[i]];
      }
      out[e] = m;
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      e[v] = k;
      self(self, v + 1, remaining - k);
    }
    e[v] = 0;
  };
  rec(rec, 0, max_total);
  return out;
}

inline Observable monomial_observable(const Space& s, const std::vector<int>& exps) {
  auto i = s->monomial_index(exps);
  if (!i) throw Error(ErrorKind::DegreeOverflow, "monomial outside the observable basis");
  return basis_observable(s, *i);
}

namespace detail {

inline ClosedFormK discrete_closed_form(const std::vector<ParamSeries>& pmf) {
  std::vector<CompiledPolynomial> compiled;
  std::vector<double> q;
  for (const auto& p : pmf) {
    compiled.emplace_back(p);
    q.push_back(p.constant_term().get_d());
  }
  return [compiled, q](const std::vector<double>& x) { return discrete_kl(compiled, q, x); };
}

inline std::vector<ParamSeries> two_component_mixture(const Ring& ring, const ParamSeries& w_second, const ParamSeries& w_first) {
  Rational half(1, 2);
  ParamSeries t1 = ParamSeries::variable(ring, "theta1").add_constant(half);
  ParamSeries t2 = ParamSeries::variable(ring, "theta2").add_constant(half);
  std::vector<ParamSeries> pmf;
  for (unsigned x = 0; x <= 2; ++x) pmf.push_back(w_second * binomial_pmf(2, x, t2) + w_first * binomial_pmf(2, x, t1));
  return pmf;
}

}  // namespace detail

// (tau + 1/2) Bin(2, theta2 + 1/2) + (1/2 - tau) Bin(2, theta1 + 1/2)
inline ModelSpec intro_model(bool transformed = false, int tau_bound = 4) {
  Ring ring = make_ring(VarSet{{"theta1", "theta2"}, {"tau"}});
  Rational half(1, 2);
  ParamSeries tau = ParamSeries::variable(ring, "tau");
  ParamSeries one = ParamSeries::constant(ring, Rational(1));
  auto pmf = detail::two_component_mixture(ring, tau.add_constant(half), (-tau).add_constant(half));
  ModelSpec model = discrete_model("intro", ring, integer_outcomes(2), pmf);
  model.closed_form_k = detail::discrete_closed_form(model.pmf);
  model.provenance.push_back("builder: intro");
  if (!transformed) return model;

  Ring target = renamed_ring(ring, {{"theta1", "theta1'"}});
  ParamSeries t_tau = ParamSeries::variable(target, "tau", kUnbounded, tau_bound);
  ParamSeries t_one = ParamSeries::constant(target, Rational(1), kUnbounded, tau_bound);
  ParamSeries phi = (t_one + Rational(2) * t_tau) * invert(t_one - Rational(2) * t_tau);
  ParamSeries image = ParamSeries::variable(target, "theta1'") - phi * ParamSeries::variable(target, "theta2");
  ModelSpec out = reparameterize(model, {{"theta1", image}}, {{"theta1", "theta1'"}});
  out.name = "intro_transformed";
  ClosedFormK original = model.closed_form_k;
  out.closed_form_k = [original](const std::vector<double>& x) {
    double phi = (1 + 2 * x[2]) / (1 - 2 * x[2]);
    return original({x[0] - phi * x[1], x[1], x[2]});
  };
  return out;
}

// tau Bin(2, theta2 + 1/2) + (1 - tau) Bin(2, theta1 + 1/2)
inline ModelSpec remark_model() {
  Ring ring = make_ring(VarSet{{"theta1", "theta2"}, {"tau"}});
  ParamSeries tau = ParamSeries::variable(ring, "tau");
  auto pmf = detail::two_component_mixture(ring, tau, (-tau).add_constant(Rational(1)));
  ModelSpec model = discrete_model("remark", ring, integer_outcomes(2), pmf);
  model.closed_form_k = detail::discrete_closed_form(model.pmf);
  model.provenance.push_back("builder: remark");
  return model;
}

struct BinomialMixtureArgs {
  unsigned M = 4;
  unsigned H = 3;
  unsigned H0 = 2;
  std::vector<Rational> theta_star{Rational(1, 3), Rational(2, 3)};
  std::vector<Rational> tau_star{Rational(1, 3)};
  std::vector<Rational> tau_const{Rational(1, 4)};
};

inline BinomialMixtureArgs default_binomial_args(unsigned H) {
  BinomialMixtureArgs a;
  a.H = H;
  const unsigned extra = H > a.H0 ? H - a.H0 : 0;
  a.tau_const.assign(extra, Rational(1, 4) / (extra == 0 ? 1 : static_cast<long>(extra)));
  return a;
}

// H-component Bin(M, .) mixture shifted to a non-singular realizable point of an H0-component truth
inline ModelSpec binomial_mixture(const BinomialMixtureArgs& a) {
  if (a.H < 2) throw Error(ErrorKind::Precondition, "binomial_mixture: H must be at least 2");
  if (a.H0 < 1 || a.H0 > a.H) throw Error(ErrorKind::Precondition, "binomial_mixture: need 1 <= H0 <= H");
  if (2 * a.H0 > a.M) throw Error(ErrorKind::Precondition, "binomial_mixture: need H0 <= M/2");
  if (a.theta_star.size() != a.H0) throw Error(ErrorKind::Precondition, "binomial_mixture: theta_star needs H0 entries");
  if (a.tau_star.size() != a.H0 - 1) throw Error(ErrorKind::Precondition, "binomial_mixture: tau_star needs H0-1 entries");
  if (a.tau_const.size() != a.H - a.H0) throw Error(ErrorKind::Precondition, "binomial_mixture: tau_const needs H-H0 entries");
  for (std::size_t i = 0; i < a.theta_star.size(); ++i) {
    if (a.theta_star[i] <= 0 || a.theta_star[i] >= 1)
      throw Error(ErrorKind::Precondition, "binomial_mixture: theta_star values must lie in (0,1)");
    for (std::size_t j = 0; j < i; ++j)
      if (a.theta_star[i] == a.theta_star[j]) throw Error(ErrorKind::Precondition, "binomial_mixture: theta_star values must be distinct");
  }
  Rational total = 0;
  for (const auto& t : a.tau_star) {
    if (t <= 0) throw Error(ErrorKind::Precondition, "binomial_mixture: tau_star values must be positive");
    total += t;
  }
  for (const auto& t : a.tau_const) {
    if (t <= 0) throw Error(ErrorKind::Precondition, "binomial_mixture: tau_const values must be positive");
    total += t;
  }
  if (total >= 1) throw Error(ErrorKind::Precondition, "binomial_mixture: mixing weights must sum to less than 1");

  VarSet vars;
  for (unsigned i = 1; i <= a.H; ++i) vars.theta.push_back("theta" + std::to_string(i));
  for (unsigned i = 1; i < a.H0; ++i) vars.theta.push_back("tau" + std::to_string(i));
  for (unsigned i = a.H0; i < a.H; ++i) vars.tau.push_back("tau" + std::to_string(i));
  Ring ring = make_ring(vars);
  auto var = [&](const std::string& n) { return ParamSeries::variable(ring, n); };

  std::vector<ParamSeries> weights, means;
  ParamSeries last = ParamSeries::constant(ring, Rational(1));
  for (unsigned i = 1; i < a.H0; ++i) {
    ParamSeries w = var("tau" + std::to_string(i)).add_constant(a.tau_star[i - 1]);
    weights.push_back(w);
    means.push_back(var("theta" + std::to_string(i)).add_constant(a.theta_star[i - 1]));
    last -= w;
  }
  for (unsigned i = a.H0; i < a.H; ++i) {
    ParamSeries w = var("tau" + std::to_string(i)).add_constant(a.tau_const[i - a.H0]);
    weights.push_back(w);
    means.push_back(var("theta" + std::to_string(i)).add_constant(a.theta_star[a.H0 - 1]));
    last -= w;
  }
  weights.push_back(last);
  means.push_back(var("theta" + std::to_string(a.H)).add_constant(a.theta_star[a.H0 - 1]));

  std::vector<ParamSeries> pmf;
  for (unsigned x = 0; x <= a.M; ++x) {
    ParamSeries px(ring);
    for (std::size_t k = 0; k < weights.size(); ++k) px += weights[k] * binomial_pmf(a.M, x, means[k]);
    pmf.push_back(px);
  }
  ModelSpec model = discrete_model("binomial_mixture_H" + std::to_string(a.H), ring, integer_outcomes(a.M), pmf);
  model.closed_form_k = detail::discrete_closed_form(model.pmf);
  model.declared_m = 2;
  model.provenance.push_back("builder: binomial_mixture M=" + std::to_string(a.M) + " H=" + std::to_string(a.H) +
                             " H0=" + std::to_string(a.H0));
  return model;
}

struct RrrArgs {
  unsigned H = 2;
  unsigned M = 1;
  unsigned N = 2;
  unsigned rank = 1;
  RationalMatrix alpha{2, 1, Rational(0)};
  RationalMatrix beta{2, 2, Rational(0)};
  std::vector<Rational> x_moments{Rational(1), Rational(0), Rational(1), Rational(0), Rational(3)};
  bool transformed = true;
  int theta_bound = 6;
  int tau_bound = 4;
};

inline RrrArgs default_rrr_args() {
  RrrArgs a;
  a.alpha(0, 0) = Rational(3, 5);
  a.alpha(1, 0) = Rational(-1, 5);
  a.beta(0, 0) = 2;
  a.beta(0, 1) = 1;
  a.beta(1, 0) = 1;
  a.beta(1, 1) = 3;
  return a;
}

struct RrrNormalization {
  RationalMatrix p;
  RationalMatrix q;
  RationalMatrix alpha;
  RationalMatrix beta;
};

inline RrrNormalization normalize_rrr(const RrrArgs& a) {
  if (a.H != 2 || a.M != 1 || a.N != 2 || a.rank != 1)
    throw Error(ErrorKind::Precondition, "rrr_model: only (H, M, N, rank) = (2, 1, 2, 1) is supported");
  if (a.alpha.rows() != a.H || a.alpha.cols() != a.M) throw Error(ErrorKind::Precondition, "rrr_model: alpha must be H x M");
  if (a.beta.rows() != a.N || a.beta.cols() != a.H) throw Error(ErrorKind::Precondition, "rrr_model: beta must be N x H");
  RationalMatrix t = a.beta * a.alpha;
  RankNormalForm nf = rank_normal_form(t);
  if (nf.rank != a.rank)
    throw Error(ErrorKind::Precondition, "rrr_model: rank(beta alpha) = " + std::to_string(nf.rank) + ", expected " +
                                             std::to_string(a.rank));
  RrrNormalization out{nf.p, nf.q, a.alpha * *inverse(nf.q), *inverse(nf.p) * a.beta};
  if (out.beta(0, 0) == 0) throw Error(ErrorKind::Precondition, "rrr_model: beta'11 is zero after normalization");
  if (out.alpha(0, 0) == 0) throw Error(ErrorKind::Precondition, "rrr_model: alpha'11 is zero after normalization");
  return out;
}

// reduced rank regression f = |Sx|^2/2 - z^T S x at (A, B) = (alpha, beta)
inline ModelSpec rrr_model(const RrrArgs& a = default_rrr_args()) {
  RrrNormalization nz = normalize_rrr(a);
  if (a.x_moments.size() < 5) throw Error(ErrorKind::IncompleteMoments, "rrr_model: x moments up to order 4 are required");
  Space space = ObservableSpace::moment({"z1", "z2", "x1"}, 2, independent_moments({normal_moments(4), normal_moments(4), a.x_moments}, 4));
  Ring ring = make_ring(VarSet{{"a11", "b21"}, {"a21", "b11", "b12", "b22"}});
  auto var = [&](const std::string& n) { return ParamSeries::variable(ring, n); };
  const RationalMatrix& al = nz.alpha;
  const RationalMatrix& be = nz.beta;
  ParamSeries A1 = var("a11").add_constant(al(0, 0)), A2 = var("a21").add_constant(al(1, 0));
  ParamSeries B11 = var("b11").add_constant(be(0, 0)), B12 = var("b12").add_constant(be(0, 1));
  ParamSeries B21 = var("b21").add_constant(be(1, 0)), B22 = var("b22").add_constant(be(1, 1));
  std::vector<ParamSeries> sp{(B11 * A1 + B12 * A2).add_constant(Rational(-1)), B21 * A1 + B22 * A2};
  const Rational q = nz.q(0, 0);
  std::vector<ParamSeries> s(2, ParamSeries(ring));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) s[i] += sp[j] * (nz.p(i, j) * q);

  Observable xx = monomial_observable(space, {0, 0, 2});
  std::vector<Observable> zx{monomial_observable(space, {1, 0, 1}), monomial_observable(space, {0, 1, 1})};
  ObsSeries f(space, ring);
  for (std::size_t i = 0; i < 2; ++i) {
    f += ObsSeries::from(xx, s[i] * s[i] * Rational(1, 2));
    f -= ObsSeries::from(zx[i], s[i]);
  }
  ModelSpec model = observable_model("rrr", f);
  model.provenance.push_back("builder: rrr (H,M,N,rank)=(2,1,2,1)");

  const double ex2 = a.x_moments[2].get_d();
  const double pd[2][2] = {{nz.p(0, 0).get_d(), nz.p(0, 1).get_d()}, {nz.p(1, 0).get_d(), nz.p(1, 1).get_d()}};
  const double qd = q.get_d();
  const double a11 = al(0, 0).get_d(), a21 = al(1, 0).get_d();
  const double b11 = be(0, 0).get_d(), b12 = be(0, 1).get_d(), b21 = be(1, 0).get_d(), b22 = be(1, 1).get_d();
  auto k_of_s = [pd, qd, ex2](double s1, double s2) {
    double u = qd * (pd[0][0] * s1 + pd[0][1] * s2), v = qd * (pd[1][0] * s1 + pd[1][1] * s2);
    return 0.5 * ex2 * (u * u + v * v);
  };
  if (!a.transformed) {
    model.closed_form_k = [=](const std::vector<double>& x) {
      // x = (a11, b21, a21, b11, b12, b22)
      double A1v = x[0] + a11, A2v = x[2] + a21;
      double s1 = (x[3] + b11) * A1v + (x[4] + b12) * A2v - 1, s2 = (x[1] + b21) * A1v + (x[5] + b22) * A2v;
      return k_of_s(s1, s2);
    };
    return model;
  }

  Ring target = renamed_ring(ring, {{"a11", "a11'"}, {"b21", "b21'"}});
  const int dt = a.theta_bound, du = a.tau_bound;
  auto tv = [&](const std::string& n) { return ParamSeries::variable(target, n, dt, du); };
  ParamSeries tB11 = tv("b11").add_constant(be(0, 0)), tB12 = tv("b12").add_constant(be(0, 1));
  ParamSeries tB22 = tv("b22").add_constant(be(1, 1)), tA2 = tv("a21").add_constant(al(1, 0));
  ParamSeries inv_b11 = invert(tB11);
  ParamSeries g = ((tB12 * tA2).add_constant(Rational(-1)) * inv_b11).add_constant(al(0, 0));
  ParamSeries d = (tB11 * tv("a11'") - tB12 * tv("a21") - tv("b12") * al(1, 0)).add_constant(be(0, 0) * al(0, 0));
  ParamSeries h = (tB11 * tB22 * tA2 * invert(d)).add_constant(be(1, 0));
  std::map<std::string, ParamSeries> images{{"a11", tv("a11'") - g}, {"b21", tv("b21'") - h}};
  ModelSpec out = reparameterize(model, images, {{"a11", "a11'"}, {"b21", "b21'"}});
  out.closed_form_k = [=](const std::vector<double>& x) {
    // x = (a11', b21', a21, b11, b12, b22); S' in the factorized form
    double B11v = x[3] + b11;
    double dv = B11v * x[0] - (x[4] + b12) * x[2] - x[4] * a21 + b11 * a11;
    return k_of_s(B11v * x[0], x[1] * dv / B11v);
  };
  return out;
}

// f = sum_k (g_k^2 / 2 - z_k g_k) with independent standard normal z_k
inline ModelSpec gaussian_regression_model(std::string name, const Ring& ring, const std::vector<ParamSeries>& g) {
  if (g.empty()) throw Error(ErrorKind::InvalidModel, "gaussian_regression_model needs at least one regression function");
  std::vector<std::string> zs;
  for (std::size_t k = 0; k < g.size(); ++k) zs.push_back("z" + std::to_string(k + 1));
  Space space = ObservableSpace::moment(zs, 1, independent_moments(std::vector<std::vector<Rational>>(g.size(), normal_moments(2)), 2));
  ObsSeries f(space, ring);
  Observable one = one_observable(space);
  for (std::size_t k = 0; k < g.size(); ++k) {
    std::vector<int> e(g.size(), 0);
    e[k] = 1;
    f += ObsSeries::from(one, g[k] * g[k] * Rational(1, 2));
    f -= ObsSeries::from(monomial_observable(space, e), g[k]);
  }
  ModelSpec model = observable_model(std::move(name), f);
  model.provenance.push_back("builder: gaussian_regression");
  return model;
}

// regular location model: g_k = theta_k
inline ModelSpec gaussian_mean_model(std::size_t d) {
  VarSet vars;
  for (std::size_t k = 1; k <= d; ++k) vars.theta.push_back("theta" + std::to_string(k));
  Ring ring = make_ring(vars);
  std::vector<ParamSeries> g;
  for (std::size_t k = 0; k < d; ++k) g.push_back(ParamSeries::variable(ring, k));
  return gaussian_regression_model("gaussian_mean_" + std::to_string(d), ring, g);
}

// p(1) = (a+1)(b+1)/2; the transformed chart uses a~ = a + b/(1+b)
inline ModelSpec bilinear_link_model(bool transformed = true, int tau_bound = 4) {
  Ring ring = make_ring(VarSet{{"a"}, {"b"}});
  ParamSeries p1 = ParamSeries::variable(ring, "a").add_constant(Rational(1)) *
                   ParamSeries::variable(ring, "b").add_constant(Rational(1)) * Rational(1, 2);
  ParamSeries p0 = ParamSeries::constant(ring, Rational(1)) - p1;
  ModelSpec model = discrete_model("bilinear_link", ring, {"0", "1"}, {p0, p1});
  model.closed_form_k = detail::discrete_closed_form(model.pmf);
  model.provenance.push_back("builder: bilinear_link");
  if (!transformed) return model;
  Ring target = renamed_ring(ring, {{"a", "a~"}});
  ParamSeries b = ParamSeries::variable(target, "b", kUnbounded, tau_bound);
  ParamSeries ratio = b * invert(b.add_constant(Rational(1)));
  ModelSpec out = reparameterize(model, {{"a", ParamSeries::variable(target, "a~") - ratio}}, {{"a", "a~"}});
  out.name = "bilinear_link_transformed";
  ClosedFormK original = model.closed_form_k;
  out.closed_form_k = [original](const std::vector<double>& x) { return original({x[0] - x[1] / (1 + x[1]), x[1]}); };
  return out;
}

}  // namespace rlct
