#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rlct/error.hpp"
#include "rlct/matrix.hpp"
#include "rlct/model.hpp"
#include "rlct/obs_series.hpp"
#include "rlct/observable.hpp"
#include "rlct/series.hpp"
#include "rlct/upoly.hpp"

namespace rlct {

enum class VerifierStatus {
  Verified,
  NotRealizable,
  DegenerateRank,
  InapplicableNonUnit,
  InapplicableConditionThreeI,
  InapplicableConditionThree,
  MixedDirections,
  UndeterminedPositivity,
  TruncationExhausted,
};

inline const char* to_string(VerifierStatus s) {
  switch (s) {
    case VerifierStatus::Verified: return "Verified";
    case VerifierStatus::NotRealizable: return "NotRealizable";
    case VerifierStatus::DegenerateRank: return "DegenerateRank";
    case VerifierStatus::InapplicableNonUnit: return "InapplicableNonUnit";
    case VerifierStatus::InapplicableConditionThreeI: return "InapplicableConditionThreeI";
    case VerifierStatus::InapplicableConditionThree: return "InapplicableConditionThree";
    case VerifierStatus::MixedDirections: return "MixedDirections";
    case VerifierStatus::UndeterminedPositivity: return "UndeterminedPositivity";
    case VerifierStatus::TruncationExhausted: return "TruncationExhausted";
  }
  return "Unknown";
}

enum class Classification { NotApplicable, AllII, NumericallyAllII, AllI, SomeI, Mixed, Neither, Undetermined };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::NotApplicable: return "NotApplicable";
    case Classification::AllII: return "AllII";
    case Classification::NumericallyAllII: return "NumericallyAllII";
    case Classification::AllI: return "AllI";
    case Classification::SomeI: return "SomeI";
    case Classification::Mixed: return "Mixed";
    case Classification::Neither: return "Neither";
    case Classification::Undetermined: return "Undetermined";
  }
  return "Unknown";
}

struct TransformStep {
  std::string target_param;
  Monomial monomial;
  std::string monomial_text;
  ParamSeries coeff;
};

struct ClassificationResult {
  Classification kind = Classification::NotApplicable;
  std::string method;
  std::vector<std::string> evidence;
  bool exact = true;
};

struct VerifierOutcome {
  VerifierStatus status = VerifierStatus::Verified;
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  std::size_t r = 0;
  int m = 0;
  bool m_declared = false;
  std::vector<std::string> basis_params;
  std::vector<std::size_t> basis_indices;
  std::vector<TransformStep> transforms;
  ClassificationResult classification;
  std::vector<std::string> direction_evidence;
  int theta_truncation = 0;
  int tau_truncation = 0;
  std::optional<ObsSeries> f_normalized;

  bool verified() const { return status == VerifierStatus::Verified; }
};

struct VerifyOptions {
  std::optional<int> theta_bound;  // fixed; otherwise chosen and re-expanded automatically
  int tau_bound = 4;
  int initial_theta_bound = 4;
  int max_theta_bound = 12;
  std::size_t sphere_samples = 4096;
  double eta = 1e-12;
  std::uint64_t seed = 20240531;
};

// first-order coefficient series of theta_i, as tau-series observables
inline std::vector<ObsSeries> linear_coefficients(const ObsSeries& f) {
  std::vector<ObsSeries> out;
  for (std::size_t i = 0; i < f.ring()->d1(); ++i) {
    Monomial m;
    m[i] = 1;
    out.push_back(theta_coefficient(f, m));
  }
  return out;
}

inline Observable at_origin(const ObsSeries& s) { return s.coefficient(Monomial{}); }

struct RankOutcome {
  std::size_t r = 0;
  std::vector<std::size_t> basis;
  std::vector<std::string> names;
};

inline RankOutcome rank_first_derivatives(const ObsSeries& f) {
  std::vector<Observable> at0;
  for (const auto& g : linear_coefficients(f)) at0.push_back(at_origin(g));
  RankResult rr = rank_and_dependencies(f.space(), at0);
  RankOutcome out;
  out.r = rr.rank;
  out.basis = rr.basis_indices;
  for (std::size_t i : out.basis) out.names.push_back(f.ring()->name(i));
  return out;
}

inline std::vector<std::size_t> complement(std::size_t d1, const std::vector<std::size_t>& basis) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < d1; ++i)
    if (std::find(basis.begin(), basis.end(), i) == basis.end()) out.push_back(i);
  return out;
}

struct EliminationOutcome {
  ObsSeries f;
  std::vector<TransformStep> transforms;
  std::optional<int> m;
  bool non_unit = false;
  std::vector<std::string> evidence;
};

inline EliminationOutcome eliminate_dependencies(ObsSeries f, const std::vector<std::size_t>& basis) {
  const Ring ring = f.ring();
  const std::vector<std::size_t> others = complement(ring->d1(), basis);
  EliminationOutcome out{f, {}, std::nullopt, false, {}};
  if (others.empty()) return out;
  std::vector<ObsSeries> lin = linear_coefficients(f);
  std::vector<ObsSeries> g;
  for (std::size_t k : basis) g.push_back(lin[k]);
  const std::size_t r = basis.size();
  const int dtau = f.tau_bound();
  Matrix<ParamSeries> gram_tau(r, r, ParamSeries(ring));
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) gram_tau(a, b) = expect_product(g[a], g[b]).truncated(kUnbounded, dtau);

  for (int t = 1; t <= f.theta_bound(); ++t) {
    bool residual_found = false;
    std::map<std::string, ParamSeries> images;
    std::vector<TransformStep> steps;
    for (const Monomial& alpha : monomials_of_degree(others, t)) {
      ObsSeries b = theta_coefficient(out.f, alpha);
      if (b.is_as_zero()) continue;
      std::vector<ParamSeries> rhs;
      for (std::size_t a = 0; a < r; ++a) rhs.push_back(expect_product(g[a], b).truncated(kUnbounded, dtau));
      std::vector<ParamSeries> phi = solve_unit_pivots(gram_tau, rhs);
      ObsSeries residual = b;
      for (std::size_t a = 0; a < r; ++a) residual -= phi[a] * g[a];
      residual = residual.truncated(kUnbounded, dtau);
      const std::string mono = ParamSeries(ring).monomial_string(alpha);
      if (!residual.is_as_zero()) {
        residual_found = true;
        out.evidence.push_back("coefficient of " + mono + " leaves residual " + residual.to_string());
        continue;
      }
      for (std::size_t a = 0; a < r; ++a) {
        if (phi[a].is_zero()) continue;
        const std::string& target = ring->name(basis[a]);
        ParamSeries term = phi[a] * ParamSeries::monomial(ring, alpha, Rational(1));
        auto it = images.find(target);
        if (it == images.end())
          images.emplace(target, ParamSeries::variable(ring, basis[a]) - term);
        else
          it->second -= term;
        steps.push_back({target, alpha, mono, phi[a]});
      }
    }
    if (!images.empty()) out.f = substitute(out.f, images);
    for (auto& s : steps) out.transforms.push_back(std::move(s));
    if (residual_found) {
      out.m = t;
      out.non_unit = (t == 1);
      return out;
    }
  }
  return out;
}

namespace detail {

inline std::vector<Observable> basis_at_zero(const ObsSeries& f, const std::vector<std::size_t>& basis) {
  std::vector<ObsSeries> lin = linear_coefficients(f);
  std::vector<Observable> out;
  for (std::size_t k : basis) out.push_back(at_origin(lin[k]));
  return out;
}

inline Observable combine(const std::vector<Observable>& obs, const std::vector<Rational>& c, const Space& s) {
  Observable out = zero_observable(s);
  for (std::size_t i = 0; i < obs.size(); ++i) out = out + c[i] * obs[i];
  return out;
}

inline Rational monomial_value(const Monomial& m, const std::vector<std::size_t>& vars, const std::vector<Rational>& point) {
  Rational v = 1;
  for (std::size_t k = 0; k < vars.size(); ++k) v *= power(point[k], m[vars[k]]);
  return v;
}

inline Observable form_at(const std::vector<Monomial>& monos, const std::vector<Observable>& coeffs,
                          const std::vector<std::size_t>& vars, const std::vector<Rational>& point, const Space& s) {
  Observable out = zero_observable(s);
  for (std::size_t i = 0; i < monos.size(); ++i) {
    Rational v = monomial_value(monos[i], vars, point);
    if (v != 0) out = out + v * coeffs[i];
  }
  return out;
}

inline std::string point_string(const std::vector<std::size_t>& vars, const std::vector<Rational>& point, const SeriesRing& ring) {
  std::string out = "(";
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (k) out += ", ";
    out += ring.name(vars[k]) + "=" + to_string(point[k]);
  }
  return out + ")";
}

// E[(sum_a c_a x^a)^2] over binary forms in (x_0, x_1) dehomogenised at x_1 = 1
inline upoly::Poly square_norm_poly(const std::vector<Monomial>& monos, const std::vector<Observable>& coeffs, std::size_t first) {
  int m = monos.empty() ? 0 : monos[0][first];
  for (const auto& mo : monos) m = std::max<int>(m, mo[first]);
  upoly::Poly p(2 * 64 + 1, Rational(0));
  for (std::size_t i = 0; i < monos.size(); ++i)
    for (std::size_t j = 0; j < monos.size(); ++j) {
      Rational e = inner(coeffs[i], coeffs[j]);
      if (e != 0) p.at(monos[i][first] + monos[j][first]) += e;
    }
  upoly::trim(p);
  return p;
}

}  // namespace detail

inline ClassificationResult classify_condition_three(const ObsSeries& f, const std::vector<std::size_t>& basis, int m,
                                                     const VerifyOptions& opt = {}) {
  ClassificationResult out;
  const Ring ring = f.ring();
  const std::vector<std::size_t> others = complement(ring->d1(), basis);
  if (m == 1 || others.empty()) {
    out.kind = Classification::AllII;
    out.method = others.empty() ? "no non-basis parameters" : "m = 1 convention";
    return out;
  }
  const Space& space = f.space();
  ObsSeries fm = restrict_to_zero(homogeneous_part(f, others, m), tau_indices(*ring));
  std::vector<Observable> gb = detail::basis_at_zero(f, basis);
  std::vector<Monomial> monos = monomials_of_degree(others, m);
  std::vector<Observable> w, p, rres;
  for (const auto& a : monos) {
    Observable wa = fm.coefficient(a);
    std::vector<Rational> c = projection_coefficients(gb, wa);
    Observable pa = detail::combine(gb, c, space);
    w.push_back(wa);
    p.push_back(pa);
    rres.push_back(wa - pa);
  }
  auto all_zero = [&](const std::vector<Observable>& v) {
    return std::all_of(v.begin(), v.end(), [&](const Observable& o) { return is_as_zero(space, o); });
  };
  const bool p_zero = all_zero(p);
  if (all_zero(rres)) {
    if (p_zero) {
      out.kind = Classification::AllI;
      out.method = "F_m at tau=0 is a.s. zero";
      out.evidence.push_back("every coefficient of F_" + std::to_string(m) + " at tau=0 is a.s. zero");
    } else {
      out.kind = Classification::Neither;
      out.method = "F_m at tau=0 lies in the span of the basis derivatives";
      out.evidence.push_back("F_" + std::to_string(m) + " at tau=0 is nonzero but dependent on the basis derivatives");
    }
    return out;
  }

  // sign of a zero set of R found elsewhere: (i) iff P vanishes there too
  auto zero_set_verdict = [&](bool p_vanishes_on_zeros, const std::string& method, const std::string& detail) {
    out.method = method;
    out.evidence.push_back(detail);
    out.kind = p_vanishes_on_zeros ? Classification::Mixed : Classification::Neither;
  };

  std::size_t rank_r = rank(gram(space, rres));
  if (rank_r == 1) {
    std::size_t lead = 0;
    while (is_as_zero(space, rres[lead])) ++lead;
    const Observable& v = rres[lead];
    Rational vv = inner(v, v);
    std::vector<Rational> s;
    for (const auto& ra : rres) s.push_back(inner(ra, v) / vv);
    if (m == 2) {
      const std::size_t n = others.size();
      RationalMatrix q(n, n, Rational(0));
      for (std::size_t i = 0; i < monos.size(); ++i) {
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < n; ++k)
          for (int e = 0; e < monos[i][others[k]]; ++e) idx.push_back(k);
        if (idx[0] == idx[1])
          q(idx[0], idx[0]) = s[i];
        else {
          q(idx[0], idx[1]) = s[i] / 2;
          q(idx[1], idx[0]) = s[i] / 2;
        }
      }
      Definiteness d = classify_symmetric(q);
      std::string method = std::string("rank-1 quadratic form, exact inertia (") + to_string(d) + ")";
      if (d == Definiteness::PositiveDefinite || d == Definiteness::NegativeDefinite) {
        out.kind = Classification::AllII;
        out.method = method;
        return out;
      }
      if (d == Definiteness::PositiveSemidefinite || d == Definiteness::NegativeSemidefinite) {
        auto null = nullspace(q);
        bool vanishes = true;
        for (std::size_t a = 0; a < null.size() && vanishes; ++a)
          for (std::size_t b = a; b < null.size() && vanishes; ++b) {
            Observable acc = zero_observable(space);
            for (std::size_t i = 0; i < monos.size(); ++i) {
              std::vector<std::size_t> idx;
              for (std::size_t k = 0; k < n; ++k)
                for (int e = 0; e < monos[i][others[k]]; ++e) idx.push_back(k);
              Rational coef = idx[0] == idx[1] ? Rational(null[a][idx[0]] * null[b][idx[0]])
                                               : Rational((null[a][idx[0]] * null[b][idx[1]] + null[a][idx[1]] * null[b][idx[0]]) / 2);
              if (coef != 0) acc = acc + coef * p[i];
            }
            vanishes = is_as_zero(space, acc);
          }
        zero_set_verdict(vanishes, method, "scalar form vanishes on direction " + detail::point_string(others, null[0], *ring));
        return out;
      }
      if (p_zero) {
        zero_set_verdict(true, method, "indefinite scalar form has a real zero cone on which F_m vanishes");
        return out;
      }
    } else {
      bool diagonal = true;
      int sign = 0;
      for (std::size_t i = 0; i < monos.size(); ++i) {
        if (s[i] == 0) continue;
        int nonzero_vars = 0;
        for (std::size_t k : others) nonzero_vars += monos[i][k] ? 1 : 0;
        if (nonzero_vars != 1 || m % 2 == 1 || (sign != 0 && sgn(s[i]) != sign)) diagonal = false;
        sign = sgn(s[i]);
      }
      std::size_t pure = 0;
      for (std::size_t i = 0; i < monos.size(); ++i)
        if (s[i] != 0) ++pure;
      if (diagonal && pure == others.size()) {
        out.kind = Classification::AllII;
        out.method = "rank-1 even diagonal form with same-sign coefficients";
        return out;
      }
    }
  }

  if (others.size() == 1) {
    out.kind = Classification::AllII;
    out.method = "single non-basis parameter";
    return out;
  }

  if (others.size() == 2) {
    const std::size_t a = others[0];
    upoly::Poly rho = detail::square_norm_poly(monos, rres, a);
    upoly::Poly pi = detail::square_norm_poly(monos, p, a);
    const bool zero_at_infinity = upoly::degree(rho) < 2 * m;
    const bool p_zero_at_infinity = upoly::degree(pi) < 2 * m;
    std::size_t zeros = upoly::real_root_count(rho) + (zero_at_infinity ? 1 : 0);
    const std::string method = "binary form, exact Sturm root count";
    if (zeros == 0) {
      out.kind = Classification::AllII;
      out.method = method;
      return out;
    }
    std::size_t common = (pi.empty() ? upoly::real_root_count(rho) : upoly::real_root_count(upoly::gcd(rho, pi))) +
                         ((zero_at_infinity && p_zero_at_infinity) ? 1 : 0);
    zero_set_verdict(common == zeros, method,
                     std::to_string(zeros) + " real zero direction(s) of the residual form, " + std::to_string(common) +
                         " of them with F_m a.s. zero");
    return out;
  }

  // sphere sampling
  out.exact = false;
  out.method = "sphere sampling, N=" + std::to_string(opt.sphere_samples);
  Rational scale2 = 0;
  for (const auto& ra : rres) scale2 = std::max(scale2, inner(ra, ra));
  const double eta = opt.eta * scale2.get_d();
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  double min_value = std::numeric_limits<double>::infinity();
  std::vector<Rational> argmin;
  bool exact_zero_i = false, exact_zero_neither = false;
  for (std::size_t sidx = 0; sidx < opt.sphere_samples; ++sidx) {
    std::vector<double> x(others.size());
    double norm = 0;
    for (auto& xi : x) {
      xi = normal(rng);
      norm += xi * xi;
    }
    norm = std::sqrt(norm);
    std::vector<Rational> point;
    for (double xi : x) point.push_back(Rational(static_cast<long>(std::llround(xi / norm * 1048576.0)), 1048576L));
    Observable rv = detail::form_at(monos, rres, others, point, space);
    Rational val = inner(rv, rv);
    if (val == 0) {
      Observable pv = detail::form_at(monos, p, others, point, space);
      (is_as_zero(space, pv) ? exact_zero_i : exact_zero_neither) = true;
      out.evidence.push_back("residual form vanishes at " + detail::point_string(others, point, *ring));
    }
    if (val.get_d() < min_value) {
      min_value = val.get_d();
      argmin = point;
    }
  }
  if (exact_zero_neither) {
    out.kind = Classification::Neither;
  } else if (exact_zero_i) {
    out.kind = Classification::SomeI;
  } else if (min_value > eta) {
    out.kind = Classification::NumericallyAllII;
    out.evidence.push_back("minimum sampled E[R^2] = " + std::to_string(min_value));
  } else {
    out.kind = Classification::Undetermined;
    out.evidence.push_back("minimum sampled E[R^2] = " + std::to_string(min_value) + " at " +
                           detail::point_string(others, argmin, *ring) + " is below eta");
  }
  return out;
}

namespace detail {

inline VerifierOutcome run_pipeline(const ModelSpec& model, int dtheta, int dtau, const VerifyOptions& opt) {
  VerifierOutcome out;
  out.d1 = model.d1();
  out.d2 = model.d2();
  ObsSeries f = build_f_series(model, dtheta, dtau);
  out.theta_truncation = f.theta_bound();
  out.tau_truncation = f.tau_bound();
  RankOutcome rk = rank_first_derivatives(f);
  out.r = rk.r;
  out.basis_indices = rk.basis;
  out.basis_params = rk.names;
  if (rk.r == 0) {
    out.status = VerifierStatus::DegenerateRank;
    out.direction_evidence.push_back("all first derivatives are a.s. zero at the origin");
    return out;
  }
  const std::vector<std::size_t> others = complement(model.d1(), rk.basis);
  EliminationOutcome el = eliminate_dependencies(f, rk.basis);
  out.transforms = el.transforms;
  out.f_normalized = el.f;
  if (others.empty()) {
    out.m = model.declared_m.value_or(1);
    out.m_declared = model.declared_m.has_value();
    out.classification.kind = Classification::AllII;
    out.classification.method = "no non-basis parameters";
    out.status = VerifierStatus::Verified;
    return out;
  }
  if (!el.m) {
    out.status = VerifierStatus::TruncationExhausted;
    out.direction_evidence.push_back("no non-vanishing homogeneous part of the non-basis parameters up to theta-degree " +
                                     std::to_string(f.theta_bound()) + "; raise D_theta");
    return out;
  }
  out.m = *el.m;
  if (el.non_unit) {
    out.status = VerifierStatus::InapplicableNonUnit;
    out.direction_evidence = el.evidence;
    out.direction_evidence.push_back("the first-order residual vanishes at tau=0, so the dependency needs a non-unit divisor");
    return out;
  }
  out.classification = classify_condition_three(el.f, rk.basis, out.m, opt);
  switch (out.classification.kind) {
    case Classification::AllII:
    case Classification::NumericallyAllII: out.status = VerifierStatus::Verified; break;
    case Classification::AllI: out.status = VerifierStatus::InapplicableConditionThreeI; break;
    case Classification::SomeI:
    case Classification::Mixed: out.status = VerifierStatus::MixedDirections; break;
    case Classification::Neither: out.status = VerifierStatus::InapplicableConditionThree; break;
    default: out.status = VerifierStatus::UndeterminedPositivity; break;
  }
  out.direction_evidence = out.classification.evidence;
  if (out.status == VerifierStatus::InapplicableConditionThreeI) {
    ObsSeries fm = homogeneous_part(el.f, others, out.m);
    bool reported = false;
    for (const auto& mono : monomials_of_degree(others, out.m)) {
      for (std::size_t b = 0; b < fm.comps().size() && !reported; ++b) {
        ParamSeries c = theta_coefficient(fm.component(b), mono);
        if (c.is_zero()) continue;
        reported = true;
        try {
          invert(c);
        } catch (const NotAUnitError&) {
          out.direction_evidence.push_back("coefficient of " + ParamSeries(fm.ring()).monomial_string(mono) + " in F_" +
                                           std::to_string(out.m) + " at outcome " + fm.space()->labels()[b] +
                                           " is the non-unit " + c.to_string());
        }
      }
      if (reported) break;
    }
    for (const auto& step : out.transforms) {
      if (step.monomial.total() != 1 || step.coeff.constant_term() != 0) continue;
      try {
        invert(step.coeff);
      } catch (const NotAUnitError&) {
        out.direction_evidence.push_back("dependency coefficient " + step.coeff.to_string() + " of " + step.monomial_text +
                                         " on " + step.target_param + " vanishes at tau=0, so the reverse coefficient 1/(" + step.coeff.to_string() +
                                         ") is not defined near tau=0");
      }
    }
  }
  return out;
}

}  // namespace detail

inline VerifierOutcome verify(const ModelSpec& model, const VerifyOptions& opt = {}) {
  RealizabilityReport real = check_realizable_by_theta(model);
  if (!real.holds) {
    VerifierOutcome out;
    out.status = VerifierStatus::NotRealizable;
    out.d1 = model.d1();
    out.d2 = model.d2();
    out.direction_evidence.push_back("p(x|0,tau) - q(x) is not zero for " + real.witness_outcome + ": " + real.witness);
    return out;
  }
  if (opt.theta_bound) return detail::run_pipeline(model, *opt.theta_bound, opt.tau_bound, opt);
  int dtheta = opt.initial_theta_bound;
  while (true) {
    VerifierOutcome out = detail::run_pipeline(model, dtheta, opt.tau_bound, opt);
    if (out.status == VerifierStatus::TruncationExhausted) {
      if (dtheta >= opt.max_theta_bound || out.theta_truncation < dtheta) return out;
      dtheta = std::min(dtheta + 2, opt.max_theta_bound);
      continue;
    }
    if (out.m >= 1 && 2 * out.m + 2 > dtheta && out.theta_truncation >= dtheta) {
      dtheta = 2 * out.m + 2;
      continue;
    }
    return out;
  }
}

}  // namespace rlct
