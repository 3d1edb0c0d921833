#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rlct/error.hpp"
#include "rlct/matrix.hpp"
#include "rlct/obs_series.hpp"
#include "rlct/rlct_core.hpp"
#include "rlct/series.hpp"
#include "rlct/upoly.hpp"
#include "rlct/verifier.hpp"

namespace rlct {

struct ExclusionSet {
  bool applicable = false;  // only charts ending on a non-basis variable carry a condition
  bool empty = true;
  bool exact = true;
  std::string description;
};

struct NormalCrossingEvidence {
  bool checked = false;
  bool passed = false;
  bool unit_nonzero_at_origin = false;
  std::size_t samples = 0;
  std::size_t samples_in_s = 0;
  std::string unit_on_divisor;
  std::vector<std::string> notes;
};

struct Chart {
  std::string label;
  std::vector<std::size_t> path;
  Ring ring;
  std::vector<std::vector<int>> exponents;  // exponents[k][l]: power of chart variable l in original theta_k
  std::vector<int> k;
  std::vector<int> h;
  ParamSeries k_pullback;
  ParamSeries unit;
  std::size_t exceptional = 0;
  bool terminal = false;
  bool jacobian_verified = false;
  ExclusionSet exclusion;
  NormalCrossingEvidence crossing;

  std::size_t depth() const { return path.size(); }

  // min over chart variables of (h+1)/k
  std::optional<Rational> lambda() const {
    std::optional<Rational> best;
    for (std::size_t l = 0; l < k.size(); ++l) {
      if (k[l] == 0) continue;
      Rational v = rational(h[l] + 1, k[l]);
      if (!best || v < *best) best = v;
    }
    return best;
  }

  int multiplicity() const {
    auto lam = lambda();
    if (!lam) return 0;
    int n = 0;
    for (std::size_t l = 0; l < k.size(); ++l)
      if (k[l] != 0 && rational(h[l] + 1, k[l]) == *lam) ++n;
    return n;
  }
};

namespace detail {

inline ParamSeries partial_derivative(const ParamSeries& a, std::size_t var) {
  ParamSeries out(a.ring(), a.theta_bound(), a.tau_bound());
  for (const auto& [m, c] : a.terms()) {
    if (m[var] == 0) continue;
    Monomial d = m;
    d[var] -= 1;
    out.add_term(d, c * m[var]);
  }
  return out;
}

inline ParamSeries leibniz_determinant(const Matrix<ParamSeries>& j) {
  const std::size_t n = j.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  ParamSeries total(j(0, 0).ring());
  do {
    int inversions = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (perm[a] > perm[b]) ++inversions;
    ParamSeries term = ParamSeries::constant(total.ring(), Rational(inversions % 2 ? -1 : 1));
    for (std::size_t a = 0; a < n && !term.is_zero(); ++a) term = term * j(a, perm[a]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline Ring chart_ring(const SeriesRing& base, const std::vector<std::string>& theta_names, std::size_t exceptional) {
  VarSet vars{theta_names, base.vars().tau};
  std::vector<int> tw(base.size(), 0), uw(base.size(), 0);
  tw[exceptional] = 1;
  for (std::size_t i = base.d1(); i < base.size(); ++i) uw[i] = 1;
  return std::make_shared<const SeriesRing>(vars, tw, uw);
}

inline ParamSeries chart_monomial(const Ring& ring, const std::vector<int>& e) {
  Monomial m;
  for (std::size_t l = 0; l < e.size(); ++l) m[l] = static_cast<std::uint8_t>(e[l]);
  return ParamSeries::monomial(ring, m, Rational(1));
}

inline std::string label_for(const std::string& parent, std::size_t index, std::size_t depth) {
  if (depth == 1) return std::string(1, static_cast<char>('a' + index));
  return parent + std::to_string(index + 1);
}

}  // namespace detail

inline void finish_chart(Chart& c, const ParamSeries& k) {
  const SeriesRing& src = *k.ring();
  const std::size_t d1 = src.d1();
  const int dtheta = k.theta_bound();
  ParamSeries pulled(c.ring, dtheta, k.tau_bound());
  for (const auto& [mono, coef] : k.terms()) {
    Monomial out;
    for (std::size_t l = 0; l < d1; ++l) {
      int e = 0;
      for (std::size_t kk = 0; kk < d1; ++kk) e += c.exponents[kk][l] * mono[kk];
      if (e > 255) throw Error(ErrorKind::DegreeOverflow, "chart exponent exceeds 255");
      out[l] = static_cast<std::uint8_t>(e);
    }
    for (std::size_t t = d1; t < src.size(); ++t) out[t] = mono[t];
    if (c.ring->theta_degree(out) <= dtheta) pulled.add_term(out, coef);
  }
  c.k_pullback = pulled;
  c.k.assign(d1, 0);
  c.h.assign(d1, 0);
  if (pulled.is_zero()) throw Error(ErrorKind::NormalCrossingFailure, "chart " + c.label + ": pulled-back K vanishes up to truncation");
  for (std::size_t l = 0; l < d1; ++l) {
    int lo = 255;
    for (const auto& [mono, coef] : pulled.terms()) lo = std::min<int>(lo, mono[l]);
    c.k[l] = lo;
    int col_min = 255, col_sum = 0;
    for (std::size_t kk = 0; kk < d1; ++kk) {
      col_min = std::min(col_min, c.exponents[kk][l]);
      col_sum += c.exponents[kk][l];
    }
    c.h[l] = col_sum - 1;
    if ((dtheta + 1) * col_min < c.k[l])
      throw Error(ErrorKind::NormalCrossingFailure, "chart " + c.label + ": truncation too low to certify the power of " +
                                                        c.ring->name(l));
  }
  if (c.k[c.exceptional] > dtheta)
    throw Error(ErrorKind::NormalCrossingFailure, "chart " + c.label + ": exceptional power beyond truncation");
  ParamSeries unit(c.ring, dtheta - c.k[c.exceptional], k.tau_bound());
  for (const auto& [mono, coef] : pulled.terms()) {
    Monomial m = mono;
    for (std::size_t l = 0; l < d1; ++l) m[l] -= c.k[l];
    unit.add_term(m, coef);
  }
  c.unit = unit;

  // Jacobian of the monomial map, expanded directly
  if (d1 <= 7) {
    Ring exact = make_ring(c.ring->vars());
    Matrix<ParamSeries> jm(d1, d1, ParamSeries(exact));
    for (std::size_t kk = 0; kk < d1; ++kk) {
      ParamSeries img = detail::chart_monomial(exact, c.exponents[kk]);
      for (std::size_t l = 0; l < d1; ++l) jm(kk, l) = detail::partial_derivative(img, l);
    }
    ParamSeries det = detail::leibniz_determinant(jm);
    RationalMatrix e(d1, d1, Rational(0));
    for (std::size_t kk = 0; kk < d1; ++kk)
      for (std::size_t l = 0; l < d1; ++l) e(kk, l) = c.exponents[kk][l];
    std::vector<int> hv(c.h.begin(), c.h.end());
    hv.resize(exact->size(), 0);
    ParamSeries expected = detail::chart_monomial(exact, hv) * determinant(e);
    c.jacobian_verified = det == expected;
    if (!c.jacobian_verified)
      throw Error(ErrorKind::NormalCrossingFailure, "chart " + c.label + ": Jacobian " + det.to_string() + " differs from " +
                                                        expected.to_string());
  }
}

// the chart tree of successive blow-ups: first at theta = 0, then at {basis = 0, chosen non-basis = 0}
inline std::vector<Chart> blowup_tree(const ParamSeries& k, const std::vector<std::size_t>& basis, int m) {
  const SeriesRing& src = *k.ring();
  const std::size_t d1 = src.d1();
  if (basis.empty() || basis.size() > d1) throw Error(ErrorKind::Precondition, "blowup_tree: need 1 <= r <= d1");
  if (m < 1) throw Error(ErrorKind::Precondition, "blowup_tree: m must be positive");
  if (k.theta_bound() < 2 * m) throw Error(ErrorKind::OutOfTruncation, "blowup_tree: K must be known to theta-degree 2m");
  std::vector<bool> in_basis(d1, false);
  for (std::size_t b : basis) in_basis[b] = true;
  std::vector<Chart> out;

  struct Node {
    std::string label;
    std::vector<std::size_t> path;
    std::vector<std::string> names;
    std::vector<std::vector<int>> exponents;
  };
  std::vector<std::string> names0;
  for (std::size_t i = 0; i < d1; ++i) names0.push_back(src.name(i));
  std::vector<std::vector<int>> e0(d1, std::vector<int>(d1, 0));
  for (std::size_t i = 0; i < d1; ++i) e0[i][i] = 1;

  auto rec = [&](auto&& self, const Node& parent, const std::vector<std::size_t>& center) -> void {
    for (std::size_t idx = 0; idx < center.size(); ++idx) {
      const std::size_t j = center[idx];
      Node node{detail::label_for(parent.label, idx, parent.path.size() + 1), parent.path, parent.names, parent.exponents};
      node.path.push_back(j);
      for (std::size_t l : center) {
        if (l == j) continue;
        node.names[l] = src.name(l) + std::string(node.path.size(), '\'');
        for (std::size_t kk = 0; kk < d1; ++kk) node.exponents[kk][j] += parent.exponents[kk][l];
      }
      Chart c;
      c.label = node.label;
      c.path = node.path;
      c.exceptional = j;
      c.exponents = node.exponents;
      c.ring = detail::chart_ring(src, node.names, j);
      c.terminal = in_basis[j] || static_cast<int>(node.path.size()) == m;
      finish_chart(c, k);
      out.push_back(std::move(c));
      if (!in_basis[j] && static_cast<int>(node.path.size()) < m) {
        std::vector<std::size_t> next = basis;
        next.push_back(j);
        std::sort(next.begin(), next.end());
        self(self, node, next);
      }
    }
  };
  std::vector<std::size_t> all(d1);
  std::iota(all.begin(), all.end(), 0);
  rec(rec, Node{"", {}, names0, e0}, all);
  return out;
}

// S on a chart ending at a non-basis variable: F_m with that coordinate set to 1
inline ExclusionSet exclusion_for_chart(const Chart& c, const ObsSeries& f, const std::vector<std::size_t>& basis, int m,
                                        Classification kind) {
  ExclusionSet s;
  const std::size_t i = c.exceptional;
  if (std::find(basis.begin(), basis.end(), i) != basis.end() || static_cast<int>(c.depth()) != m) return s;
  s.applicable = true;
  const Ring ring = f.ring();
  const std::vector<std::size_t> others = complement(ring->d1(), basis);
  ObsSeries fm = restrict_to_zero(homogeneous_part(f, others, m), tau_indices(*ring));
  std::vector<Monomial> monos = monomials_of_degree(others, m);
  std::vector<Observable> w;
  for (const auto& a : monos) w.push_back(fm.coefficient(a));
  std::vector<std::size_t> free_vars;
  for (std::size_t o : others)
    if (o != i) free_vars.push_back(o);
  const Space& space = f.space();
  if (free_vars.empty()) {
    Observable v = zero_observable(space);
    for (std::size_t a = 0; a < monos.size(); ++a) v = v + w[a];
    s.empty = !is_as_zero(space, v);
    s.description = s.empty ? "F_m(1) is not a.s. zero" : "F_m(1) is a.s. zero";
    return s;
  }
  if (free_vars.size() == 1) {
    const std::size_t v = free_vars[0];
    upoly::Poly p(2 * m + 1, Rational(0));
    for (std::size_t a = 0; a < monos.size(); ++a)
      for (std::size_t b = 0; b < monos.size(); ++b) p[monos[a][v] + monos[b][v]] += inner(w[a], w[b]);
    upoly::trim(p);
    std::size_t roots = p.empty() ? 1 : upoly::real_root_count(p);
    s.empty = roots == 0;
    s.description = "E[F_m^2] with " + ring->name(i) + " = 1 has " + std::to_string(roots) + " real zero(s) in " +
                    c.ring->name(v) + " (Sturm)";
    return s;
  }
  s.exact = kind == Classification::AllII;
  s.empty = kind == Classification::AllII || kind == Classification::NumericallyAllII;
  s.description = s.empty ? "F_m has no nontrivial real zero by the condition (3) classification"
                          : "F_m has nontrivial real zeros";
  return s;
}

struct CrossingConfig {
  std::size_t samples = 64;
  std::uint64_t seed = 7;
};

// unit on the latest exceptional divisor at tau = 0: exact at the chart origin and at seeded rational points
inline NormalCrossingEvidence normal_crossing_check(const Chart& c, const CrossingConfig& cfg = {},
                                                    const ObsSeries* f = nullptr, const std::vector<std::size_t>* basis = nullptr,
                                                    int m = 0) {
  NormalCrossingEvidence ev;
  ev.checked = true;
  const SeriesRing& ring = *c.ring;
  std::vector<std::size_t> zero_vars = tau_indices(ring);
  zero_vars.push_back(c.exceptional);
  ParamSeries restricted = restrict_to_zero(c.unit, zero_vars);
  ev.unit_on_divisor = restricted.to_string();
  std::vector<Rational> origin(ring.size(), Rational(0));
  ev.unit_nonzero_at_origin = restricted.evaluate(origin) != 0;

  auto in_s = [&](const std::vector<Rational>& pt) {
    if (!f || !basis || !c.exclusion.applicable) return false;
    const std::vector<std::size_t> others = complement(ring.d1(), *basis);
    std::vector<Rational> theta(f->ring()->size(), Rational(0));
    for (std::size_t o : others) theta[o] = o == c.exceptional ? Rational(1) : pt[o];
    ObsSeries fm = restrict_to_zero(homogeneous_part(*f, others, m), tau_indices(*f->ring()));
    return is_as_zero(f->space(), evaluate(fm, theta));
  };

  auto on_next_center = [&](const std::vector<Rational>& pt) {
    if (!basis) return false;
    for (std::size_t b : *basis)
      if (pt[b] != 0) return false;
    return true;
  };

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> num(-64, 64);
  bool all_samples_ok = true;
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    std::vector<Rational> pt(ring.size(), Rational(0));
    for (std::size_t l = 0; l < ring.d1(); ++l)
      if (l != c.exceptional) pt[l] = Rational(num(rng), 16);
    if (in_s(pt) || (!c.terminal && on_next_center(pt))) {
      ++ev.samples_in_s;
      continue;
    }
    ++ev.samples;
    if (restricted.evaluate(pt) == 0) {
      all_samples_ok = false;
      std::string where;
      for (std::size_t l = 0; l < ring.d1(); ++l) where += (l ? ", " : "") + ring.name(l) + "=" + to_string(pt[l]);
      ev.notes.push_back("unit vanishes at (" + where + ")");
    }
  }
  if (c.terminal) {
    ev.passed = ev.unit_nonzero_at_origin && all_samples_ok;
    if (!ev.unit_nonzero_at_origin) ev.notes.push_back("unit vanishes at the chart origin");
  } else {
    ev.passed = all_samples_ok;
    if (!ev.unit_nonzero_at_origin) ev.notes.push_back("unit vanishes at the chart origin; resolved by the next blow-up");
  }
  return ev;
}

struct ChartAnalysis {
  std::vector<Chart> charts;
  RlctResult result;
  bool all_crossings_passed = true;
  bool all_jacobians_verified = true;
  bool all_exclusions_empty = true;
};

inline RlctResult lambda_from_charts(const std::vector<Chart>& charts) {
  RlctResult out;
  out.source = RlctSource::Charts;
  std::optional<Rational> best;
  for (const auto& c : charts) {
    auto l = c.lambda();
    if (l && (!best || *l < *best)) best = l;
  }
  if (!best) {
    out.infinite = true;
    out.multiplicity = 0;
    return out;
  }
  out.lambda = *best;
  out.multiplicity = 0;
  for (const auto& c : charts)
    if (c.lambda() && *c.lambda() == *best) out.multiplicity = std::max(out.multiplicity, c.multiplicity());
  return out;
}

// full chart analysis of a verified outcome
inline ChartAnalysis analyze_charts(const VerifierOutcome& v, const CrossingConfig& cfg = {}) {
  if (!v.f_normalized || v.r == 0) throw Error(ErrorKind::Precondition, "chart analysis needs a verified outcome");
  const ObsSeries& f = *v.f_normalized;
  ParamSeries k = expectation(f);
  ChartAnalysis out;
  out.charts = blowup_tree(k, v.basis_indices, v.m);
  for (auto& c : out.charts) {
    c.exclusion = exclusion_for_chart(c, f, v.basis_indices, v.m, v.classification.kind);
    c.crossing = normal_crossing_check(c, cfg, &f, &v.basis_indices, v.m);
    out.all_crossings_passed = out.all_crossings_passed && c.crossing.passed;
    out.all_jacobians_verified = out.all_jacobians_verified && c.jacobian_verified;
    out.all_exclusions_empty = out.all_exclusions_empty && c.exclusion.empty;
  }
  out.result = lambda_from_charts(out.charts);
  return out;
}

namespace detail {

inline std::string monomial_text(const SeriesRing& ring, const std::vector<int>& e) {
  std::string out;
  for (std::size_t l = 0; l < e.size(); ++l) {
    if (e[l] == 0) continue;
    if (!out.empty()) out += "*";
    out += ring.name(l);
    if (e[l] > 1) out += "^" + std::to_string(e[l]);
  }
  return out.empty() ? "1" : out;
}

inline std::string tuple_text(const std::vector<int>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out + ")";
}

}  // namespace detail

inline std::string coordinates_text(const Chart& c) {
  std::string coords = "(";
  for (std::size_t l = 0; l < c.ring->d1(); ++l) coords += (l ? ", " : "") + c.ring->name(l);
  return coords + ")";
}

inline std::string emit_chart_table(const std::vector<Chart>& charts) {
  std::ostringstream os;
  os << "No. | Local Coord. | K | Jacobian | k | h | lambda\n";
  for (std::size_t n = 0; n < charts.size(); ++n) {
    const Chart& c = charts[n];
    std::string coords = coordinates_text(c);
    auto lam = c.lambda();
    os << "(" << c.label << ") | " << coords << (c.terminal ? "" : " != 0") << " | "
       << detail::monomial_text(*c.ring, c.k) << " a" << (n + 1) << coords << " | " << detail::monomial_text(*c.ring, c.h)
       << " | " << detail::tuple_text(c.k) << " | " << detail::tuple_text(c.h) << " | " << (lam ? to_string(*lam) : "inf")
       << "\n";
  }
  return os.str();
}

}  // namespace rlct
