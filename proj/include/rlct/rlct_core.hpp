#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rlct/error.hpp"
#include "rlct/matrix.hpp"
#include "rlct/model.hpp"
#include "rlct/obs_series.hpp"
#include "rlct/observable.hpp"
#include "rlct/rational.hpp"
#include "rlct/series.hpp"
#include "rlct/verifier.hpp"

namespace rlct {

enum class RlctKind { ExactAtPoint, UpperBoundOnly };
enum class RlctSource { Formula, Charts, Oracle };

inline const char* to_string(RlctKind k) { return k == RlctKind::ExactAtPoint ? "ExactAtPoint" : "UpperBoundOnly"; }
inline const char* to_string(RlctSource s) {
  switch (s) {
    case RlctSource::Formula: return "formula";
    case RlctSource::Charts: return "charts";
    case RlctSource::Oracle: return "oracle";
  }
  return "unknown";
}

struct RlctResult {
  Rational lambda;
  bool infinite = false;
  int multiplicity = 1;
  RlctKind kind = RlctKind::ExactAtPoint;
  RlctSource source = RlctSource::Formula;
  bool numeric_positivity = false;

  std::string lambda_string() const { return infinite ? "inf" : to_string(lambda); }
};

inline RlctResult rlct_formula(long d1, long r, long m) {
  if (d1 < 1) throw Error(ErrorKind::Precondition, "rlct_formula: d1 must be at least 1");
  if (r < 1 || r > d1) throw Error(ErrorKind::Precondition, "rlct_formula: need 1 <= r <= d1");
  if (m < 1) throw Error(ErrorKind::Precondition, "rlct_formula: m must be at least 1");
  if (m == 1 && r != d1) throw Error(ErrorKind::Precondition, "rlct_formula: m = 1 requires r = d1");
  RlctResult out;
  out.lambda = Rational(d1 - r + r * m, 2 * m);
  out.lambda.canonicalize();
  return out;
}

inline Rational upper_bound(long d1) {
  if (d1 < 1) throw Error(ErrorKind::Precondition, "upper_bound: d1 must be at least 1");
  Rational b(d1, 2);
  b.canonicalize();
  return b;
}

// formula result for a verified outcome; nullopt when the theorem does not give an exact value
inline std::optional<RlctResult> rlct_for(const VerifierOutcome& v) {
  if (!v.verified()) return std::nullopt;
  RlctResult out = rlct_formula(static_cast<long>(v.d1), static_cast<long>(v.r), v.m);
  out.numeric_positivity = v.classification.kind == Classification::NumericallyAllII;
  return out;
}

struct MainTheorem1Report {
  bool passed = true;
  ParamSeries half_square;
  ParamSeries k;
  ParamSeries remainder;
  std::vector<std::string> violations;
  std::size_t checked_terms = 0;
};

inline ObsSeries first_order_part(const ObsSeries& f, const std::vector<std::size_t>& basis) {
  ObsSeries out(f.space(), f.ring(), kUnbounded, f.tau_bound());
  for (std::size_t k : basis) {
    Monomial m;
    m[k] = 1;
    ParamSeries var = ParamSeries::variable(f.ring(), k);
    ObsSeries coeff = theta_coefficient(f, m);
    out += coeff.map([&](const ParamSeries& c) { return c * var; });
  }
  return out;
}

// K = E[(F_1 + F_m)^2]/2 + remainder, with the excluded families absent from the remainder
inline MainTheorem1Report maintheorem1_check(const VerifierOutcome& v) {
  if (!v.verified() || !v.f_normalized) throw Error(ErrorKind::Precondition, "maintheorem1_check needs a Verified outcome");
  const ObsSeries& f = *v.f_normalized;
  const Ring ring = f.ring();
  const std::vector<std::size_t> others = complement(ring->d1(), v.basis_indices);
  if (f.theta_bound() < 2 * v.m)
    throw Error(ErrorKind::OutOfTruncation, "maintheorem1_check needs theta truncation >= 2m");
  ObsSeries s = first_order_part(f, v.basis_indices);
  if (!others.empty()) s += homogeneous_part(f, others, v.m);
  MainTheorem1Report out;
  out.k = expectation(f);
  const int dt = f.theta_bound(), du = f.tau_bound();
  out.half_square = (expect_product(s, s) * Rational(1, 2)).truncated(dt, du);
  out.remainder = out.k - out.half_square;
  std::vector<bool> in_basis(ring->size(), false);
  for (std::size_t k : v.basis_indices) in_basis[k] = true;
  for (const auto& [mono, c] : out.remainder.terms()) {
    int basis_deg = 0, other_deg = 0;
    for (std::size_t i = 0; i < ring->d1(); ++i) (in_basis[i] ? basis_deg : other_deg) += mono[i];
    std::string family;
    if (basis_deg == 0 && other_deg <= 2 * v.m)
      family = "degree <= 2m in the non-basis parameters only";
    else if (basis_deg == 1 && other_deg <= v.m)
      family = "first degree in the basis times degree <= m in the non-basis parameters";
    else if (basis_deg == 2 && other_deg == 0)
      family = "second degree in the basis parameters only";
    if (family.empty()) continue;
    out.passed = false;
    out.violations.push_back(out.remainder.monomial_string(mono) + " (" + to_string(c) + "): " + family);
  }
  for (const auto& [mono, c] : out.half_square.terms()) {
    (void)c;
    ++out.checked_terms;
  }
  return out;
}

struct IndependenceReport {
  bool independent = false;
  bool out_of_lemma_scope = false;
  Rational gram_determinant;
  Rational w_determinant;
  std::size_t rank = 0;
};

// (k)_j = k (k-1) ... (k-j+1)
inline Rational falling_factorial(long k, long j) {
  Rational out = 1;
  for (long i = 0; i < j; ++i) out *= k - i;
  return out;
}

// d^j/dt^j Bin(M, t) at outcome x
inline Rational binomial_pmf_derivative(unsigned M, unsigned x, const Rational& t, unsigned j) {
  // t^x (1-t)^(M-x) differentiated by Leibniz
  Rational total = 0;
  for (unsigned a = 0; a <= j; ++a) {
    unsigned b = j - a;
    if (a > x || b > M - x) continue;
    Rational term = Rational(binomial(j, a)) * falling_factorial(x, a) * power(t, x - a) * falling_factorial(M - x, b) *
                    power(1 - t, M - x - b);
    if (b % 2 == 1) term = -term;
    total += term;
  }
  return total * Rational(binomial(M, x));
}

// W from the moment identities of p, dp/dt at each theta_i and d2p/dt2 at theta_N
inline RationalMatrix lemma_w_matrix(const std::vector<Rational>& theta) {
  const std::size_t n = theta.size(), size = 2 * n + 1;
  RationalMatrix w(size, size, Rational(0));
  for (std::size_t row = 0; row < size; ++row) {
    const long k = static_cast<long>(row);
    for (std::size_t i = 0; i < n; ++i) {
      w(row, i) = power(theta[i], k);
      if (k >= 1) w(row, n + i) = falling_factorial(k, 1) * power(theta[i], k - 1);
    }
    if (k >= 2) w(row, 2 * n) = falling_factorial(k, 2) * power(theta[n - 1], k - 2);
  }
  return w;
}

inline Rational lemma_w_product(const std::vector<Rational>& theta) {
  const std::size_t n = theta.size();
  Rational out = 1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j + 1 < n; ++j) out *= power(theta[i] - theta[j], 4);
    out *= power(theta[i] - theta[n - 1], 6);
  }
  return out;
}

inline std::vector<Observable> binomial_family(const Space& space, unsigned M, const std::vector<Rational>& theta) {
  std::vector<Observable> out;
  for (unsigned j = 0; j <= 1; ++j)
    for (const auto& t : theta) {
      Observable o = zero_observable(space);
      for (unsigned x = 0; x <= M; ++x) o.coords[x] = binomial_pmf_derivative(M, x, t, j);
      out.push_back(o);
    }
  Observable o = zero_observable(space);
  for (unsigned x = 0; x <= M; ++x) o.coords[x] = binomial_pmf_derivative(M, x, theta.back(), 2);
  out.push_back(o);
  return out;
}

inline IndependenceReport binomial_family_independence(unsigned M, const std::vector<Rational>& theta) {
  if (theta.empty()) throw Error(ErrorKind::Precondition, "binomial_family_independence needs at least one theta");
  for (const auto& t : theta)
    if (t < 0 || t > 1) throw Error(ErrorKind::Precondition, "theta values must lie in [0,1]");
  IndependenceReport out;
  out.out_of_lemma_scope = 2 * theta.size() > M;
  std::vector<std::string> outcomes;
  std::vector<Rational> weights;
  for (unsigned x = 0; x <= M; ++x) {
    outcomes.push_back(std::to_string(x));
    weights.push_back(Rational(1, M + 1));
  }
  Space space = ObservableSpace::finite(outcomes, weights);
  RationalMatrix g = gram(space, binomial_family(space, M, theta));
  out.gram_determinant = determinant(g);
  out.rank = rank(g);
  out.independent = out.gram_determinant != 0;
  out.w_determinant = determinant(lemma_w_matrix(theta));
  return out;
}

}  // namespace rlct
