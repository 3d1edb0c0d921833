#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <cmath>

#include "rlct/error.hpp"
#include "rlct/series.hpp"

namespace rlct {

// double-precision evaluator for an exact series, used by the sampling code
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;

  explicit CompiledPolynomial(const ParamSeries& s) : nvars_(s.ring()->size()) {
    for (const auto& [m, c] : s.terms()) {
      Term t{c.get_d(), {}};
      for (std::size_t i = 0; i < nvars_; ++i)
        if (m[i]) t.factors.emplace_back(i, m[i]);
      terms_.push_back(std::move(t));
    }
  }

  std::size_t nvars() const { return nvars_; }
  std::size_t size() const { return terms_.size(); }

  double operator()(const std::vector<double>& x) const {
    double total = 0;
    for (const auto& t : terms_) {
      double v = t.coef;
      for (const auto& [i, e] : t.factors)
        for (int k = 0; k < e; ++k) v *= x[i];
      total += v;
    }
    return total;
  }

 private:
  struct Term {
    double coef;
    std::vector<std::pair<std::size_t, int>> factors;
  };
  std::size_t nvars_ = 0;
  std::vector<Term> terms_;
};

// sum_x q(x) log(q(x)/p(x)); throws OutOfDomain when some p(x) <= 0
inline double discrete_kl(const std::vector<CompiledPolynomial>& pmf, const std::vector<double>& q,
                          const std::vector<double>& point) {
  double k = 0;
  for (std::size_t x = 0; x < pmf.size(); ++x) {
    double p = pmf[x](point);
    if (!(p > 0)) throw Error(ErrorKind::OutOfDomain, "p(x=" + std::to_string(x) + ") = " + std::to_string(p) + " at the point");
    k += q[x] * std::log(q[x] / p);
  }
  return k;
}

}  // namespace rlct
