#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rlct/error.hpp"
#include "rlct/observable.hpp"
#include "rlct/series.hpp"

namespace rlct {

// sum over basis elements b of e_b * comps[b]
class ObsSeries {
 public:
  ObsSeries(Space space, Ring ring, int theta_bound = kUnbounded, int tau_bound = kUnbounded) : space_(std::move(space)) {
    for (std::size_t b = 0; b < space_->dim(); ++b) comps_.emplace_back(ring, theta_bound, tau_bound);
  }

  ObsSeries(Space space, std::vector<ParamSeries> comps) : space_(std::move(space)), comps_(std::move(comps)) {
    if (comps_.size() != space_->dim()) throw Error(ErrorKind::SpaceMismatch, "one component per basis element is required");
    for (const auto& c : comps_)
      if (!same_ring(c.ring(), comps_[0].ring())) throw Error(ErrorKind::VarMismatch, "components over different rings");
  }

  static ObsSeries from(const Observable& o, const ParamSeries& s) {
    std::vector<ParamSeries> comps;
    for (const auto& c : o.coords) comps.push_back(s * c);
    return ObsSeries(o.space, std::move(comps));
  }

  const Space& space() const { return space_; }
  const Ring& ring() const { return comps_.at(0).ring(); }
  const std::vector<ParamSeries>& comps() const { return comps_; }
  std::vector<ParamSeries>& comps() { return comps_; }
  const ParamSeries& component(std::size_t b) const { return comps_.at(b); }

  int theta_bound() const {
    int b = kUnbounded;
    for (const auto& c : comps_) b = std::min(b, c.theta_bound());
    return b;
  }
  int tau_bound() const {
    int b = kUnbounded;
    for (const auto& c : comps_) b = std::min(b, c.tau_bound());
    return b;
  }

  std::set<Monomial> support() const {
    std::set<Monomial> out;
    for (const auto& c : comps_)
      for (const auto& [m, x] : c.terms()) out.insert(m);
    return out;
  }

  Observable coefficient(const Monomial& m) const {
    Observable o = zero_observable(space_);
    for (std::size_t b = 0; b < comps_.size(); ++b) o.coords[b] = comps_[b].coefficient(m);
    return o;
  }

  bool is_as_zero() const {
    for (const auto& m : support())
      if (!rlct::is_as_zero(space_, coefficient(m))) return false;
    return true;
  }

  ObsSeries truncated(int theta_bound, int tau_bound) const {
    return map([&](const ParamSeries& c) { return c.truncated(theta_bound, tau_bound); });
  }

  ObsSeries& operator+=(const ObsSeries& o) {
    require_same_space(space_, o.space_);
    for (std::size_t b = 0; b < comps_.size(); ++b) comps_[b] += o.comps_[b];
    return *this;
  }
  ObsSeries& operator-=(const ObsSeries& o) {
    require_same_space(space_, o.space_);
    for (std::size_t b = 0; b < comps_.size(); ++b) comps_[b] -= o.comps_[b];
    return *this;
  }
  friend ObsSeries operator+(ObsSeries a, const ObsSeries& b) { return a += b; }
  friend ObsSeries operator-(ObsSeries a, const ObsSeries& b) { return a -= b; }
  friend ObsSeries operator*(const ParamSeries& s, const ObsSeries& a) {
    return a.map([&](const ParamSeries& c) { return s * c; });
  }
  friend ObsSeries operator*(const Rational& s, const ObsSeries& a) {
    return a.map([&](const ParamSeries& c) { return c * s; });
  }

  template <class F>
  ObsSeries map(F&& f) const {
    std::vector<ParamSeries> out;
    out.reserve(comps_.size());
    for (const auto& c : comps_) out.push_back(f(c));
    return ObsSeries(space_, std::move(out));
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t b = 0; b < comps_.size(); ++b) {
      if (comps_[b].is_zero()) continue;
      if (!out.empty()) out += " + ";
      out += "[" + space_->labels()[b] + "](" + comps_[b].to_string() + ")";
    }
    return out.empty() ? "0" : out;
  }

 private:
  Space space_;
  std::vector<ParamSeries> comps_;
};

inline ObsSeries substitute(const ObsSeries& a, const Ring& target, const std::vector<ParamSeries>& images) {
  return a.map([&](const ParamSeries& c) { return substitute(c, target, images); });
}

inline ObsSeries substitute(const ObsSeries& a, const std::map<std::string, ParamSeries>& map) {
  return a.map([&](const ParamSeries& c) { return substitute(c, map); });
}

inline ObsSeries homogeneous_part(const ObsSeries& a, const std::vector<std::size_t>& group, int m) {
  return a.map([&](const ParamSeries& c) { return homogeneous_part(c, group, m); });
}

inline ObsSeries theta_coefficient(const ObsSeries& a, const Monomial& theta_part) {
  return a.map([&](const ParamSeries& c) { return theta_coefficient(c, theta_part); });
}

inline ObsSeries restrict_to_zero(const ObsSeries& a, const std::vector<std::size_t>& vars) {
  return a.map([&](const ParamSeries& c) { return restrict_to_zero(c, vars); });
}

inline ParamSeries expectation(const ObsSeries& a) {
  const auto& e = a.space()->expectation();
  ParamSeries out(a.ring(), a.theta_bound(), a.tau_bound());
  for (std::size_t b = 0; b < e.size(); ++b)
    if (e[b] != 0) out += a.component(b) * e[b];
  return out;
}

inline ParamSeries expect_product(const ObsSeries& a, const ObsSeries& c) {
  require_same_space(a.space(), c.space());
  const RationalMatrix& g = a.space()->pair_expectation();
  ParamSeries out(a.ring(), std::min(a.theta_bound(), c.theta_bound()), std::min(a.tau_bound(), c.tau_bound()));
  for (std::size_t i = 0; i < g.rows(); ++i) {
    if (a.component(i).is_zero()) continue;
    ParamSeries weighted(a.ring(), c.theta_bound(), c.tau_bound());
    for (std::size_t j = 0; j < g.cols(); ++j)
      if (g(i, j) != 0 && !c.component(j).is_zero()) weighted += c.component(j) * g(i, j);
    if (!weighted.is_zero()) out += a.component(i) * weighted;
  }
  return out;
}

// observable obtained by evaluating every component at a rational point
inline Observable evaluate(const ObsSeries& a, const std::vector<Rational>& point) {
  Observable o = zero_observable(a.space());
  for (std::size_t b = 0; b < a.comps().size(); ++b) o.coords[b] = a.component(b).evaluate(point);
  return o;
}

}  // namespace rlct
