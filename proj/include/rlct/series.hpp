#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rlct/error.hpp"
#include "rlct/rational.hpp"

namespace rlct {

inline constexpr std::size_t kMaxVars = 16;
inline constexpr int kUnbounded = std::numeric_limits<int>::max() / 4;

struct Monomial {
  std::array<std::uint8_t, kMaxVars> e{};

  std::uint8_t& operator[](std::size_t i) { return e[i]; }
  std::uint8_t operator[](std::size_t i) const { return e[i]; }
  auto operator<=>(const Monomial&) const = default;

  bool is_one() const {
    for (auto x : e)
      if (x != 0) return false;
    return true;
  }
  int total() const {
    int t = 0;
    for (auto x : e) t += x;
    return t;
  }
};

inline Monomial operator+(const Monomial& a, const Monomial& b) {
  Monomial out;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    int s = a.e[i] + b.e[i];
    if (s > 255) throw Error(ErrorKind::Precondition, "exponent exceeds 255");
    out.e[i] = static_cast<std::uint8_t>(s);
  }
  return out;
}

struct VarSet {
  std::vector<std::string> theta;
  std::vector<std::string> tau;

  std::size_t d1() const { return theta.size(); }
  std::size_t d2() const { return tau.size(); }
  std::size_t size() const { return theta.size() + tau.size(); }

  void validate() const {
    if (theta.empty()) throw Error(ErrorKind::VarMismatch, "at least one theta variable is required");
    if (size() > kMaxVars) throw Error(ErrorKind::VarMismatch, "more than 16 variables");
    std::set<std::string> seen;
    for (const auto* group : {&theta, &tau})
      for (const auto& n : *group) {
        if (n.empty()) throw Error(ErrorKind::VarMismatch, "empty variable name");
        if (!seen.insert(n).second) throw Error(ErrorKind::VarMismatch, "duplicate variable name '" + n + "'");
      }
  }

  bool operator==(const VarSet&) const = default;
};

class SeriesRing {
 public:
  explicit SeriesRing(VarSet vars) : vars_(std::move(vars)) {
    vars_.validate();
    theta_weight_.assign(vars_.size(), 0);
    tau_weight_.assign(vars_.size(), 0);
    for (std::size_t i = 0; i < vars_.size(); ++i) (i < vars_.d1() ? theta_weight_ : tau_weight_)[i] = 1;
  }

  SeriesRing(VarSet vars, std::vector<int> theta_weight, std::vector<int> tau_weight)
      : vars_(std::move(vars)), theta_weight_(std::move(theta_weight)), tau_weight_(std::move(tau_weight)) {
    vars_.validate();
    if (theta_weight_.size() != vars_.size() || tau_weight_.size() != vars_.size())
      throw Error(ErrorKind::VarMismatch, "grading has wrong length");
  }

  const VarSet& vars() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  std::size_t d1() const { return vars_.d1(); }
  std::size_t d2() const { return vars_.d2(); }
  bool is_theta(std::size_t i) const { return i < vars_.d1(); }
  const std::string& name(std::size_t i) const { return i < d1() ? vars_.theta[i] : vars_.tau[i - d1()]; }
  const std::vector<int>& theta_weights() const { return theta_weight_; }
  const std::vector<int>& tau_weights() const { return tau_weight_; }

  std::optional<std::size_t> index_of(std::string_view n) const {
    for (std::size_t i = 0; i < size(); ++i)
      if (name(i) == n) return i;
    return std::nullopt;
  }

  std::size_t require_index(std::string_view n) const {
    auto i = index_of(n);
    if (!i) throw Error(ErrorKind::VarMismatch, "unknown variable '" + std::string(n) + "'");
    return *i;
  }

  int theta_degree(const Monomial& m) const {
    int d = 0;
    for (std::size_t i = 0; i < size(); ++i) d += theta_weight_[i] * m[i];
    return d;
  }
  int tau_degree(const Monomial& m) const {
    int d = 0;
    for (std::size_t i = 0; i < size(); ++i) d += tau_weight_[i] * m[i];
    return d;
  }

  bool operator==(const SeriesRing&) const = default;

 private:
  VarSet vars_;
  std::vector<int> theta_weight_;
  std::vector<int> tau_weight_;
};

using Ring = std::shared_ptr<const SeriesRing>;

inline Ring make_ring(VarSet vars) { return std::make_shared<const SeriesRing>(std::move(vars)); }

inline bool same_ring(const Ring& a, const Ring& b) { return a.get() == b.get() || *a == *b; }

// ring of default-constructed series
inline const Ring& placeholder_ring() {
  static const Ring ring = make_ring(VarSet{{"_"}, {}});
  return ring;
}

class ParamSeries {
 public:
  using Terms = std::map<Monomial, Rational>;

  ParamSeries() : ParamSeries(placeholder_ring()) {}

  explicit ParamSeries(Ring ring, int theta_bound = kUnbounded, int tau_bound = kUnbounded)
      : ring_(std::move(ring)), dtheta_(theta_bound), dtau_(tau_bound) {
    if (dtheta_ < 0 || dtau_ < 0) throw Error(ErrorKind::Precondition, "negative truncation bound");
  }

  static ParamSeries constant(Ring ring, const Rational& c, int theta_bound = kUnbounded, int tau_bound = kUnbounded) {
    ParamSeries s(std::move(ring), theta_bound, tau_bound);
    s.add_term(Monomial{}, c);
    return s;
  }

  static ParamSeries variable(Ring ring, std::string_view name, int theta_bound = kUnbounded, int tau_bound = kUnbounded) {
    std::size_t i = ring->require_index(name);
    return variable(std::move(ring), i, theta_bound, tau_bound);
  }

  static ParamSeries variable(Ring ring, std::size_t index, int theta_bound = kUnbounded, int tau_bound = kUnbounded) {
    ParamSeries s(std::move(ring), theta_bound, tau_bound);
    Monomial m;
    m[index] = 1;
    s.add_term(m, Rational(1));
    return s;
  }

  static ParamSeries monomial(Ring ring, const Monomial& m, const Rational& c, int theta_bound = kUnbounded,
                              int tau_bound = kUnbounded) {
    ParamSeries s(std::move(ring), theta_bound, tau_bound);
    s.add_term(m, c);
    return s;
  }

  const Ring& ring() const { return ring_; }
  int theta_bound() const { return dtheta_; }
  int tau_bound() const { return dtau_; }
  bool is_polynomial() const { return dtheta_ >= kUnbounded && dtau_ >= kUnbounded; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  bool within_bounds(const Monomial& m) const {
    return ring_->theta_degree(m) <= dtheta_ && ring_->tau_degree(m) <= dtau_;
  }

  Rational coefficient(const Monomial& m) const {
    if (!within_bounds(m))
      throw Error(ErrorKind::OutOfTruncation, "exponent " + format_exponent(m) + " lies beyond truncation (" +
                                                  bound_string(dtheta_) + ", " + bound_string(dtau_) + ")");
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0 || !within_bounds(m)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  ParamSeries truncated(int theta_bound, int tau_bound) const {
    ParamSeries out(ring_, std::min(theta_bound, dtheta_), std::min(tau_bound, dtau_));
    for (const auto& [m, c] : terms_) out.add_term(m, c);
    return out;
  }

  // lowest weighted degree among stored terms; kUnbounded for the zero series
  int theta_valuation() const {
    int v = kUnbounded;
    for (const auto& [m, c] : terms_) v = std::min(v, ring_->theta_degree(m));
    return v;
  }
  int tau_valuation() const {
    int v = kUnbounded;
    for (const auto& [m, c] : terms_) v = std::min(v, ring_->tau_degree(m));
    return v;
  }

  ParamSeries& operator+=(const ParamSeries& b) {
    require_compatible(b);
    dtheta_ = std::min(dtheta_, b.dtheta_);
    dtau_ = std::min(dtau_, b.dtau_);
    drop_out_of_bounds();
    for (const auto& [m, c] : b.terms_) add_term(m, c);
    return *this;
  }

  ParamSeries& operator-=(const ParamSeries& b) {
    require_compatible(b);
    dtheta_ = std::min(dtheta_, b.dtheta_);
    dtau_ = std::min(dtau_, b.dtau_);
    drop_out_of_bounds();
    for (const auto& [m, c] : b.terms_) add_term(m, -c);
    return *this;
  }

  ParamSeries& operator*=(const Rational& c) {
    if (c == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, x] : terms_) x *= c;
    return *this;
  }

  friend ParamSeries operator*(const ParamSeries& a, const ParamSeries& b) {
    a.require_compatible(b);
    const SeriesRing& ring = *a.ring_;
    ParamSeries out(a.ring_, std::min(a.dtheta_, b.dtheta_), std::min(a.dtau_, b.dtau_));
    struct Entry {
      const Monomial* m;
      const Rational* c;
      int dt;
      int du;
    };
    auto index = [&](const ParamSeries& s) {
      std::vector<Entry> v;
      v.reserve(s.terms_.size());
      for (const auto& [m, c] : s.terms_) v.push_back({&m, &c, ring.theta_degree(m), ring.tau_degree(m)});
      std::sort(v.begin(), v.end(), [](const Entry& x, const Entry& y) { return x.dt < y.dt; });
      return v;
    };
    std::vector<Entry> ea = index(a), eb = index(b);
    Rational prod;
    for (const auto& x : ea) {
      if (x.dt > out.dtheta_) break;
      for (const auto& y : eb) {
        if (x.dt + y.dt > out.dtheta_) break;
        if (x.du + y.du > out.dtau_) continue;
        prod = *x.c * *y.c;
        auto [it, inserted] = out.terms_.try_emplace(*x.m + *y.m, prod);
        if (!inserted) it->second += prod;
      }
    }
    for (auto it = out.terms_.begin(); it != out.terms_.end();) it = it->second == 0 ? out.terms_.erase(it) : std::next(it);
    return out;
  }

  ParamSeries& operator*=(const ParamSeries& b) {
    *this = *this * b;
    return *this;
  }

  friend ParamSeries operator+(ParamSeries a, const ParamSeries& b) { return a += b; }
  friend ParamSeries operator-(ParamSeries a, const ParamSeries& b) { return a -= b; }
  friend ParamSeries operator*(ParamSeries a, const Rational& c) { return a *= c; }
  friend ParamSeries operator*(const Rational& c, ParamSeries a) { return a *= c; }
  friend ParamSeries operator-(ParamSeries a) { return a *= Rational(-1); }

  friend bool operator==(const ParamSeries& a, const ParamSeries& b) {
    return same_ring(a.ring_, b.ring_) && a.dtheta_ == b.dtheta_ && a.dtau_ == b.dtau_ && a.terms_ == b.terms_;
  }

  // equality of the known parts over the common truncation
  bool agrees_with(const ParamSeries& b) const {
    int dt = std::min(dtheta_, b.dtheta_), du = std::min(dtau_, b.dtau_);
    return truncated(dt, du).terms_ == b.truncated(dt, du).terms_;
  }

  ParamSeries add_constant(const Rational& c) const {
    ParamSeries out = *this;
    out.add_term(Monomial{}, c);
    return out;
  }

  template <class T>
  T evaluate(const std::vector<T>& point) const {
    if (point.size() != ring_->size()) throw Error(ErrorKind::VarMismatch, "evaluation point has wrong length");
    T total = T(0);
    for (const auto& [m, c] : terms_) {
      T term = convert<T>(c);
      for (std::size_t i = 0; i < ring_->size(); ++i)
        for (int k = 0; k < m[i]; ++k) term *= point[i];
      total += term;
    }
    return total;
  }

  std::string format_exponent(const Monomial& m) const {
    std::string out;
    for (std::size_t i = 0; i < ring_->size(); ++i) {
      if (i) out += ",";
      out += std::to_string(m[i]);
    }
    return out;
  }

  std::string monomial_string(const Monomial& m) const {
    std::string out;
    for (std::size_t i = 0; i < ring_->size(); ++i) {
      if (m[i] == 0) continue;
      if (!out.empty()) out += "*";
      out += ring_->name(i);
      if (m[i] > 1) out += "^" + std::to_string(m[i]);
    }
    return out;
  }

  // terms ordered by total degree, then by the stored order
  std::vector<std::pair<Monomial, Rational>> sorted_terms() const {
    std::vector<std::pair<Monomial, Rational>> v(terms_.begin(), terms_.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& x, const auto& y) {
      if (x.first.total() != y.first.total()) return x.first.total() < y.first.total();
      return x.first > y.first;
    });
    return v;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : sorted_terms()) {
      Rational mag = abs(c);
      if (first) {
        if (c < 0) out += "-";
      } else {
        out += c < 0 ? " - " : " + ";
      }
      first = false;
      std::string mono = monomial_string(m);
      if (mono.empty()) {
        out += mag.get_str();
      } else {
        if (mag != 1) out += mag.get_str() + "*";
        out += mono;
      }
    }
    return out;
  }

  static std::string bound_string(int b) { return b >= kUnbounded ? "inf" : std::to_string(b); }

 private:
  template <class T>
  static T convert(const Rational& c) {
    if constexpr (std::is_same_v<T, Rational>)
      return c;
    else
      return static_cast<T>(c.get_d());
  }

  void require_compatible(const ParamSeries& b) const {
    if (!same_ring(ring_, b.ring_)) throw Error(ErrorKind::VarMismatch, "series over different variable sets");
  }

  void drop_out_of_bounds() {
    for (auto it = terms_.begin(); it != terms_.end();) it = within_bounds(it->first) ? std::next(it) : terms_.erase(it);
  }

  Ring ring_;
  int dtheta_;
  int dtau_;
  Terms terms_;
};

inline bool is_unit(const ParamSeries& s) { return s.constant_term() != 0; }

class NotAUnitError : public Error {
 public:
  explicit NotAUnitError(ParamSeries offending)
      : Error(ErrorKind::NotAUnit, "series has zero constant term: " + offending.to_string()),
        offending_(std::move(offending)) {}
  const ParamSeries& offending() const { return offending_; }

 private:
  ParamSeries offending_;
};

namespace detail {

// powers of u die out only when every term carries positive degree in a bounded grading
inline void require_nilpotent_by_truncation(const ParamSeries& u, const char* op) {
  const SeriesRing& ring = *u.ring();
  for (const auto& [m, c] : u.terms()) {
    bool dies = (ring.theta_degree(m) > 0 && u.theta_bound() < kUnbounded) ||
                (ring.tau_degree(m) > 0 && u.tau_bound() < kUnbounded);
    if (!dies)
      throw Error(ErrorKind::Precondition, std::string(op) + ": series must be truncated in every direction it has terms ('" +
                                               u.monomial_string(m) + "' never vanishes)");
  }
}

}  // namespace detail

inline ParamSeries log1p(const ParamSeries& u, int order) {
  if (u.constant_term() != 0) throw Error(ErrorKind::NotNilpotent, "log1p argument has constant term " + to_string(u.constant_term()));
  ParamSeries out(u.ring(), u.theta_bound(), u.tau_bound());
  ParamSeries power = u;
  for (int k = 1; k <= order && !power.is_zero(); ++k) {
    ParamSeries term = power * Rational((k % 2 == 1) ? 1 : -1, k);
    out += term;
    power = power * u;
  }
  return out;
}

inline ParamSeries log1p(const ParamSeries& u) {
  if (u.constant_term() != 0) throw Error(ErrorKind::NotNilpotent, "log1p argument has constant term " + to_string(u.constant_term()));
  detail::require_nilpotent_by_truncation(u, "log1p");
  return log1p(u, std::numeric_limits<int>::max());
}

inline ParamSeries expm1(const ParamSeries& u) {
  if (u.constant_term() != 0) throw Error(ErrorKind::NotNilpotent, "expm1 argument has constant term " + to_string(u.constant_term()));
  detail::require_nilpotent_by_truncation(u, "expm1");
  ParamSeries out(u.ring(), u.theta_bound(), u.tau_bound());
  ParamSeries power = u;
  for (int k = 1; !power.is_zero(); ++k) {
    out += power * (Rational(1) / factorial(static_cast<unsigned>(k)));
    power = power * u;
  }
  return out;
}

inline ParamSeries invert(const ParamSeries& a) {
  Rational c0 = a.constant_term();
  if (c0 == 0) throw NotAUnitError(a);
  ParamSeries u = a * (1 / c0);
  u.add_term(Monomial{}, Rational(-1));
  detail::require_nilpotent_by_truncation(u, "invert");
  ParamSeries out = ParamSeries::constant(a.ring(), Rational(1), a.theta_bound(), a.tau_bound());
  ParamSeries power = ParamSeries::constant(a.ring(), Rational(1), a.theta_bound(), a.tau_bound());
  ParamSeries neg_u = -u;
  while (true) {
    power = power * neg_u;
    if (power.is_zero()) break;
    out += power;
  }
  return out * (1 / c0);
}

inline ParamSeries reciprocal(const ParamSeries& a) { return invert(a); }

inline ParamSeries power(const ParamSeries& a, unsigned k) {
  ParamSeries out = ParamSeries::constant(a.ring(), Rational(1), a.theta_bound(), a.tau_bound());
  for (unsigned i = 0; i < k; ++i) out = out * a;
  return out;
}

// images[i] is the image of source variable i, expressed over target
inline ParamSeries substitute(const ParamSeries& a, const Ring& target, const std::vector<ParamSeries>& images) {
  const SeriesRing& src = *a.ring();
  if (images.size() != src.size()) throw Error(ErrorKind::VarMismatch, "substitution needs one image per variable");
  std::vector<int> max_exp(src.size(), 0);
  for (const auto& [m, c] : a.terms())
    for (std::size_t i = 0; i < src.size(); ++i) max_exp[i] = std::max<int>(max_exp[i], m[i]);
  int dtheta = a.theta_bound(), dtau = a.tau_bound();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const ParamSeries& img = images[i];
    if (!same_ring(img.ring(), target)) throw Error(ErrorKind::VarMismatch, "image of '" + src.name(i) + "' is over another ring");
    if (max_exp[i] == 0) continue;
    if (a.theta_bound() < kUnbounded && img.theta_valuation() < src.theta_weights()[i])
      throw Error(ErrorKind::UnsafeSubstitution, "image of '" + src.name(i) + "' has theta-valuation " +
                                                     std::to_string(img.theta_valuation()) + " below its weight " +
                                                     std::to_string(src.theta_weights()[i]) + " in a truncated series");
    if (a.tau_bound() < kUnbounded && img.tau_valuation() < src.tau_weights()[i])
      throw Error(ErrorKind::UnsafeSubstitution, "image of '" + src.name(i) + "' has tau-valuation " +
                                                     std::to_string(img.tau_valuation()) + " below its weight " +
                                                     std::to_string(src.tau_weights()[i]) + " in a truncated series");
    dtheta = std::min(dtheta, img.theta_bound());
    dtau = std::min(dtau, img.tau_bound());
  }
  std::vector<std::vector<ParamSeries>> powers(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    ParamSeries img = images[i].truncated(dtheta, dtau);
    powers[i].push_back(ParamSeries::constant(target, Rational(1), dtheta, dtau));
    for (int k = 1; k <= max_exp[i]; ++k) powers[i].push_back(powers[i].back() * img);
  }
  ParamSeries out(target, dtheta, dtau);
  for (const auto& [m, c] : a.terms()) {
    ParamSeries term = ParamSeries::constant(target, c, dtheta, dtau);
    for (std::size_t i = 0; i < src.size(); ++i)
      if (m[i]) term = term * powers[i][m[i]];
    out += term;
  }
  return out;
}

inline std::vector<ParamSeries> identity_images(const Ring& ring) {
  std::vector<ParamSeries> out;
  for (std::size_t i = 0; i < ring->size(); ++i) out.push_back(ParamSeries::variable(ring, i));
  return out;
}

// same-ring substitution; unmapped variables map to themselves
inline ParamSeries substitute(const ParamSeries& a, const std::map<std::string, ParamSeries>& map) {
  std::vector<ParamSeries> images = identity_images(a.ring());
  for (const auto& [name, img] : map) images[a.ring()->require_index(name)] = img;
  return substitute(a, a.ring(), images);
}

// terms supported on group (all other theta exponents zero) with group-degree exactly m
inline ParamSeries homogeneous_part(const ParamSeries& a, const std::vector<std::size_t>& group, int m) {
  const SeriesRing& ring = *a.ring();
  std::vector<bool> in_group(ring.size(), false);
  for (std::size_t g : group) {
    if (g >= ring.d1()) throw Error(ErrorKind::VarMismatch, "homogeneous_part group must contain theta variables only");
    in_group[g] = true;
  }
  if (m > a.theta_bound()) throw Error(ErrorKind::OutOfTruncation, "degree " + std::to_string(m) + " exceeds theta truncation");
  ParamSeries out(a.ring(), kUnbounded, a.tau_bound());
  for (const auto& [mono, c] : a.terms()) {
    int deg = 0;
    bool ok = true;
    for (std::size_t i = 0; i < ring.d1(); ++i) {
      if (in_group[i])
        deg += mono[i];
      else if (mono[i])
        ok = false;
    }
    if (ok && deg == m) out.add_term(mono, c);
  }
  return out;
}

// coefficient of a theta-monomial, kept as a series in the tau variables
inline ParamSeries theta_coefficient(const ParamSeries& a, const Monomial& theta_part) {
  const SeriesRing& ring = *a.ring();
  Monomial probe = theta_part;
  for (std::size_t i = ring.d1(); i < ring.size(); ++i) probe[i] = 0;
  if (ring.theta_degree(probe) > a.theta_bound())
    throw Error(ErrorKind::OutOfTruncation, "theta-monomial " + a.monomial_string(probe) + " lies beyond truncation");
  ParamSeries out(a.ring(), kUnbounded, a.tau_bound());
  for (const auto& [m, c] : a.terms()) {
    bool match = true;
    for (std::size_t i = 0; i < ring.d1(); ++i)
      if (m[i] != probe[i]) {
        match = false;
        break;
      }
    if (!match) continue;
    Monomial rest = m;
    for (std::size_t i = 0; i < ring.d1(); ++i) rest[i] = 0;
    out.add_term(rest, c);
  }
  return out;
}

// keep terms with zero exponent on every listed variable
inline ParamSeries restrict_to_zero(const ParamSeries& a, const std::vector<std::size_t>& vars) {
  ParamSeries out(a.ring(), a.theta_bound(), a.tau_bound());
  for (const auto& [m, c] : a.terms()) {
    bool keep = true;
    for (std::size_t v : vars)
      if (m[v]) keep = false;
    if (keep) out.add_term(m, c);
  }
  return out;
}

inline std::vector<std::size_t> tau_indices(const SeriesRing& ring) {
  std::vector<std::size_t> out;
  for (std::size_t i = ring.d1(); i < ring.size(); ++i) out.push_back(i);
  return out;
}

inline std::vector<std::size_t> theta_indices(const SeriesRing& ring) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ring.d1(); ++i) out.push_back(i);
  return out;
}

// all monomials of total degree t in the listed variables, lexicographic (descending) order
inline std::vector<Monomial> monomials_of_degree(const std::vector<std::size_t>& vars, int t) {
  std::vector<Monomial> out;
  if (vars.empty()) {
    if (t == 0) out.push_back(Monomial{});
    return out;
  }
  Monomial m;
  auto rec = [&](auto&& self, std::size_t k, int remaining) -> void {
    if (k + 1 == vars.size()) {
      m[vars[k]] = static_cast<std::uint8_t>(remaining);
      out.push_back(m);
      m[vars[k]] = 0;
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      m[vars[k]] = static_cast<std::uint8_t>(e);
      self(self, k + 1, remaining - e);
    }
    m[vars[k]] = 0;
  };
  rec(rec, 0, t);
  return out;
}

}  // namespace rlct
