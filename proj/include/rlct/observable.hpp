#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rlct/error.hpp"
#include "rlct/matrix.hpp"
#include "rlct/rational.hpp"

namespace rlct {

enum class SpaceKind { Finite, Moment };

class ObservableSpace;
using Space = std::shared_ptr<const ObservableSpace>;

struct Observable {
  Space space;
  std::vector<Rational> coords;

  std::size_t dim() const { return coords.size(); }
  bool is_zero_vector() const {
    for (const auto& c : coords)
      if (c != 0) return false;
    return true;
  }
};

class ObservableSpace {
 public:
  using Exponents = std::vector<int>;

  static Space finite(std::vector<std::string> outcomes, std::vector<Rational> weights) {
    if (outcomes.empty() || outcomes.size() != weights.size())
      throw Error(ErrorKind::InvalidSpace, "outcome and weight lists must be non-empty and of equal length");
    Rational total = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0)
        throw Error(ErrorKind::InvalidSpace, "weight of outcome '" + outcomes[i] + "' is not positive");
      total += weights[i];
    }
    if (total != 1) throw Error(ErrorKind::InvalidSpace, "weights sum to " + to_string(total) + ", not 1");
    auto s = std::shared_ptr<ObservableSpace>(new ObservableSpace());
    s->kind_ = SpaceKind::Finite;
    s->labels_ = std::move(outcomes);
    s->expectation_ = weights;
    const std::size_t n = weights.size();
    s->gram_ = RationalMatrix(n, n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) s->gram_(i, i) = weights[i];
    return s;
  }

  // basis: monomials of degree <= max_degree in base_vars, ordered by degree then
  // lexicographically (larger exponent on earlier variables first)
  static Space moment(std::vector<std::string> base_vars, int max_degree, const std::map<Exponents, Rational>& moments) {
    if (base_vars.empty() || max_degree < 0)
      throw Error(ErrorKind::InvalidSpace, "moment space needs at least one base variable and max_degree >= 0");
    auto s = std::shared_ptr<ObservableSpace>(new ObservableSpace());
    s->kind_ = SpaceKind::Moment;
    s->base_vars_ = std::move(base_vars);
    s->max_degree_ = max_degree;
    const std::size_t nv = s->base_vars_.size();
    s->monomials_ = monomials_up_to(nv, max_degree);
    for (std::size_t i = 0; i < s->monomials_.size(); ++i) {
      s->index_[s->monomials_[i]] = i;
      s->labels_.push_back(monomial_label(s->base_vars_, s->monomials_[i]));
    }
    auto lookup = [&](const Exponents& e) -> Rational {
      auto it = moments.find(e);
      if (it == moments.end())
        throw Error(ErrorKind::IncompleteMoments, "missing moment E[" + monomial_label(s->base_vars_, e) + "]");
      return it->second;
    };
    for (const auto& e : monomials_up_to(nv, 2 * max_degree)) lookup(e);
    const std::size_t n = s->monomials_.size();
    s->expectation_.resize(n);
    s->gram_ = RationalMatrix(n, n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
      s->expectation_[i] = lookup(s->monomials_[i]);
      for (std::size_t j = 0; j < n; ++j) {
        Exponents sum(nv);
        for (std::size_t v = 0; v < nv; ++v) sum[v] = s->monomials_[i][v] + s->monomials_[j][v];
        s->gram_(i, j) = lookup(sum);
      }
    }
    if (s->expectation_[0] != 1)
      throw Error(ErrorKind::InvalidSpace, "E[1] = " + to_string(s->expectation_[0]) + ", not 1");
    return s;
  }

  SpaceKind kind() const { return kind_; }
  std::size_t dim() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Rational>& expectation() const { return expectation_; }
  const RationalMatrix& pair_expectation() const { return gram_; }
  const std::vector<std::string>& base_vars() const { return base_vars_; }
  int max_degree() const { return max_degree_; }
  const std::vector<Exponents>& monomials() const { return monomials_; }

  std::optional<std::size_t> monomial_index(const Exponents& e) const {
    auto it = index_.find(e);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> outcome_index(const std::string& label) const {
    if (kind_ != SpaceKind::Finite) return std::nullopt;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return i;
    return std::nullopt;
  }

  // basis_i * basis_j as a basis index; nullopt when the product overflows
  std::optional<std::size_t> basis_product(std::size_t i, std::size_t j) const {
    if (kind_ == SpaceKind::Finite) return i == j ? std::optional<std::size_t>(i) : std::nullopt;
    Exponents sum(base_vars_.size());
    for (std::size_t v = 0; v < sum.size(); ++v) sum[v] = monomials_[i][v] + monomials_[j][v];
    return monomial_index(sum);
  }

 private:
  ObservableSpace() = default;

  static std::vector<Exponents> monomials_up_to(std::size_t nv, int degree) {
    std::vector<Exponents> out;
    for (int d = 0; d <= degree; ++d) {
      Exponents e(nv, 0);
      append_degree(out, e, 0, d);
    }
    return out;
  }

  static void append_degree(std::vector<Exponents>& out, Exponents& e, std::size_t v, int remaining) {
    if (v + 1 == e.size()) {
      e[v] = remaining;
      out.push_back(e);
      e[v] = 0;
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      e[v] = k;
      append_degree(out, e, v + 1, remaining - k);
    }
    e[v] = 0;
  }

  static std::string monomial_label(const std::vector<std::string>& vars, const Exponents& e) {
    std::string out;
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      if (!out.empty()) out += "*";
      out += vars[v];
      if (e[v] > 1) out += "^" + std::to_string(e[v]);
    }
    return out.empty() ? "1" : out;
  }

  SpaceKind kind_ = SpaceKind::Finite;
  std::vector<std::string> labels_;
  std::vector<Rational> expectation_;
  RationalMatrix gram_;
  std::vector<std::string> base_vars_;
  int max_degree_ = 0;
  std::vector<Exponents> monomials_;
  std::map<Exponents, std::size_t> index_;
};

inline void require_same_space(const Space& a, const Space& b) {
  if (a.get() != b.get()) throw Error(ErrorKind::SpaceMismatch, "observables belong to different spaces");
}

inline Observable zero_observable(const Space& s) { return {s, std::vector<Rational>(s->dim(), Rational(0))}; }

inline Observable basis_observable(const Space& s, std::size_t i) {
  Observable o = zero_observable(s);
  o.coords.at(i) = 1;
  return o;
}

inline Observable one_observable(const Space& s) {
  if (s->kind() == SpaceKind::Finite) return {s, std::vector<Rational>(s->dim(), Rational(1))};
  return basis_observable(s, 0);
}

inline Observable observable(const Space& s, std::vector<Rational> coords) {
  if (coords.size() != s->dim()) throw Error(ErrorKind::SpaceMismatch, "coordinate vector has wrong length");
  return {s, std::move(coords)};
}

inline Observable operator+(Observable a, const Observable& b) {
  require_same_space(a.space, b.space);
  for (std::size_t i = 0; i < a.coords.size(); ++i) a.coords[i] += b.coords[i];
  return a;
}

inline Observable operator-(Observable a, const Observable& b) {
  require_same_space(a.space, b.space);
  for (std::size_t i = 0; i < a.coords.size(); ++i) a.coords[i] -= b.coords[i];
  return a;
}

inline Observable operator*(const Rational& c, Observable a) {
  for (auto& x : a.coords) x *= c;
  return a;
}

inline Observable operator-(Observable a) {
  for (auto& x : a.coords) x = -x;
  return a;
}

inline bool operator==(const Observable& a, const Observable& b) {
  return a.space.get() == b.space.get() && a.coords == b.coords;
}

inline Observable product(const Observable& a, const Observable& b) {
  require_same_space(a.space, b.space);
  const auto& s = *a.space;
  Observable out = zero_observable(a.space);
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    if (a.coords[i] == 0) continue;
    for (std::size_t j = 0; j < b.coords.size(); ++j) {
      if (b.coords[j] == 0) continue;
      if (s.kind() == SpaceKind::Finite && i != j) continue;
      auto k = s.basis_product(i, j);
      if (!k)
        throw Error(ErrorKind::DegreeOverflow,
                    "product " + s.labels()[i] + " * " + s.labels()[j] + " exceeds degree " + std::to_string(s.max_degree()));
      out.coords[*k] += a.coords[i] * b.coords[j];
    }
  }
  return out;
}

inline Rational expect(const Observable& a) {
  Rational out = 0;
  const auto& e = a.space->expectation();
  for (std::size_t i = 0; i < a.coords.size(); ++i) out += e[i] * a.coords[i];
  return out;
}

inline Rational inner(const Observable& a, const Observable& b) {
  require_same_space(a.space, b.space);
  const auto& g = a.space->pair_expectation();
  Rational out = 0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    if (a.coords[i] == 0) continue;
    for (std::size_t j = 0; j < b.coords.size(); ++j) {
      if (b.coords[j] == 0 || g(i, j) == 0) continue;
      out += a.coords[i] * g(i, j) * b.coords[j];
    }
  }
  return out;
}

inline bool is_as_zero(const Space& s, const Observable& a) {
  require_same_space(s, a.space);
  return inner(a, a) == 0;
}

inline RationalMatrix gram(const Space& s, const std::vector<Observable>& list) {
  for (const auto& o : list) require_same_space(s, o.space);
  RationalMatrix g(list.size(), list.size(), Rational(0));
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = i; j < list.size(); ++j) {
      g(i, j) = inner(list[i], list[j]);
      g(j, i) = g(i, j);
    }
  return g;
}

struct Dependency {
  std::size_t index = 0;
  std::vector<Rational> coefficients;  // over basis_indices
};

struct RankResult {
  std::size_t rank = 0;
  std::vector<std::size_t> basis_indices;
  std::vector<Dependency> dependencies;
};

inline RankResult rank_and_dependencies(const Space& s, const std::vector<Observable>& list) {
  RationalMatrix g = gram(s, list);
  RankResult out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    std::vector<std::size_t> trial = out.basis_indices;
    trial.push_back(i);
    RationalMatrix sub(trial.size(), trial.size(), Rational(0));
    for (std::size_t a = 0; a < trial.size(); ++a)
      for (std::size_t b = 0; b < trial.size(); ++b) sub(a, b) = g(trial[a], trial[b]);
    if (determinant(sub) != 0) out.basis_indices = std::move(trial);
  }
  out.rank = out.basis_indices.size();
  const std::size_t r = out.rank;
  RationalMatrix gb(r, r, Rational(0));
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) gb(a, b) = g(out.basis_indices[a], out.basis_indices[b]);
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (std::find(out.basis_indices.begin(), out.basis_indices.end(), i) != out.basis_indices.end()) continue;
    std::vector<Rational> rhs(r);
    for (std::size_t a = 0; a < r; ++a) rhs[a] = g(out.basis_indices[a], i);
    Dependency d;
    d.index = i;
    d.coefficients = r == 0 ? std::vector<Rational>{} : *solve(gb, rhs);
    out.dependencies.push_back(std::move(d));
  }
  return out;
}

// orthogonal projection of a onto span(basis), basis Gram assumed nonsingular
inline std::vector<Rational> projection_coefficients(const std::vector<Observable>& basis, const Observable& a) {
  if (basis.empty()) return {};
  RationalMatrix g = gram(a.space, basis);
  std::vector<Rational> rhs(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) rhs[i] = inner(basis[i], a);
  auto x = solve(g, rhs);
  if (!x) throw Error(ErrorKind::Precondition, "projection basis is linearly dependent");
  return *x;
}

}  // namespace rlct
