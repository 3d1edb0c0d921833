#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "rlct/error.hpp"
#include "rlct/rational.hpp"

namespace rlct {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;

inline RationalMatrix identity_matrix(std::size_t n) {
  RationalMatrix m(n, n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

inline RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::Precondition, "matrix shape mismatch");
  RationalMatrix out(a.rows(), b.cols(), Rational(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

inline RationalMatrix transpose(const RationalMatrix& a) {
  RationalMatrix out(a.cols(), a.rows(), Rational(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

struct EchelonForm {
  RationalMatrix reduced;
  std::vector<std::size_t> pivots;
  RationalMatrix transform;  // transform * input == reduced
};

inline EchelonForm rref(RationalMatrix a) {
  RationalMatrix t = identity_matrix(a.rows());
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t p = row;
    while (p < a.rows() && a(p, col) == 0) ++p;
    if (p == a.rows()) continue;
    a.swap_rows(p, row);
    t.swap_rows(p, row);
    Rational inv = 1 / a(row, col);
    for (std::size_t j = 0; j < a.cols(); ++j) a(row, j) *= inv;
    for (std::size_t j = 0; j < t.cols(); ++j) t(row, j) *= inv;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == row || a(i, col) == 0) continue;
      Rational factor = a(i, col);
      for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) -= factor * a(row, j);
      for (std::size_t j = 0; j < t.cols(); ++j) t(i, j) -= factor * t(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return {std::move(a), std::move(pivots), std::move(t)};
}

inline std::size_t rank(const RationalMatrix& a) { return rref(a).pivots.size(); }

inline Rational determinant(RationalMatrix a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::Precondition, "determinant of a non-square matrix");
  Rational det = 1;
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && a(p, col) == 0) ++p;
    if (p == n) return 0;
    if (p != col) {
      a.swap_rows(p, col);
      det = -det;
    }
    det *= a(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      if (a(i, col) == 0) continue;
      Rational factor = a(i, col) / a(col, col);
      for (std::size_t j = col; j < n; ++j) a(i, j) -= factor * a(col, j);
    }
  }
  return det;
}

inline std::optional<RationalMatrix> inverse(const RationalMatrix& a) {
  if (a.rows() != a.cols()) return std::nullopt;
  EchelonForm e = rref(a);
  if (e.pivots.size() != a.rows()) return std::nullopt;
  return e.transform;
}

inline std::optional<std::vector<Rational>> solve(const RationalMatrix& a, const std::vector<Rational>& b) {
  auto inv = inverse(a);
  if (!inv) return std::nullopt;
  std::vector<Rational> x(a.cols(), Rational(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) x[i] += (*inv)(i, j) * b[j];
  return x;
}

inline std::vector<std::vector<Rational>> nullspace(const RationalMatrix& a) {
  EchelonForm e = rref(a);
  std::vector<bool> is_pivot(a.cols(), false);
  for (std::size_t p : e.pivots) is_pivot[p] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < a.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(a.cols(), Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

// coefficients c_0..c_n of det(tI - A), c_n = 1
inline std::vector<Rational> characteristic_polynomial(const RationalMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<Rational> c(n + 1, Rational(0));
  c[n] = 1;
  RationalMatrix m(n, n, Rational(0));
  for (std::size_t k = 1; k <= n; ++k) {
    RationalMatrix next = a * m;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    m = std::move(next);
    RationalMatrix am = a * m;
    Rational trace = 0;
    for (std::size_t i = 0; i < n; ++i) trace += am(i, i);
    c[n - k] = -trace / static_cast<long>(k);
  }
  return c;
}

struct Inertia {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t zero = 0;
};

// exact for symmetric input: the characteristic polynomial is real-rooted, so
// Descartes' rule of signs counts roots exactly
inline Inertia inertia(const RationalMatrix& a) {
  std::vector<Rational> c = characteristic_polynomial(a);
  Inertia out;
  std::size_t low = 0;
  while (low < c.size() && c[low] == 0) ++low;
  out.zero = low;
  auto sign_changes = [](const std::vector<int>& signs) {
    std::size_t changes = 0;
    int last = 0;
    for (int s : signs) {
      if (s == 0) continue;
      if (last != 0 && s != last) ++changes;
      last = s;
    }
    return changes;
  };
  std::vector<int> pos, neg;
  for (std::size_t i = low; i < c.size(); ++i) {
    int s = sgn(c[i]);
    pos.push_back(s);
    neg.push_back((i % 2 == 1) ? -s : s);
  }
  out.positive = sign_changes(pos);
  out.negative = sign_changes(neg);
  return out;
}

enum class Definiteness { PositiveDefinite, NegativeDefinite, PositiveSemidefinite, NegativeSemidefinite, Indefinite, Zero };

inline const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "PositiveDefinite";
    case Definiteness::NegativeDefinite: return "NegativeDefinite";
    case Definiteness::PositiveSemidefinite: return "PositiveSemidefinite";
    case Definiteness::NegativeSemidefinite: return "NegativeSemidefinite";
    case Definiteness::Indefinite: return "Indefinite";
    case Definiteness::Zero: return "Zero";
  }
  return "Unknown";
}

inline Definiteness classify_symmetric(const RationalMatrix& a) {
  Inertia in = inertia(a);
  const std::size_t n = a.rows();
  if (in.zero == n) return Definiteness::Zero;
  if (in.positive == n) return Definiteness::PositiveDefinite;
  if (in.negative == n) return Definiteness::NegativeDefinite;
  if (in.negative == 0) return Definiteness::PositiveSemidefinite;
  if (in.positive == 0) return Definiteness::NegativeSemidefinite;
  return Definiteness::Indefinite;
}

struct RankNormalForm {
  RationalMatrix p;
  RationalMatrix q;
  std::size_t rank = 0;
};

// P^{-1} T Q^{-1} = [[I_r, 0], [0, 0]]
inline RankNormalForm rank_normal_form(const RationalMatrix& t) {
  EchelonForm e = rref(t);
  const std::size_t r = e.pivots.size();
  const std::size_t n = t.cols();
  std::vector<std::size_t> order = e.pivots;
  for (std::size_t j = 0; j < n; ++j)
    if (std::find(e.pivots.begin(), e.pivots.end(), j) == e.pivots.end()) order.push_back(j);
  RationalMatrix c(n, n, Rational(0));
  for (std::size_t k = 0; k < n; ++k) c(order[k], k) = 1;
  RationalMatrix reduced = e.reduced * c;
  RationalMatrix clear = identity_matrix(n);
  for (std::size_t j = r; j < n; ++j)
    for (std::size_t i = 0; i < r; ++i) clear(i, j) = -reduced(i, j);
  c = c * clear;
  RankNormalForm out;
  out.rank = r;
  out.p = *inverse(e.transform);
  out.q = *inverse(c);
  return out;
}

inline bool is_unit(const Rational& q) { return q != 0; }
inline Rational reciprocal(const Rational& q) { return 1 / q; }

// Gaussian elimination over a local ring: a pivot is admissible when it is a unit.
// T must provide is_unit(T) and reciprocal(T) via ADL.
template <class T>
std::vector<T> solve_unit_pivots(Matrix<T> a, std::vector<T> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw Error(ErrorKind::Precondition, "solve_unit_pivots: shape mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && !is_unit(a(p, col))) ++p;
    if (p == n) throw Error(ErrorKind::NotAUnit, "no unit pivot in column " + std::to_string(col));
    a.swap_rows(p, col);
    std::swap(b[p], b[col]);
    T inv = reciprocal(a(col, col));
    for (std::size_t j = col; j < n; ++j) a(col, j) = a(col, j) * inv;
    b[col] = b[col] * inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col) continue;
      T factor = a(i, col);
      for (std::size_t j = col; j < n; ++j) a(i, j) = a(i, j) - factor * a(col, j);
      b[i] = b[i] - factor * b[col];
    }
  }
  return b;
}

}  // namespace rlct
