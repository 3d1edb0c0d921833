#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rlct/rational.hpp"

namespace rlct::upoly {

// coefficients from the constant term upwards
using Poly = std::vector<Rational>;

inline void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

inline Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  trim(d);
  return d;
}

inline std::pair<Poly, Poly> divmod(Poly a, Poly b) {
  trim(a);
  trim(b);
  if (b.empty()) throw Error(ErrorKind::Precondition, "polynomial division by zero");
  Poly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Rational(0));
  while (!a.empty() && a.size() >= b.size()) {
    std::size_t shift = a.size() - b.size();
    Rational c = a.back() / b.back();
    q[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= c * b[i];
    trim(a);
  }
  trim(q);
  return {q, a};
}

inline Poly monic(Poly p) {
  trim(p);
  if (p.empty()) return p;
  Rational lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

inline Poly gcd(Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

inline Poly squarefree(const Poly& p) {
  Poly g = gcd(p, derivative(p));
  if (degree(g) <= 0) return monic(p);
  return monic(divmod(p, g).first);
}

inline int sign_at_infinity(const Poly& p, bool positive) {
  if (p.empty()) return 0;
  int s = sgn(p.back());
  if (!positive && degree(p) % 2 == 1) s = -s;
  return s;
}

// number of distinct real roots
inline std::size_t real_root_count(Poly p) {
  trim(p);
  if (degree(p) <= 0) return 0;
  p = squarefree(p);
  std::vector<Poly> chain{p, derivative(p)};
  while (true) {
    Poly r = divmod(chain[chain.size() - 2], chain.back()).second;
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    chain.push_back(std::move(r));
  }
  auto changes = [&](bool positive) {
    std::size_t n = 0;
    int last = 0;
    for (const auto& q : chain) {
      int s = sign_at_infinity(q, positive);
      if (s == 0) continue;
      if (last != 0 && s != last) ++n;
      last = s;
    }
    return n;
  };
  return changes(false) - changes(true);
}

}  // namespace rlct::upoly
