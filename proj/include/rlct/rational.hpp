#pragma once

#include <gmpxx.h>

#include <regex>
#include <string>
#include <string_view>

#include "rlct/error.hpp"

namespace rlct {

using Rational = mpq_class;
using Integer = mpz_class;

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational rational(long num, long den = 1) {
  if (den == 0) throw Error(ErrorKind::Precondition, "zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline bool is_rational_literal(std::string_view text) {
  static const std::regex pattern(R"(\s*[-+]?[0-9]+(\s*/\s*[0-9]+)?\s*)");
  return std::regex_match(text.begin(), text.end(), pattern);
}

inline Rational parse_rational(std::string_view text) {
  if (!is_rational_literal(text))
    throw Error(ErrorKind::ModelFile, "not a rational literal: '" + std::string(text) + "'");
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t' && c != '+') s.push_back(c);
  Rational q;
  if (q.set_str(s, 10) != 0 || q.get_den() == 0)
    throw Error(ErrorKind::ModelFile, "not a rational literal: '" + std::string(text) + "'");
  q.canonicalize();
  return q;
}

inline Integer binomial(unsigned long n, unsigned long k) {
  Integer out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

inline Rational power(const Rational& base, unsigned exponent) {
  Rational out = 1;
  for (unsigned i = 0; i < exponent; ++i) out *= base;
  return out;
}

inline Rational factorial(unsigned n) {
  Integer out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return Rational(out);
}

}  // namespace rlct
