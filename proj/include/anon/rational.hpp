#pragma once

// Exact rational arithmetic on top of GMP, plus the handful of conversions
// the file formats need (decimal strings, "num/den" strings, doubles).

#include <gmpxx.h>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "anon/error.hpp"

namespace anon {

using Rational = mpq_class;
using Integer = mpz_class;

/// A probability vector in exact arithmetic.
using RationalVector = std::vector<Rational>;

inline Rational make_rational(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Parses "a/b", an integer, or a decimal literal such as "0.15" or "1e-3".
/// Decimal literals are converted exactly ("0.6" is 3/5, not the nearest
/// double).
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { return Error("malformed rational '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num, den;
    if (num.set_str(std::string(text.substr(0, slash)), 10) != 0) throw fail();
    if (den.set_str(std::string(text.substr(slash + 1)), 10) != 0) throw fail();
    if (den == 0) throw Error("zero denominator in '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';

  std::string digits;
  long scale = 0;  // value = digits * 10^(exponent - scale)
  bool seen_digit = false, seen_point = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw fail();

  long exponent = 0;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') throw fail();
    ++pos;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), exponent);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw fail();
  }

  Integer num(digits, 10);
  if (negative) num = -num;
  long shift = exponent - scale;
  Integer power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  Rational q = shift >= 0 ? Rational(num * power) : Rational(num, power);
  q.canonicalize();
  return q;
}

/// Exact binary value of a finite double.
inline Rational from_double(double value) {
  if (!std::isfinite(value)) throw Error("non-finite value");
  return Rational(value);
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// "num/den" in lowest terms, or just "num" for integers.
inline std::string to_string(const Rational& q) { return q.get_str(); }

/// True when q equals some finite double exactly.
inline bool is_exact_double(const Rational& q) {
  const mpz_srcptr den = q.get_den_mpz_t();
  if (mpz_popcount(den) != 1) return false;
  if (mpz_sizeinbase(q.get_num_mpz_t(), 2) > 53) return false;
  return mpz_sizeinbase(den, 2) <= 1000;
}

/// Shortest decimal text that round-trips through strtod.
inline std::string shortest_decimal(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

inline Rational floor_of(const Rational& q) {
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(f);
}

/// True when q is an integer multiple of 1/den.
inline bool is_multiple_of_inverse(const Rational& q, const Integer& den) {
  Rational scaled = q * den;
  scaled.canonicalize();
  return scaled.get_den() == 1;
}

inline Rational sum(const RationalVector& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

/// Bit length of the (reduced) denominator.
inline std::size_t denominator_bits(const Rational& q) {
  return mpz_sizeinbase(q.get_den_mpz_t(), 2);
}

/// floor(z^alpha) computed exactly for rational alpha = a/b in (0,1):
/// the largest integer t with t^b <= z^a.
inline Integer floor_root_power(unsigned long z, const Rational& alpha) {
  if (alpha <= 0 || alpha >= 1) throw Error("alpha must lie in (0,1)");
  const unsigned long a = alpha.get_num().get_ui();
  const unsigned long b = alpha.get_den().get_ui();
  Integer za;
  mpz_ui_pow_ui(za.get_mpz_t(), z, a);
  Integer t;
  mpz_root(t.get_mpz_t(), za.get_mpz_t(), b);
  return t;
}

template <typename T>
T convert(const Rational& q);

template <>
inline Rational convert<Rational>(const Rational& q) {
  return q;
}

template <>
inline double convert<double>(const Rational& q) {
  return q.get_d();
}

/// Converts between double and Rational, or passes a value through.
template <typename T, typename P>
T scalar_cast(const P& x) {
  if constexpr (std::is_same_v<T, P>)
    return x;
  else if constexpr (std::is_same_v<T, double>)
    return x.get_d();
  else
    return T(x);
}

inline double abs_value(double x) { return std::fabs(x); }
inline Rational abs_value(const Rational& x) { return abs(x); }

}  // namespace anon
