#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bimath {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow10(unsigned exponent) {
  BigInt r = 1;
  for (unsigned i = 0; i < exponent; ++i) r *= 10;
  return r;
}

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

inline std::string to_string(const BigInt& v) { return v.str(); }

/// Decimal expansion of `r` when its denominator has no prime factors other
/// than 2 and 5, otherwise nullopt. Integers render without a decimal point.
inline std::optional<std::string> terminating_decimal(const Rational& r) {
  BigInt den = denominator(r);
  unsigned twos = 0, fives = 0;
  while (den % 2 == 0) { den /= 2; ++twos; }
  while (den % 5 == 0) { den /= 5; ++fives; }
  if (den != 1) return std::nullopt;
  const unsigned digits = std::max(twos, fives);
  BigInt num = numerator(r);
  const bool negative = num < 0;
  if (negative) num = -num;
  BigInt scaled = num * pow10(digits) / denominator(r);
  std::string s = scaled.str();
  if (digits > 0) {
    if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
    s.insert(s.size() - digits, ".");
  }
  return negative ? "-" + s : s;
}

/// "p/q" or "n" for integers.
inline std::string format_fraction(const Rational& r) {
  if (is_integer(r)) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Human form used in solution text: integer, terminating decimal, or for
/// repeating expansions "k + p/q" (integer part k > 0) / "p/q".
inline std::string format_rational(const Rational& r) {
  if (auto dec = terminating_decimal(r)) return *dec;
  if (r < 0) return format_fraction(r);
  BigInt whole = numerator(r) / denominator(r);
  if (whole == 0) return format_fraction(r);
  Rational frac = r - Rational(whole);
  return whole.str() + " + " + format_fraction(frac);
}

/// Parses an optionally signed decimal literal ("-12", "3.50", ".5").
inline std::optional<Rational> parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    ++i;
  }
  BigInt num = 0;
  unsigned frac_digits = 0;
  bool seen_point = false, seen_digit = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      num = num * 10 + (c - '0');
      seen_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  Rational r(num, pow10(frac_digits));
  return negative ? Rational(-r) : r;
}

inline Rational abs_value(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace bimath
