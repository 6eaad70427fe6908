#pragma once

// Exact rationals and the small set of helpers the rest of the library needs
// around them: exact decimal parsing/printing, floor/ceil, and powers of two.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fwlsynth {

// Expression templates are disabled so that `auto` and generic code over
// Rational behave like ordinary value types.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

/// ~113-bit binary floating point used wherever a "high precision real" is
/// needed (matrix exponentials, plant simulation).
using HighPrecision = boost::multiprecision::cpp_bin_float_quad;

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline Rational pow2(int e) {
  if (e >= 0) {
    BigInt n{1};
    n <<= static_cast<unsigned>(e);
    return Rational{n};
  }
  BigInt d{1};
  d <<= static_cast<unsigned>(-e);
  return Rational{BigInt{1}, d};
}

/// Floor division for arbitrary-precision integers (mpz `/` truncates).
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  BigInt r = a - q * b;
  if (r != 0 && ((r < 0) != (b < 0))) {
    q -= 1;
  }
  return q;
}

inline BigInt floor(const Rational& x) {
  return floor_div(boost::multiprecision::numerator(x),
                   boost::multiprecision::denominator(x));
}

inline BigInt ceil(const Rational& x) { return -floor(-x); }

inline BigInt trunc(const Rational& x) {
  return boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
}

inline Rational abs(const Rational& x) { return x < 0 ? Rational{-x} : x; }

/// Parses a decimal literal (`-4.153`, `0.0264`, `1e-3`, `12`) exactly.
/// Binary-float spellings (hex floats, inf, nan) are rejected.
inline Rational parse_decimal(std::string_view text) {
  std::size_t i = 0;
  const auto fail = [&](const char* why) {
    throw ParseError("invalid decimal '" + std::string(text) + "': " + why);
  };
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  BigInt digits{0};
  int scale = 0;
  bool any_digit = false;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    digits = digits * 10 + (text[i] - '0');
    any_digit = true;
    ++i;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits = digits * 10 + (text[i] - '0');
      ++scale;
      any_digit = true;
      ++i;
    }
  }
  if (!any_digit) fail("no digits");
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    if (i >= text.size()) fail("empty exponent");
    int exponent = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      exponent = exponent * 10 + (text[i] - '0');
      if (exponent > 4000) fail("exponent out of range");
      ++i;
    }
    scale += exp_negative ? exponent : -exponent;
  }
  if (i != text.size()) fail("trailing characters");
  BigInt ten_pow{1};
  for (int k = 0; k < (scale < 0 ? -scale : scale); ++k) ten_pow *= 10;
  Rational value = scale >= 0 ? Rational{digits, ten_pow} : Rational{BigInt{digits * ten_pow}};
  return negative ? Rational{-value} : value;
}

/// Exact decimal rendering when the denominator is of the form 2^a 5^b,
/// otherwise `p/q`.
inline std::string to_exact_string(const Rational& x) {
  BigInt num = boost::multiprecision::numerator(x);
  BigInt den = boost::multiprecision::denominator(x);
  BigInt rest = den;
  int twos = 0;
  int fives = 0;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) {
    return num.str() + "/" + den.str();
  }
  const int places = twos > fives ? twos : fives;
  BigInt scaled = abs(num);
  for (int k = twos; k < places; ++k) scaled *= 2;
  for (int k = fives; k < places; ++k) scaled *= 5;
  std::string digits = scaled.str();
  if (static_cast<int>(digits.size()) <= places) {
    digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
  }
  std::string out = num < 0 ? "-" : "";
  if (places == 0) return out + digits;
  out += digits.substr(0, digits.size() - static_cast<std::size_t>(places));
  out += '.';
  out += digits.substr(digits.size() - static_cast<std::size_t>(places));
  return out;
}

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

inline HighPrecision to_high_precision(const Rational& x) {
  return HighPrecision{boost::multiprecision::numerator(x).str()} /
         HighPrecision{boost::multiprecision::denominator(x).str()};
}

/// Exact conversion of a finite double (every double is a dyadic rational).
inline Rational from_double(double v) {
  if (!std::isfinite(v)) throw std::domain_error("non-finite double");
  int exp = 0;
  double mant = std::frexp(v, &exp);
  // 53 significant bits fit in int64 exactly.
  auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  return Rational{BigInt{scaled}} * pow2(exp - 53);
}

/// Continued-fraction reconstruction: the first convergent within `tol` of x.
inline Rational snap_to_rational(const HighPrecision& x, const HighPrecision& tol) {
  using boost::multiprecision::floor;
  if (boost::multiprecision::abs(x) <= tol) return Rational{0};
  HighPrecision rem = x;
  BigInt p_prev{0}, p{1};
  BigInt q_prev{1}, q{0};
  for (int iter = 0; iter < 128; ++iter) {
    HighPrecision a_hp = floor(rem);
    BigInt a{a_hp.convert_to<BigInt>()};
    BigInt p_next = a * p + p_prev;
    BigInt q_next = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    Rational candidate{p, q};
    if (boost::multiprecision::abs(to_high_precision(candidate) - x) <= tol) return candidate;
    HighPrecision frac = rem - a_hp;
    if (frac == 0) return candidate;
    rem = 1 / frac;
  }
  return Rational{p, q};
}

}  // namespace fwlsynth
