#pragma once

// Fixed-point numbers <I,F>: a signed raw integer scaled by 2^-F, with I
// integer bits. Arithmetic is exact-then-truncate and never wraps.

#include "fwlsynth/rational.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fwlsynth {

class FixedPointOverflow : public std::overflow_error {
public:
  using std::overflow_error::overflow_error;
};

class DivisionByZero : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

struct FixedPointFormat {
  int integer_bits = 1;
  int fraction_bits = 0;

  FixedPointFormat() = default;
  FixedPointFormat(int integer, int fraction) : integer_bits(integer), fraction_bits(fraction) {
    if (integer < 1 || fraction < 0 || integer + fraction > 64) {
      throw std::invalid_argument("invalid fixed-point format <" + std::to_string(integer) +
                                  "," + std::to_string(fraction) + ">");
    }
  }

  /// Grid step 2^-F.
  Rational step() const { return pow2(-fraction_bits); }

  /// Largest admissible |raw| + 1, i.e. 2^(I+F) capped to the int64 range.
  __int128 raw_bound() const {
    const int bits = integer_bits + fraction_bits;
    return bits >= 63 ? static_cast<__int128>(1) << 63 : static_cast<__int128>(1) << bits;
  }

  /// True when every value of `other` is exactly representable here.
  bool contains(const FixedPointFormat& other) const {
    return integer_bits >= other.integer_bits && fraction_bits >= other.fraction_bits;
  }

  friend bool operator==(const FixedPointFormat&, const FixedPointFormat&) = default;
};

/// Smallest format holding both `a` and `b` exactly; integer bits give way
/// when I + F would exceed 64.
inline FixedPointFormat working_format(const FixedPointFormat& a, const FixedPointFormat& b) {
  const int f = std::max(a.fraction_bits, b.fraction_bits);
  const int i = std::min(std::max(a.integer_bits, b.integer_bits), 64 - f);
  return FixedPointFormat{std::max(i, 1), f};
}

inline std::string to_string(const FixedPointFormat& f) {
  return "<" + std::to_string(f.integer_bits) + "," + std::to_string(f.fraction_bits) + ">";
}

inline std::ostream& operator<<(std::ostream& os, const FixedPointFormat& f) {
  return os << to_string(f);
}

enum class Rounding { Truncate, Nearest, Floor, Ceiling };

class FixedPointValue {
public:
  FixedPointValue() = default;

  static FixedPointValue from_raw(__int128 raw, FixedPointFormat fmt) {
    if (raw >= fmt.raw_bound() || raw <= -fmt.raw_bound()) {
      throw FixedPointOverflow("value leaves the range of " + to_string(fmt));
    }
    return FixedPointValue(static_cast<std::int64_t>(raw), fmt);
  }

  static FixedPointValue zero(FixedPointFormat fmt) { return FixedPointValue(0, fmt); }

  std::int64_t raw() const { return raw_; }
  const FixedPointFormat& format() const { return format_; }

  Rational to_rational() const { return Rational{BigInt{raw_}} * pow2(-format_.fraction_bits); }
  double to_double() const { return std::ldexp(static_cast<double>(raw_), -format_.fraction_bits); }

  /// Exact decimal rendering (raw * 2^-F always has a finite decimal expansion).
  std::string to_decimal() const { return to_exact_string(to_rational()); }

  /// Re-expresses this value in another format; exact when `to` has at least
  /// as many fraction bits, truncating otherwise.
  FixedPointValue rescale(FixedPointFormat to) const {
    const int shift = to.fraction_bits - format_.fraction_bits;
    __int128 raw = raw_;
    if (shift >= 0) {
      if (shift >= 64) throw FixedPointOverflow("rescale shift too large");
      raw *= static_cast<__int128>(1) << shift;
    } else {
      raw /= static_cast<__int128>(1) << (-shift);
    }
    return from_raw(raw, to);
  }

  FixedPointValue operator-() const { return FixedPointValue(-raw_, format_); }

  friend FixedPointValue operator+(const FixedPointValue& a, const FixedPointValue& b) {
    check_same(a, b);
    return from_raw(static_cast<__int128>(a.raw_) + b.raw_, a.format_);
  }
  friend FixedPointValue operator-(const FixedPointValue& a, const FixedPointValue& b) {
    check_same(a, b);
    return from_raw(static_cast<__int128>(a.raw_) - b.raw_, a.format_);
  }
  friend FixedPointValue operator*(const FixedPointValue& a, const FixedPointValue& b) {
    check_same(a, b);
    const __int128 product = static_cast<__int128>(a.raw_) * b.raw_;
    // __int128 division truncates toward zero, which is the rounding we want.
    return from_raw(product / (static_cast<__int128>(1) << a.format_.fraction_bits), a.format_);
  }
  friend FixedPointValue operator/(const FixedPointValue& a, const FixedPointValue& b) {
    check_same(a, b);
    if (b.raw_ == 0) throw DivisionByZero("fixed-point division by zero");
    const __int128 scaled = static_cast<__int128>(a.raw_) * (static_cast<__int128>(1) << a.format_.fraction_bits);
    return from_raw(scaled / b.raw_, a.format_);
  }

  friend bool operator==(const FixedPointValue& a, const FixedPointValue& b) {
    return a.format_ == b.format_ && a.raw_ == b.raw_;
  }
  friend std::strong_ordering operator<=>(const FixedPointValue& a, const FixedPointValue& b) {
    check_same(a, b);
    return a.raw_ <=> b.raw_;
  }

private:
  FixedPointValue(std::int64_t raw, FixedPointFormat fmt) : raw_(raw), format_(fmt) {}

  static void check_same(const FixedPointValue& a, const FixedPointValue& b) {
    if (!(a.format_ == b.format_)) {
      throw std::invalid_argument("fixed-point operands have different formats " +
                                  to_string(a.format_) + " and " + to_string(b.format_));
    }
  }

  std::int64_t raw_ = 0;
  FixedPointFormat format_{};
};

inline std::ostream& operator<<(std::ostream& os, const FixedPointValue& v) {
  return os << v.to_decimal();
}

inline FixedPointValue quantize(const Rational& x, FixedPointFormat fmt, Rounding mode) {
  const Rational scaled = x * pow2(fmt.fraction_bits);
  BigInt raw;
  switch (mode) {
    case Rounding::Truncate:
      raw = trunc(scaled);
      break;
    case Rounding::Floor:
      raw = floor(scaled);
      break;
    case Rounding::Ceiling:
      raw = ceil(scaled);
      break;
    case Rounding::Nearest: {
      // ties away from zero
      BigInt magnitude = floor(Rational{abs(scaled) + Rational{1, 2}});
      raw = scaled < 0 ? BigInt{-magnitude} : magnitude;
      break;
    }
  }
  const BigInt bound{BigInt{1} << static_cast<unsigned>(std::min(63, fmt.integer_bits + fmt.fraction_bits))};
  if (raw >= bound || raw <= -bound) {
    throw FixedPointOverflow(to_exact_string(x) + " does not fit " + to_string(fmt));
  }
  return FixedPointValue::from_raw(raw.convert_to<std::int64_t>(), fmt);
}

inline FixedPointValue quantize_truncate(const Rational& x, FixedPointFormat fmt) {
  return quantize(x, fmt, Rounding::Truncate);
}

inline FixedPointValue quantize_nearest(const Rational& x, FixedPointFormat fmt) {
  return quantize(x, fmt, Rounding::Nearest);
}

inline std::vector<FixedPointValue> quantize_poly(const std::vector<Rational>& coeffs,
                                                  FixedPointFormat fmt, Rounding mode) {
  std::vector<FixedPointValue> out;
  out.reserve(coeffs.size());
  for (const auto& c : coeffs) out.push_back(quantize(c, fmt, mode));
  return out;
}

inline Rational to_rational(const FixedPointValue& v) { return v.to_rational(); }
inline Rational to_rational(const Rational& v) { return v; }

inline FixedPointValue zero_like(const FixedPointValue& v) { return FixedPointValue::zero(v.format()); }
inline Rational zero_like(const Rational&) { return Rational{0}; }
inline double zero_like(double) { return 0.0; }

inline FixedPointValue abs(const FixedPointValue& v) { return v.raw() < 0 ? -v : v; }

}  // namespace fwlsynth
