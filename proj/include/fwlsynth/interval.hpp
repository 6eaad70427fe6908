#pragma once

// Closed intervals [lo, hi] over an ordered field-like endpoint type.
//
// With Rational endpoints every operation returns the exact hull of the
// pointwise result set, so containment holds without any rounding. With
// FixedPointValue endpoints the endpoint arithmetic itself truncates, which
// makes the enclosure fast but not guaranteed; the verifier only trusts the
// rational instantiation.

#include "fwlsynth/fixed_point.hpp"
#include "fwlsynth/rational.hpp"

#include <algorithm>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace fwlsynth {

class DivisorContainsZero : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

template <typename T>
struct Interval {
  T lo;
  T hi;

  Interval() = default;
  explicit Interval(const T& point) : lo(point), hi(point) {}
  Interval(const T& l, const T& h) : lo(l), hi(h) {
    if (h < l) throw std::invalid_argument("interval with lo > hi");
  }

  bool contains(const T& x) const { return !(x < lo) && !(hi < x); }
  bool contains_zero() const { return contains(zero_like(lo)); }
  bool subset_of(const Interval& other) const { return !(lo < other.lo) && !(other.hi < hi); }
  bool is_point() const { return lo == hi; }

  friend bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }
};

using RationalInterval = Interval<Rational>;
using FixedInterval = Interval<FixedPointValue>;

namespace detail {

template <typename T>
Interval<T> hull(std::initializer_list<T> values) {
  auto [mn, mx] = std::minmax_element(values.begin(), values.end(),
                                      [](const T& a, const T& b) { return a < b; });
  return Interval<T>{*mn, *mx};
}

}  // namespace detail

template <typename T>
Interval<T> operator+(const Interval<T>& a, const Interval<T>& b) {
  return Interval<T>{a.lo + b.lo, a.hi + b.hi};
}

template <typename T>
Interval<T> operator-(const Interval<T>& a, const Interval<T>& b) {
  return Interval<T>{a.lo - b.hi, a.hi - b.lo};
}

template <typename T>
Interval<T> operator-(const Interval<T>& a) {
  return Interval<T>{-a.hi, -a.lo};
}

template <typename T>
Interval<T> operator*(const Interval<T>& a, const Interval<T>& b) {
  return detail::hull<T>({a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi});
}

template <typename T>
Interval<T> operator/(const Interval<T>& a, const Interval<T>& b) {
  if (b.contains_zero()) throw DivisorContainsZero("interval divisor contains zero");
  return detail::hull<T>({a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi});
}

template <typename T>
Interval<T> abs(const Interval<T>& a) {
  const T zero = zero_like(a.lo);
  if (!(a.lo < zero)) return a;
  if (!(zero < a.hi)) return -a;
  const T neg_lo = -a.lo;
  return Interval<T>{zero, a.hi < neg_lo ? neg_lo : a.hi};
}

template <typename T>
Interval<T> zero_like(const Interval<T>& a) {
  return Interval<T>{zero_like(a.lo)};
}

inline RationalInterval iv_add(const RationalInterval& a, const RationalInterval& b) { return a + b; }
inline RationalInterval iv_sub(const RationalInterval& a, const RationalInterval& b) { return a - b; }
inline RationalInterval iv_mul(const RationalInterval& a, const RationalInterval& b) { return a * b; }
inline RationalInterval iv_div(const RationalInterval& a, const RationalInterval& b) { return a / b; }

inline RationalInterval to_rational(const FixedInterval& a) {
  return RationalInterval{a.lo.to_rational(), a.hi.to_rational()};
}
inline RationalInterval to_rational(const RationalInterval& a) { return a; }

/// Smallest grid interval containing `a`: lo floors, hi ceils.
inline FixedInterval outward_to_grid(const RationalInterval& a, FixedPointFormat fmt) {
  return FixedInterval{quantize(a.lo, fmt, Rounding::Floor), quantize(a.hi, fmt, Rounding::Ceiling)};
}

template <typename T>
std::ostream& operator<<(std::ostream& os, const Interval<T>& a) {
  return os << '[' << a.lo << ", " << a.hi << ']';
}

inline std::ostream& operator<<(std::ostream& os, const RationalInterval& a) {
  return os << '[' << to_exact_string(a.lo) << ", " << to_exact_string(a.hi) << ']';
}

}  // namespace fwlsynth
