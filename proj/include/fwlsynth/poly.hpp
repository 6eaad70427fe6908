#pragma once

// Polynomials in z stored in descending powers: coeffs[0] multiplies z^deg.

#include "fwlsynth/fixed_point.hpp"
#include "fwlsynth/interval.hpp"
#include "fwlsynth/rational.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fwlsynth {

template <typename T>
class Poly {
public:
  Poly() : coeffs_{T{}} {}
  explicit Poly(std::vector<T> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("polynomial needs at least one coefficient");
  }
  Poly(std::initializer_list<T> coeffs) : Poly(std::vector<T>(coeffs)) {}

  const std::vector<T>& coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  /// Declared degree (length - 1), leading zeros included.
  std::size_t degree() const { return coeffs_.size() - 1; }
  const T& operator[](std::size_t i) const { return coeffs_[i]; }
  const T& leading() const { return coeffs_.front(); }

  friend bool operator==(const Poly& a, const Poly& b) { return a.coeffs_ == b.coeffs_; }

private:
  std::vector<T> coeffs_;
};

template <typename T>
bool is_zero_value(const T& x) {
  return x == zero_like(x);
}

template <typename T>
bool is_zero(const Poly<T>& p) {
  for (const auto& c : p.coeffs()) {
    if (!is_zero_value(c)) return false;
  }
  return true;
}

/// Strips leading zero coefficients, keeping at least one.
template <typename T>
Poly<T> normalize(const Poly<T>& p) {
  const auto& c = p.coeffs();
  std::size_t first = 0;
  while (first + 1 < c.size() && is_zero_value(c[first])) ++first;
  return Poly<T>(std::vector<T>(c.begin() + static_cast<std::ptrdiff_t>(first), c.end()));
}

template <typename T>
Poly<T> operator+(const Poly<T>& a, const Poly<T>& b) {
  const bool a_longer = a.size() >= b.size();
  const auto& big = a_longer ? a.coeffs() : b.coeffs();
  const auto& small = a_longer ? b.coeffs() : a.coeffs();
  std::vector<T> out = big;
  const std::size_t offset = big.size() - small.size();
  for (std::size_t i = 0; i < small.size(); ++i) out[offset + i] = out[offset + i] + small[i];
  return Poly<T>(std::move(out));
}

template <typename T>
Poly<T> operator-(const Poly<T>& a) {
  std::vector<T> out;
  out.reserve(a.size());
  for (const auto& c : a.coeffs()) out.push_back(-c);
  return Poly<T>(std::move(out));
}

template <typename T>
Poly<T> operator-(const Poly<T>& a, const Poly<T>& b) {
  return a + (-b);
}

template <typename T>
Poly<T> operator*(const Poly<T>& a, const Poly<T>& b) {
  const auto& x = a.coeffs();
  const auto& y = b.coeffs();
  std::vector<T> out(x.size() + y.size() - 1, zero_like(x.front()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] = out[i + j] + x[i] * y[j];
  }
  return Poly<T>(std::move(out));
}

template <typename T>
Poly<T> scale(const Poly<T>& p, const T& k) {
  std::vector<T> out;
  out.reserve(p.size());
  for (const auto& c : p.coeffs()) out.push_back(c * k);
  return Poly<T>(std::move(out));
}

/// Horner evaluation.
template <typename T, typename X>
X evaluate(const Poly<T>& p, const X& x) {
  X acc = X(p.coeffs().front());
  for (std::size_t i = 1; i < p.size(); ++i) acc = acc * x + X(p.coeffs()[i]);
  return acc;
}

inline Poly<Rational> poly_add(const Poly<Rational>& a, const Poly<Rational>& b) { return a + b; }
inline Poly<Rational> poly_mul(const Poly<Rational>& a, const Poly<Rational>& b) { return a * b; }

/// Polynomial long division over the rationals; divisor must be nonzero.
inline std::pair<Poly<Rational>, Poly<Rational>> divmod(const Poly<Rational>& a,
                                                        const Poly<Rational>& b) {
  const Poly<Rational> d = normalize(b);
  if (is_zero(d)) throw std::domain_error("polynomial division by zero");
  std::vector<Rational> rem = normalize(a).coeffs();
  if (rem.size() < d.size()) return {Poly<Rational>{Rational{0}}, Poly<Rational>(rem)};
  std::vector<Rational> quot(rem.size() - d.size() + 1, Rational{0});
  for (std::size_t i = 0; i < quot.size(); ++i) {
    const Rational factor = rem[i] / d.leading();
    quot[i] = factor;
    if (factor == 0) continue;
    for (std::size_t j = 0; j < d.size(); ++j) rem[i + j] -= factor * d[j];
  }
  if (d.size() == 1) return {Poly<Rational>(std::move(quot)), Poly<Rational>{Rational{0}}};
  std::vector<Rational> tail(rem.end() - static_cast<std::ptrdiff_t>(d.size() - 1), rem.end());
  return {Poly<Rational>(std::move(quot)), normalize(Poly<Rational>(std::move(tail)))};
}

/// Monic greatest common divisor over the rationals (gcd(0, 0) = 0).
inline Poly<Rational> gcd(const Poly<Rational>& a, const Poly<Rational>& b) {
  Poly<Rational> x = normalize(a);
  Poly<Rational> y = normalize(b);
  while (!is_zero(y)) {
    Poly<Rational> r = divmod(x, y).second;
    x = std::move(y);
    y = std::move(r);
  }
  if (is_zero(x)) return x;
  return scale(x, Rational{1 / x.leading()});
}

template <typename T>
Poly<Rational> to_rational(const Poly<T>& p) {
  std::vector<Rational> out;
  out.reserve(p.size());
  for (const auto& c : p.coeffs()) out.push_back(to_rational(c));
  return Poly<Rational>(std::move(out));
}

inline Poly<RationalInterval> to_interval(const Poly<Rational>& p) {
  std::vector<RationalInterval> out;
  out.reserve(p.size());
  for (const auto& c : p.coeffs()) out.emplace_back(c);
  return Poly<RationalInterval>(std::move(out));
}

inline Poly<double> to_double(const Poly<Rational>& p) {
  std::vector<double> out;
  out.reserve(p.size());
  for (const auto& c : p.coeffs()) out.push_back(to_double(c));
  return Poly<double>(std::move(out));
}

inline std::string to_string(const Poly<Rational>& p) {
  std::string out = "[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ", ";
    out += to_exact_string(p[i]);
  }
  return out + "]";
}

using IntervalPoly = Poly<RationalInterval>;

}  // namespace fwlsynth
