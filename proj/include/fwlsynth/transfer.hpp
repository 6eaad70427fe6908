#pragma once

// Rational transfer functions in z, fixed-point controllers, and the
// closed-loop characteristic polynomial S(z) = Cn*Gn + Cd*Gd of the unity
// negative-feedback loop.

#include "fwlsynth/fixed_point.hpp"
#include "fwlsynth/poly.hpp"
#include "fwlsynth/rational.hpp"
#include "fwlsynth/roots.hpp"

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fwlsynth {

class DegenerateCharPoly : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class TransferFunction {
public:
  TransferFunction() : num_{Rational{0}}, den_{Rational{1}} {}
  TransferFunction(Poly<Rational> num, Poly<Rational> den)
      : num_(normalize(num)), den_(normalize(den)) {
    if (is_zero(den_)) throw std::invalid_argument("transfer function with zero denominator");
  }

  const Poly<Rational>& num() const { return num_; }
  const Poly<Rational>& den() const { return den_; }
  std::size_t num_order() const { return num_.degree(); }
  std::size_t den_order() const { return den_.degree(); }
  bool is_proper() const { return num_order() <= den_order(); }

  friend bool operator==(const TransferFunction&, const TransferFunction&) = default;

private:
  Poly<Rational> num_;
  Poly<Rational> den_;
};

inline std::string to_string(const TransferFunction& tf) {
  return to_string(tf.num()) + " / " + to_string(tf.den());
}

/// Builds a transfer function from coefficients of z^0, z^-1, z^-2, ...
inline TransferFunction from_inverse_powers(std::vector<Rational> b, std::vector<Rational> a) {
  if (b.empty() || a.empty()) throw std::invalid_argument("empty coefficient list");
  while (b.size() < a.size()) b.emplace_back(0);
  while (a.size() < b.size()) a.emplace_back(0);
  return TransferFunction{Poly<Rational>(std::move(b)), Poly<Rational>(std::move(a))};
}

/// Numerator-then-denominator coefficient vector.
inline std::vector<Rational> pack_coefficients(const TransferFunction& tf) {
  std::vector<Rational> out = tf.num().coeffs();
  out.insert(out.end(), tf.den().coeffs().begin(), tf.den().coeffs().end());
  return out;
}

inline TransferFunction unpack_coefficients(const std::vector<Rational>& packed, std::size_t num_len) {
  if (num_len == 0 || num_len >= packed.size()) throw std::invalid_argument("bad numerator length");
  const auto split = packed.begin() + static_cast<std::ptrdiff_t>(num_len);
  return TransferFunction{Poly<Rational>(std::vector<Rational>(packed.begin(), split)),
                          Poly<Rational>(std::vector<Rational>(split, packed.end()))};
}

/// Cancels common factors and makes the denominator monic.
inline TransferFunction reduce(const TransferFunction& tf) {
  if (is_zero(tf.num())) return TransferFunction{Poly<Rational>{Rational{0}}, Poly<Rational>{Rational{1}}};
  const Poly<Rational> g = gcd(tf.num(), tf.den());
  Poly<Rational> n = divmod(tf.num(), g).first;
  Poly<Rational> d = divmod(tf.den(), g).first;
  const Rational lead = d.leading();
  return TransferFunction{scale(n, Rational{1 / lead}), scale(d, Rational{1 / lead})};
}

struct ControllerOrders {
  int numerator = 0;    // M_C
  int denominator = 0;  // N_C

  friend bool operator==(const ControllerOrders&, const ControllerOrders&) = default;
};

/// A controller whose coefficients live on the <I,F> grid. Orders are as
/// declared: leading zeros are kept.
struct Controller {
  FixedPointFormat format;
  std::vector<FixedPointValue> num;
  std::vector<FixedPointValue> den;

  static Controller zero(FixedPointFormat fmt, ControllerOrders orders) {
    return Controller{fmt,
                      std::vector<FixedPointValue>(static_cast<std::size_t>(orders.numerator) + 1,
                                                   FixedPointValue::zero(fmt)),
                      std::vector<FixedPointValue>(static_cast<std::size_t>(orders.denominator) + 1,
                                                   FixedPointValue::zero(fmt))};
  }

  static Controller quantized(const std::vector<Rational>& num, const std::vector<Rational>& den,
                              FixedPointFormat fmt, Rounding mode) {
    return Controller{fmt, quantize_poly(num, fmt, mode), quantize_poly(den, fmt, mode)};
  }

  ControllerOrders orders() const {
    return {static_cast<int>(num.size()) - 1, static_cast<int>(den.size()) - 1};
  }
  Poly<Rational> numerator_poly() const { return to_rational(Poly<FixedPointValue>(num)); }
  Poly<Rational> denominator_poly() const { return to_rational(Poly<FixedPointValue>(den)); }
  bool is_zero() const {
    for (const auto& c : num) if (c.raw() != 0) return false;
    for (const auto& c : den) if (c.raw() != 0) return false;
    return true;
  }
  TransferFunction transfer_function() const { return {numerator_poly(), denominator_poly()}; }

  friend bool operator==(const Controller&, const Controller&) = default;
};

inline std::string to_string(const Controller& c) {
  std::string out = "(";
  for (std::size_t i = 0; i < c.num.size(); ++i) out += (i ? " " : "") + c.num[i].to_decimal();
  out += ")/(";
  for (std::size_t i = 0; i < c.den.size(); ++i) out += (i ? " " : "") + c.den[i].to_decimal();
  return out + ")";
}

/// S = Cn*Gn + Cd*Gd over any coefficient domain, without degree checks.
template <typename T>
Poly<T> char_poly_generic(const Poly<T>& cn, const Poly<T>& cd, const Poly<T>& gn, const Poly<T>& gd) {
  return cn * gn + cd * gd;
}

/// Exact characteristic polynomial. Throws DegenerateCharPoly when S is the
/// zero polynomial or its degree differs from N_C + N_G (zero leading term).
inline Poly<Rational> char_poly(const Poly<Rational>& cn, const Poly<Rational>& cd,
                                const TransferFunction& plant) {
  const Poly<Rational> s = char_poly_generic(cn, cd, plant.num(), plant.den());
  if (is_zero(s)) throw DegenerateCharPoly("characteristic polynomial is identically zero");
  const std::size_t expected = cd.degree() + plant.den_order();
  const Poly<Rational> trimmed = normalize(s);
  if (trimmed.degree() != expected) {
    throw DegenerateCharPoly("characteristic polynomial has degree " + std::to_string(trimmed.degree()) +
                             ", expected " + std::to_string(expected));
  }
  return trimmed;
}

inline Poly<Rational> char_poly(const Controller& controller, const TransferFunction& plant) {
  return char_poly(controller.numerator_poly(), controller.denominator_poly(), plant);
}

/// Fixed-point characteristic polynomial. Controller and plant coefficients
/// are lifted to their common working format; products truncate.
inline Poly<FixedPointValue> char_poly_fixed(const Controller& controller,
                                             const std::vector<FixedPointValue>& plant_num,
                                             const std::vector<FixedPointValue>& plant_den,
                                             FixedPointFormat plant_fmt) {
  const FixedPointFormat w = working_format(controller.format, plant_fmt);
  const auto lift = [&](const std::vector<FixedPointValue>& v) {
    std::vector<FixedPointValue> out;
    out.reserve(v.size());
    for (const auto& c : v) out.push_back(c.rescale(w));
    return Poly<FixedPointValue>(std::move(out));
  };
  const Poly<FixedPointValue> s =
      char_poly_generic(lift(controller.num), lift(controller.den), lift(plant_num), lift(plant_den));
  if (is_zero(s)) throw DegenerateCharPoly("characteristic polynomial is identically zero");
  const std::size_t expected = controller.den.size() - 1 + plant_den.size() - 1;
  const Poly<FixedPointValue> trimmed = normalize(s);
  if (trimmed.degree() != expected) throw DegenerateCharPoly("characteristic polynomial degree drop");
  return trimmed;
}

inline constexpr double kDefaultCancellationTolerance = 1e-6;

/// True iff the loop product C*G has a numerator root and a denominator root
/// within `tol` of each other, both of modulus >= 1 - tol.
inline bool cancellation_on_or_outside_unit_circle(const Poly<Rational>& cn, const Poly<Rational>& cd,
                                                   const TransferFunction& plant,
                                                   double tol = kDefaultCancellationTolerance) {
  std::vector<std::complex<double>> zeros;
  std::vector<std::complex<double>> poles;
  const auto collect = [](const Poly<Rational>& p, std::vector<std::complex<double>>& into) {
    if (is_zero(p)) return;
    const auto r = roots(p);
    into.insert(into.end(), r.begin(), r.end());
  };
  if (is_zero(cn) || is_zero(plant.num())) return false;
  collect(cn, zeros);
  collect(plant.num(), zeros);
  collect(cd, poles);
  collect(plant.den(), poles);
  for (const auto& z : zeros) {
    if (std::abs(z) < 1.0 - tol) continue;
    for (const auto& p : poles) {
      if (std::abs(p) >= 1.0 - tol && std::abs(z - p) <= tol) return true;
    }
  }
  return false;
}

inline bool cancellation_on_or_outside_unit_circle(const Controller& controller, const TransferFunction& plant,
                                                   double tol = kDefaultCancellationTolerance) {
  return cancellation_on_or_outside_unit_circle(controller.numerator_poly(), controller.denominator_poly(),
                                                plant, tol);
}

}  // namespace fwlsynth
