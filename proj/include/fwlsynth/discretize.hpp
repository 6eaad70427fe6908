#pragma once

// Zero-order-hold discretization G(z) = (1 - z^-1) Z{ L^-1{ G(s)/s } }.
//
// G(s) is realized in controllable canonical form, (Ad, Bd) come from the
// exponential of the augmented matrix [[A, B], [0, 0]] T, and the pulse
// transfer function C adj(zI - Ad) Bd / det(zI - Ad) + D is assembled with
// the Faddeev-LeVerrier recursion. Everything runs in quad precision and the
// resulting coefficients are snapped back to rationals.

#include "fwlsynth/poly.hpp"
#include "fwlsynth/rational.hpp"
#include "fwlsynth/roots.hpp"
#include "fwlsynth/transfer.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fwlsynth {

class ImproperTransferFunction : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class NonpositiveSampleTime : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

using HPMatrix = Eigen::Matrix<HighPrecision, Eigen::Dynamic, Eigen::Dynamic>;

/// Continuous-time plant in s with its sample time in seconds.
struct ContinuousTF {
  Poly<Rational> num;
  Poly<Rational> den;
  Rational sample_time;
};

inline const HighPrecision kSnapTolerance{1e-12};

namespace detail {

inline HighPrecision inf_norm(const HPMatrix& m) {
  HighPrecision best = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    HighPrecision row = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) row += boost::multiprecision::abs(m(i, j));
    if (row > best) best = row;
  }
  return best;
}

}  // namespace detail

/// exp(A t) by scaling and squaring with a truncated Taylor series.
inline HPMatrix matrix_exp(const HPMatrix& a, const HighPrecision& t) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix_exp needs a square matrix");
  const Eigen::Index n = a.rows();
  HPMatrix m = a * t;
  int squarings = 0;
  HighPrecision norm = detail::inf_norm(m);
  while (norm > HighPrecision{0.5}) {
    norm /= 2;
    ++squarings;
  }
  m /= HighPrecision{pow(HighPrecision{2}, squarings)};

  const HPMatrix identity = HPMatrix::Identity(n, n);
  HPMatrix result = identity;
  HPMatrix term = identity;
  const HighPrecision eps = std::numeric_limits<HighPrecision>::epsilon();
  for (int k = 1; k < 60; ++k) {
    term = term * m / HighPrecision{k};
    result += term;
    if (detail::inf_norm(term) <= eps * detail::inf_norm(result)) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

struct StateSpace {
  HPMatrix a;
  HPMatrix b;  // n x 1
  HPMatrix c;  // 1 x n
  HighPrecision d;
};

/// Controllable canonical realization of a proper num/den.
inline StateSpace controllable_canonical(const Poly<Rational>& num_in, const Poly<Rational>& den_in) {
  const Poly<Rational> den = normalize(den_in);
  const Poly<Rational> num = normalize(num_in);
  if (is_zero(den)) throw std::invalid_argument("zero denominator");
  if (!is_zero(num) && num.degree() > den.degree()) throw ImproperTransferFunction("G(s) must be proper");

  const std::size_t n = den.degree();
  const Rational lead = den.leading();
  std::vector<Rational> a(n + 1), b(n + 1, Rational{0});
  for (std::size_t i = 0; i <= n; ++i) a[i] = den[i] / lead;
  for (std::size_t i = 0; i < num.size(); ++i) b[n + 1 - num.size() + i] = num[i] / lead;

  const auto ni = static_cast<Eigen::Index>(n);
  StateSpace ss{HPMatrix::Zero(ni, ni), HPMatrix::Zero(ni, 1), HPMatrix::Zero(1, ni), to_high_precision(b[0])};
  for (Eigen::Index j = 0; j < ni; ++j) {
    ss.a(0, j) = to_high_precision(Rational{-a[static_cast<std::size_t>(j) + 1]});
    ss.c(0, j) = to_high_precision(Rational{b[static_cast<std::size_t>(j) + 1] - a[static_cast<std::size_t>(j) + 1] * b[0]});
  }
  for (Eigen::Index i = 1; i < ni; ++i) ss.a(i, i - 1) = 1;
  if (ni > 0) ss.b(0, 0) = 1;
  return ss;
}

/// Returns a warning per continuous pole with |p T| > pi.
inline std::vector<std::string> nyquist_warnings(const ContinuousTF& g) {
  std::vector<std::string> out;
  const double t = to_double(g.sample_time);
  for (const auto& p : roots(normalize(g.den))) {
    if (std::abs(p) * t > std::numbers::pi) {
      out.push_back("pole " + std::to_string(p.real()) + (p.imag() < 0 ? "" : "+") + std::to_string(p.imag()) +
                    "j has |pT| > pi; the sample time may violate the Nyquist criterion");
    }
  }
  return out;
}

inline TransferFunction zoh_discretize(const ContinuousTF& g, std::vector<std::string>* warnings = nullptr) {
  if (g.sample_time <= 0) throw NonpositiveSampleTime("sample time must be positive");
  const StateSpace ss = controllable_canonical(g.num, g.den);
  if (warnings) *warnings = nyquist_warnings(g);
  const Eigen::Index n = ss.a.rows();
  if (n == 0) return TransferFunction{Poly<Rational>{snap_to_rational(ss.d, kSnapTolerance)}, Poly<Rational>{Rational{1}}};

  HPMatrix aug = HPMatrix::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = ss.a;
  aug.topRightCorner(n, 1) = ss.b;
  const HPMatrix e = matrix_exp(aug, to_high_precision(g.sample_time));
  const HPMatrix ad = e.topLeftCorner(n, n);
  const HPMatrix bd = e.topRightCorner(n, 1);

  // Faddeev-LeVerrier: det(zI - Ad) = z^n + c_1 z^(n-1) + ... + c_n and
  // adj(zI - Ad) = sum_k z^(n-1-k) N_k.
  const HPMatrix identity = HPMatrix::Identity(n, n);
  std::vector<HighPrecision> charpoly{HighPrecision{1}};
  std::vector<HighPrecision> numer;
  HPMatrix nk = identity;
  for (Eigen::Index k = 1; k <= n; ++k) {
    numer.push_back((ss.c * nk * bd)(0, 0));
    const HPMatrix an = ad * nk;
    const HighPrecision ck = -an.trace() / HighPrecision{k};
    charpoly.push_back(ck);
    nk = an + ck * identity;
  }

  std::vector<Rational> num_out, den_out;
  num_out.push_back(snap_to_rational(ss.d, kSnapTolerance));
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    num_out.push_back(snap_to_rational(numer[i] + ss.d * charpoly[i + 1], kSnapTolerance));
  }
  for (const auto& c : charpoly) den_out.push_back(snap_to_rational(c, kSnapTolerance));
  return TransferFunction{Poly<Rational>(std::move(num_out)), Poly<Rational>(std::move(den_out))};
}

}  // namespace fwlsynth
