#pragma once

// Floating-point polynomial roots: companion-matrix eigenvalues followed by a
// few Newton steps in long double. Independent of the Jury machinery, so the
// test suites use it as an oracle for the algebraic stability verdicts.

#include "fwlsynth/poly.hpp"
#include "fwlsynth/rational.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace fwlsynth {

inline std::vector<std::complex<double>> roots(const Poly<double>& p_in) {
  std::vector<double> c = p_in.coeffs();
  while (c.size() > 1 && c.front() == 0.0) c.erase(c.begin());
  const std::size_t n = c.size() - 1;
  if (n == 0) return {};

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) companion(0, static_cast<Eigen::Index>(j)) = -c[j + 1] / c[0];
  for (std::size_t i = 1; i < n; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("companion eigenvalue solve failed");

  using cld = std::complex<long double>;
  std::vector<std::complex<double>> out;
  out.reserve(n);
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    cld z = solver.eigenvalues()[k];
    for (int iter = 0; iter < 3; ++iter) {
      cld value = static_cast<long double>(c[0]);
      cld deriv = 0.0L;
      for (std::size_t i = 1; i <= n; ++i) {
        deriv = deriv * z + value;
        value = value * z + static_cast<long double>(c[i]);
      }
      if (std::abs(deriv) == 0.0L) break;
      const cld step = value / deriv;
      // Newton only refines; a step larger than the root itself means we are
      // at a multiple root where the eigenvalue is already the better answer.
      if (std::abs(step) > 1e-6L * std::max(1.0L, std::abs(z))) break;
      z -= step;
    }
    out.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return out;
}

inline std::vector<std::complex<double>> roots(const Poly<Rational>& p) { return roots(to_double(p)); }

/// Largest root modulus; 0 for constant polynomials.
inline double root_oracle(const Poly<Rational>& p) {
  double best = 0.0;
  for (const auto& r : roots(p)) best = std::max(best, std::abs(r));
  return best;
}

inline double root_oracle(const Poly<double>& p) {
  double best = 0.0;
  for (const auto& r : roots(p)) best = std::max(best, std::abs(r));
  return best;
}

}  // namespace fwlsynth
