#pragma once

// Closed-loop simulation of the unity-feedback loop
//
//   r -> e = r - y^ -> C (fixed point) -> u + nu2 -> G (high precision) -> y
//   y^ = y + nu1
//
// and frequency-domain margins and sensitivity functions of the loop.

#include "fwlsynth/fixed_point.hpp"
#include "fwlsynth/poly.hpp"
#include "fwlsynth/rational.hpp"
#include "fwlsynth/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fwlsynth {

class ArithmeticOverflow : public std::overflow_error {
public:
  ArithmeticOverflow(std::size_t step, const std::string& what)
      : std::overflow_error("fixed-point overflow in the controller at step " + std::to_string(step) + ": " + what),
        step_(step) {}
  std::size_t step() const { return step_; }

private:
  std::size_t step_;
};

class EvaluationSingularity : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class DegenerateLoop : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

enum class NoiseMode { Zero, WorstCase, SeededUniform };

inline const char* to_string(NoiseMode m) {
  switch (m) {
    case NoiseMode::Zero: return "zero";
    case NoiseMode::WorstCase: return "worst-case";
    case NoiseMode::SeededUniform: return "uniform";
  }
  return "?";
}

/// ADC (q1) and DAC (q2) quantization steps; injected noise stays within q/2.
struct NoiseModel {
  Rational q1{0};
  Rational q2{0};
  NoiseMode mode = NoiseMode::Zero;

  static NoiseModel zero() { return {}; }
  /// Noise bounds matching a controller grid of 2^-F on both converters.
  static NoiseModel for_format(const FixedPointFormat& f, NoiseMode mode) { return {f.step(), f.step(), mode}; }
};

struct TraceSample {
  std::size_t k = 0;
  Rational t;
  Rational r;
  FixedPointValue e;
  FixedPointValue u;
  HighPrecision y;
};

struct SimulationTrace {
  Rational sample_time;
  std::vector<TraceSample> samples;
  /// Set when |y| exceeded the divergence threshold; the trace stops there.
  std::optional<std::size_t> diverged_at;

  bool diverged() const { return diverged_at.has_value(); }
  HighPrecision max_abs_output() const {
    HighPrecision best = 0;
    for (const auto& s : samples) best = std::max(best, HighPrecision{boost::multiprecision::abs(s.y)});
    return best;
  }
};

inline constexpr double kDivergenceFactor = 1e6;

/// ADC model: truncates a high-precision value onto the grid of `fmt`.
inline FixedPointValue quantize_truncate(const HighPrecision& x, const FixedPointFormat& fmt) {
  const HighPrecision scaled = boost::multiprecision::trunc(boost::multiprecision::ldexp(x, fmt.fraction_bits));
  const BigInt raw = scaled.convert_to<BigInt>();
  if (boost::multiprecision::abs(raw) >= BigInt{static_cast<long long>(fmt.raw_bound() - 1)} + 1) {
    throw FixedPointOverflow("signal out of range");
  }
  return FixedPointValue::from_raw(static_cast<__int128>(raw.convert_to<long long>()), fmt);
}

/// Format of controller-path signals: the controller's fraction bits with
/// enough integer headroom for transients.
inline FixedPointFormat signal_format(const FixedPointFormat& coefficients) {
  const int f = coefficients.fraction_bits;
  return FixedPointFormat{std::max(coefficients.integer_bits, std::min(40, 63 - f)), f};
}

struct StepOptions {
  Rational reference{1};
  std::uint64_t seed = 0;
};

inline SimulationTrace step_response(const Controller& controller, const TransferFunction& plant,
                                     const Rational& sample_time, std::size_t steps, const NoiseModel& noise,
                                     const StepOptions& options = {}) {
  if (steps == 0) throw std::invalid_argument("steps must be at least 1");
  if (controller.den.empty() || controller.den.front().raw() == 0) {
    throw std::invalid_argument("controller denominator leading coefficient must be nonzero");
  }
  if (controller.num.size() > controller.den.size()) throw std::invalid_argument("controller must be proper");
  if (plant.num_order() >= plant.den_order() && !is_zero(plant.num())) {
    throw std::invalid_argument("simulation needs a strictly proper plant (no algebraic loop)");
  }

  const FixedPointFormat sig = signal_format(controller.format);
  const std::size_t cn_delay = controller.den.size() - controller.num.size();
  std::vector<FixedPointValue> beta, alpha;
  for (const auto& c : controller.num) beta.push_back(c.rescale(sig));
  for (const auto& c : controller.den) alpha.push_back(c.rescale(sig));

  const std::size_t g_delay = plant.den_order() - plant.num_order();
  std::vector<HighPrecision> b, a;
  for (const auto& c : plant.num().coeffs()) b.push_back(to_high_precision(c));
  for (const auto& c : plant.den().coeffs()) a.push_back(to_high_precision(c));

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  const HighPrecision q1 = to_high_precision(noise.q1);
  const HighPrecision q2 = to_high_precision(noise.q2);
  const auto draw = [&](const HighPrecision& q, int sign) -> HighPrecision {
    switch (noise.mode) {
      case NoiseMode::Zero: return 0;
      case NoiseMode::WorstCase: return q / 2 * sign;
      case NoiseMode::SeededUniform: return q * HighPrecision{unit(rng)};
    }
    return 0;
  };

  SimulationTrace trace{sample_time, {}, std::nullopt};
  trace.samples.reserve(steps);
  std::vector<FixedPointValue> e_hist, u_hist;
  std::vector<HighPrecision> y_hist, u_applied;
  const HighPrecision r = to_high_precision(options.reference);
  const HighPrecision limit = kDivergenceFactor * std::max(HighPrecision{1}, HighPrecision{boost::multiprecision::abs(r)});
  int last_sign = 1;

  for (std::size_t k = 0; k < steps; ++k) {
    // Plant output from past inputs.
    HighPrecision y = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::size_t lag = g_delay + i;
      if (lag <= k && lag > 0) y += b[i] * u_applied[k - lag];
    }
    for (std::size_t j = 1; j < a.size(); ++j) {
      if (j <= k) y -= a[j] * y_hist[k - j];
    }
    y /= a[0];
    y_hist.push_back(y);
    const HighPrecision y_meas = y + draw(q1, last_sign);

    FixedPointValue e = FixedPointValue::zero(sig);
    FixedPointValue u = FixedPointValue::zero(sig);
    try {
      e = quantize_truncate(HighPrecision{r - y_meas}, sig);
      FixedPointValue acc = FixedPointValue::zero(sig);
      e_hist.push_back(e);
      for (std::size_t i = 0; i < beta.size(); ++i) {
        const std::size_t lag = cn_delay + i;
        if (lag <= k) acc = acc + beta[i] * e_hist[k - lag];
      }
      for (std::size_t j = 1; j < alpha.size(); ++j) {
        if (j <= k) acc = acc - alpha[j] * u_hist[k - j];
      }
      u = acc / alpha[0];
    } catch (const FixedPointOverflow& ex) {
      throw ArithmeticOverflow(k, ex.what());
    }
    u_hist.push_back(u);
    last_sign = e.raw() < 0 ? -1 : 1;
    u_applied.push_back(to_high_precision(u.to_rational()) + draw(q2, last_sign));

    trace.samples.push_back(TraceSample{k, Rational{sample_time * k}, options.reference, e, u, y_meas});
    if (boost::multiprecision::abs(y_meas) > limit) {
      trace.diverged_at = k;
      break;
    }
  }
  return trace;
}

/// Trace as CSV with header k,t,r,e,u,y. Controller-path signals are exact.
inline void write_trace_csv(std::ostream& os, const SimulationTrace& trace) {
  os << "k,t,r,e,u,y\n";
  for (const auto& s : trace.samples) {
    os << s.k << ',' << to_exact_string(s.t) << ',' << to_exact_string(s.r) << ',' << s.e.to_decimal() << ','
       << s.u.to_decimal() << ',' << s.y.str(17) << '\n';
  }
}

struct Margins {
  double gain_margin_db = std::numeric_limits<double>::infinity();
  double phase_margin_deg = std::numeric_limits<double>::infinity();
  /// rad/s; absent when there is no crossover.
  std::optional<double> phase_crossover;
  std::optional<double> gain_crossover;
};

inline std::string format_margin(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << v;
  return os.str();
}

/// Margins as key=value lines.
inline void write_margins(std::ostream& os, const Margins& m) {
  os << "gain_margin_db=" << format_margin(m.gain_margin_db) << '\n';
  os << "phase_margin_deg=" << format_margin(m.phase_margin_deg) << '\n';
  os << "phase_crossover_rad_s=" << (m.phase_crossover ? format_margin(*m.phase_crossover) : "none") << '\n';
  os << "gain_crossover_rad_s=" << (m.gain_crossover ? format_margin(*m.gain_crossover) : "none") << '\n';
}

inline constexpr std::size_t kMarginGridPoints = 20000;

namespace detail {

inline std::complex<double> evaluate_on_circle(const Poly<double>& num, const Poly<double>& den, double w) {
  const std::complex<double> z = std::polar(1.0, w);
  std::complex<double> n = 0, d = 0;
  for (double c : num.coeffs()) n = n * z + c;
  for (double c : den.coeffs()) d = d * z + c;
  if (std::abs(d) < 1e-12 * std::max(1.0, std::abs(n))) throw EvaluationSingularity("pole on the unit circle");
  return n / d;
}

inline std::vector<double> frequency_grid(double shift) {
  // Log-spaced normalized frequencies in (0, pi], pi itself included.
  std::vector<double> w;
  w.reserve(kMarginGridPoints + 1);
  const double lo = std::log10(std::numbers::pi * 1e-5), hi = std::log10(std::numbers::pi);
  for (std::size_t i = 0; i < kMarginGridPoints; ++i) {
    const double x = lo + (hi - lo) * (static_cast<double>(i) + shift) / static_cast<double>(kMarginGridPoints);
    w.push_back(std::pow(10.0, x));
  }
  // The retry grid stops just short of pi, where a pole at z = -1 would sit.
  w.push_back(shift == 0.0 ? std::numbers::pi : std::numbers::pi * (1 - 1e-9));
  return w;
}

template <typename F>
double bisect(F f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 60; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

inline Margins margins_on_grid(const Poly<double>& num, const Poly<double>& den, double sample_time,
                               const std::vector<double>& grid) {
  Margins m;
  const auto L = [&](double w) { return evaluate_on_circle(num, den, w); };
  const auto phase_deg = [](std::complex<double> v) {
    double p = std::arg(v) * 180.0 / std::numbers::pi;
    if (p > 0) p -= 360.0;
    return p;
  };
  const auto consider_gm = [&](double w) {
    const auto v = L(w);
    if (v.real() >= 0) return;
    const double gm = -20.0 * std::log10(std::abs(v));
    if (gm < m.gain_margin_db) {
      m.gain_margin_db = gm;
      m.phase_crossover = w / sample_time;
    }
  };
  const auto consider_pm = [&](double w) {
    const double pm = 180.0 + phase_deg(L(w));
    if (pm < m.phase_margin_deg) {
      m.phase_margin_deg = pm;
      m.gain_crossover = w / sample_time;
    }
  };

  std::vector<std::complex<double>> v;
  v.reserve(grid.size());
  for (double w : grid) v.push_back(L(w));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double scale = std::max(1.0, std::abs(v[i]));
    if (std::abs(v[i].imag()) <= 1e-12 * scale) consider_gm(grid[i]);
    if (i == 0) continue;
    const double im0 = v[i - 1].imag(), im1 = v[i].imag();
    if ((im0 < 0) != (im1 < 0) && std::abs(im0) > 1e-12 && std::abs(im1) > 1e-12) {
      consider_gm(bisect([&](double w) { return L(w).imag(); }, grid[i - 1], grid[i]));
    }
    const double g0 = std::abs(v[i - 1]) - 1.0, g1 = std::abs(v[i]) - 1.0;
    if ((g0 < 0) != (g1 < 0)) {
      consider_pm(bisect([&](double w) { return std::abs(L(w)) - 1.0; }, grid[i - 1], grid[i]));
    }
  }
  return m;
}

}  // namespace detail

/// Gain and phase margins of the transfer function `tf` over (0, pi/T].
inline Margins margins(const TransferFunction& tf, double sample_time) {
  const Poly<double> num = to_double(tf.num()), den = to_double(tf.den());
  try {
    return detail::margins_on_grid(num, den, sample_time, detail::frequency_grid(0.0));
  } catch (const EvaluationSingularity&) {
    return detail::margins_on_grid(num, den, sample_time, detail::frequency_grid(0.37));
  }
}

struct Sensitivities {
  TransferFunction h1;  // nu1 -> y^
  TransferFunction h2;  // nu2 -> y^
  TransferFunction h3;  // r -> y^
};

inline Sensitivities sensitivity_functions(const Controller& controller, const TransferFunction& plant) {
  const Poly<Rational> cn = controller.numerator_poly(), cd = controller.denominator_poly();
  const Poly<Rational> s = char_poly_generic(cn, cd, plant.num(), plant.den());
  if (is_zero(s)) throw DegenerateLoop("1 + C G is identically zero");
  return {TransferFunction{cd * plant.den(), s}, TransferFunction{cd * plant.num(), s},
          TransferFunction{cn * plant.num(), s}};
}

/// Margins of the closed loop r -> y^ (H3 = CG / (1 + CG)).
inline Margins frequency_margins(const Controller& controller, const TransferFunction& plant, double sample_time) {
  return margins(sensitivity_functions(controller, plant).h3, sample_time);
}

/// Margins of the open loop C G.
inline Margins loop_margins(const Controller& controller, const TransferFunction& plant, double sample_time) {
  return margins(TransferFunction{controller.numerator_poly() * plant.num(), controller.denominator_poly() * plant.den()},
                 sample_time);
}

}  // namespace fwlsynth
