#include "fwlsynth/jury.hpp"
#include "fwlsynth/simulate.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace fwlsynth {
namespace {

Rational dec(const char* s) { return parse_decimal(s); }
Poly<Rational> P(std::initializer_list<Rational> c) { return Poly<Rational>(c); }

const FixedPointFormat k4_16{4, 16};
const TransferFunction kCruise{P({dec("0.0264")}), P({1, dec("-0.9998")})};
const Rational kT = dec("0.2");

Controller truncated_controller() {
  return Controller::quantized({dec("2.72"), dec("-4.153"), dec("1.896")}, {1, dec("-1.844"), dec("0.8496")}, k4_16,
                               Rounding::Truncate);
}

Controller final_controller() {
  return Controller::quantized({dec("11.035202"), dec("5.846100"), dec("4.901855")},
                               {dec("1.097901"), dec("0.063110"), dec("0.128357")}, k4_16, Rounding::Nearest);
}

Controller static_gain(const char* k) { return Controller::quantized({dec(k)}, {1}, k4_16, Rounding::Truncate); }

TEST(StepResponse, ZeroControllerGivesZeroOutput) {
  Controller c = Controller::zero(k4_16, {2, 2});
  c.den[0] = quantize_truncate(Rational{1}, k4_16);
  const auto trace = step_response(c, kCruise, kT, 200, NoiseModel::zero());
  ASSERT_EQ(trace.samples.size(), 200u);
  for (const auto& s : trace.samples) {
    EXPECT_EQ(s.y, 0);
    EXPECT_EQ(s.u.raw(), 0);
  }
}

TEST(StepResponse, TruncatedControllerDiverges) {
  const auto trace = step_response(truncated_controller(), kCruise, kT, 500, NoiseModel::zero());
  ASSERT_TRUE(trace.diverged());
  EXPECT_LT(*trace.diverged_at, 500u);
}

TEST(StepResponse, FinalControllerSettles) {
  const auto trace = step_response(final_controller(), kCruise, kT, 2000, NoiseModel::zero());
  ASSERT_FALSE(trace.diverged());
  // Type-0 loop: y -> L(1) / (1 + L(1)).
  const Rational l1 = evaluate(final_controller().numerator_poly(), Rational{1}) * evaluate(kCruise.num(), Rational{1}) /
                      (evaluate(final_controller().denominator_poly(), Rational{1}) * evaluate(kCruise.den(), Rational{1}));
  const double expected = to_double(Rational{l1 / (1 + l1)});
  EXPECT_NEAR(trace.samples.back().y.convert_to<double>(), expected, 1e-3);
}

TEST(StepResponse, WorstCaseNoiseStaysBounded) {
  const auto trace =
      step_response(final_controller(), kCruise, kT, 10000, NoiseModel::for_format(k4_16, NoiseMode::WorstCase));
  EXPECT_FALSE(trace.diverged());
  EXPECT_EQ(trace.samples.size(), 10000u);
  EXPECT_LT(trace.max_abs_output(), 10);
}

TEST(StepResponse, UniformNoiseIsDeterministicAndBounded) {
  const auto noise = NoiseModel::for_format(k4_16, NoiseMode::SeededUniform);
  const auto a = step_response(final_controller(), kCruise, kT, 300, noise, {Rational{1}, 5});
  const auto b = step_response(final_controller(), kCruise, kT, 300, noise, {Rational{1}, 5});
  const auto c = step_response(final_controller(), kCruise, kT, 300, noise, {Rational{1}, 6});
  std::ostringstream sa, sb, sc;
  write_trace_csv(sa, a);
  write_trace_csv(sb, b);
  write_trace_csv(sc, c);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(sa.str(), sc.str());
}

TEST(StepResponse, NoiseBoundsAreRespected) {
  // With a zero controller the plant sees only nu2 and the output only nu1.
  Controller c = Controller::zero(k4_16, {0, 0});
  c.den[0] = quantize_truncate(Rational{1}, k4_16);
  const TransferFunction unit_delay{P({1}), P({1, 0})};
  for (NoiseMode mode : {NoiseMode::WorstCase, NoiseMode::SeededUniform}) {
    const NoiseModel noise{dec("0.5"), dec("0.25"), mode};
    const auto trace = step_response(c, unit_delay, kT, 100, noise, {Rational{0}, 1});
    for (const auto& s : trace.samples) EXPECT_LE(boost::multiprecision::abs(s.y), HighPrecision{0.25 + 0.125});
  }
}

TEST(StepResponse, TraceCsv) {
  const auto trace = step_response(final_controller(), kCruise, kT, 3, NoiseModel::zero());
  std::ostringstream os;
  write_trace_csv(os, trace);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,t,r,e,u,y");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 8), "0,0,1,1,");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 8), "1,0.2,1,");
}

TEST(StepResponse, RejectsBadInput) {
  EXPECT_THROW(step_response(final_controller(), kCruise, kT, 0, NoiseModel::zero()), std::invalid_argument);
  EXPECT_THROW(step_response(Controller::zero(k4_16, {1, 1}), kCruise, kT, 5, NoiseModel::zero()),
               std::invalid_argument);
}

TEST(StepResponse, ControllerOverflowReportsStep) {
  const FixedPointFormat tiny{2, 60};
  // y[k+1] = -2 y[k] + 3 r: the signal range 2^3 is left within a few steps.
  const Controller c = Controller::quantized({dec("3")}, {1}, tiny, Rounding::Truncate);
  const TransferFunction integrator{P({1}), P({1, -1})};
  try {
    step_response(c, integrator, kT, 100, NoiseModel::zero(), {Rational{-1}, 0});
    FAIL() << "expected overflow";
  } catch (const ArithmeticOverflow& e) {
    EXPECT_GT(e.step(), 0u);
  }
}

TEST(Margins, StaticGains) {
  const TransferFunction minus_half{P({dec("-0.5")}), P({1})};
  const auto m = margins(minus_half, 1.0);
  EXPECT_NEAR(m.gain_margin_db, 20 * std::log10(2.0), 1e-9);
  EXPECT_TRUE(std::isinf(m.phase_margin_deg));
  EXPECT_NEAR(margins(TransferFunction{P({-1}), P({1})}, 1.0).gain_margin_db, 0.0, 1e-12);
  EXPECT_TRUE(std::isinf(margins(TransferFunction{P({dec("0.5")}), P({1})}, 1.0).gain_margin_db));
}

TEST(Margins, FirstOrderLoop) {
  // L = k / (z - p): phase -180 at w = pi, |L(-1)| = k / (1 + p).
  const TransferFunction l{P({dec("0.4")}), P({1, dec("-0.5")})};
  const auto m = margins(l, 0.5);
  EXPECT_NEAR(m.gain_margin_db, -20 * std::log10(0.4 / 1.5), 1e-6);
  ASSERT_TRUE(m.phase_crossover.has_value());
  EXPECT_NEAR(*m.phase_crossover, std::numbers::pi / 0.5, 1e-9);
  // |L| < 1 everywhere on the circle: no gain crossover.
  EXPECT_TRUE(std::isinf(m.phase_margin_deg));
}

TEST(Margins, IntegratorPhaseMargin) {
  // L = k / (z - 1); at the gain crossover |e^jw - 1| = k, i.e. w = 2 asin(k/2),
  // and the phase of 1 / (e^jw - 1) is -(pi + w) / 2.
  const double k = 0.5;
  const auto m = margins(TransferFunction{P({from_double(k)}), P({1, -1})}, 1.0);
  const double wc = 2 * std::asin(k / 2);
  ASSERT_TRUE(m.gain_crossover.has_value());
  EXPECT_NEAR(*m.gain_crossover, wc, 1e-9);
  EXPECT_NEAR(m.phase_margin_deg, 180.0 - (180.0 + wc * 180.0 / std::numbers::pi) / 2, 1e-6);
  EXPECT_NEAR(m.gain_margin_db, -20 * std::log10(k / 2), 1e-6);
}

TEST(Margins, FinalControllerClosedLoop) {
  const auto m = frequency_margins(final_controller(), kCruise, to_double(kT));
  EXPECT_NEAR(m.gain_margin_db, 17.8, 0.5);
  EXPECT_TRUE(std::isinf(m.phase_margin_deg));
  const auto open = loop_margins(final_controller(), kCruise, to_double(kT));
  EXPECT_NEAR(open.gain_margin_db, 18.82, 0.05);
  EXPECT_NEAR(open.phase_margin_deg, 65.5, 0.5);
}

TEST(Margins, UnitCirclePoleIsPerturbed) {
  // Pole at z = -1 sits exactly on the last grid point.
  EXPECT_NO_THROW(margins(TransferFunction{P({1}), P({1, 1})}, 1.0));
}

TEST(Margins, KeyValueExport) {
  std::ostringstream os;
  write_margins(os, margins(TransferFunction{P({dec("-0.5")}), P({1})}, 1.0));
  EXPECT_EQ(os.str().substr(0, 22), "gain_margin_db=6.0206\n");
  EXPECT_NE(os.str().find("phase_margin_deg=inf\n"), std::string::npos);
}

TEST(Sensitivity, ZeroController) {
  Controller c = Controller::zero(k4_16, {1, 1});
  c.den[0] = quantize_truncate(Rational{1}, k4_16);
  const auto h = sensitivity_functions(c, kCruise);
  EXPECT_EQ(reduce(h.h1), reduce(TransferFunction{P({1}), P({1})}));
  EXPECT_EQ(reduce(h.h2), reduce(kCruise));
  EXPECT_TRUE(is_zero(h.h3.num()));
}

TEST(Sensitivity, H1PlusH3IsOne) {
  for (const auto& c : {truncated_controller(), final_controller(), static_gain("0.75")}) {
    const auto h = sensitivity_functions(c, kCruise);
    ASSERT_EQ(h.h1.den(), h.h3.den());
    EXPECT_EQ(normalize(h.h1.num() + h.h3.num()), h.h1.den());
    EXPECT_EQ(h.h1.den(), char_poly(c, kCruise));
  }
}

TEST(Sensitivity, FirstOrderHandExpansion) {
  // C = 2 / (z - 0.5), G = 0.25 / (z - 1): S = (z - 0.5)(z - 1) + 0.5.
  const Controller c = Controller::quantized({0, 2}, {1, dec("-0.5")}, k4_16, Rounding::Truncate);
  const TransferFunction g{P({dec("0.25")}), P({1, -1})};
  const auto h = sensitivity_functions(c, g);
  const auto s = P({1, dec("-1.5"), 1});
  EXPECT_EQ(h.h1, (TransferFunction{P({1, dec("-1.5"), dec("0.5")}), s}));
  EXPECT_EQ(h.h2, (TransferFunction{P({dec("0.25"), dec("-0.125")}), s}));
  EXPECT_EQ(h.h3, (TransferFunction{P({dec("0.5")}), s}));
}

TEST(Sensitivity, DegenerateLoop) {
  // C = 1, G = -1: 1 + CG = 0.
  const Controller c = Controller::quantized({1}, {1}, k4_16, Rounding::Truncate);
  EXPECT_THROW(sensitivity_functions(c, TransferFunction{P({-1}), P({1})}), DegenerateLoop);
}

}  // namespace
}  // namespace fwlsynth
