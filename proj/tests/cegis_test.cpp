#include "fwlsynth/cegis.hpp"

#include <gtest/gtest.h>

namespace fwlsynth {
namespace {

Rational dec(const char* s) { return parse_decimal(s); }
Poly<Rational> P(std::initializer_list<Rational> c) { return Poly<Rational>(c); }

const FixedPointFormat k4_16{4, 16};
const FixedPointFormat k16_24{16, 24};
const TransferFunction kCruise{P({dec("0.0264")}), P({1, dec("-0.9998")})};

PlantFamily cruise(const char* delta) {
  return PlantFamily(kCruise, {dec(delta), dec(delta), dec(delta)}, k16_24);
}

Controller final_controller() {
  return Controller::quantized({dec("11.035202"), dec("5.846100"), dec("4.901855")},
                               {dec("1.097901"), dec("0.063110"), dec("0.128357")}, k4_16, Rounding::Nearest);
}

Controller first_candidate() {
  return Controller::quantized({dec("12.402664"), dec("-11.439667"), dec("0.596756")},
                               {dec("4.003906"), dec("-0.287949"), dec("0.015625")}, k4_16, Rounding::Nearest);
}

GridPlant grid_plant(std::vector<Rational> packed, std::size_t num_len, FixedPointFormat f) {
  GridPlant p{f, num_len, {}};
  for (const auto& c : packed) p.raw.push_back(quantize_nearest(c, f).raw());
  return p;
}

SynthesisConfig config(std::uint64_t seed) {
  SynthesisConfig c;
  c.controller_format = k4_16;
  c.orders = {2, 2};
  c.seed = seed;
  c.limits.timeout_seconds = 300;
  return c;
}

TEST(Synthesize, EmptyInputsAcceptZeroControllerVacuously) {
  const auto out = synthesize_candidate({}, k4_16, {2, 2}, 1, 1000);
  ASSERT_TRUE(out.controller.has_value());
  EXPECT_TRUE(out.controller->is_zero());
  EXPECT_EQ(out.evaluations, 1u);
}

TEST(Synthesize, StabilizesCounterexamplePlant) {
  const auto plant = grid_plant({dec("0.026506"), dec("1.000610"), dec("1.002838")}, 1, k16_24);
  const auto out = synthesize_candidate({plant}, k4_16, {2, 2}, 3, 200000);
  ASSERT_TRUE(out.controller.has_value());
  EXPECT_EQ(exact_verdict(*out.controller, plant.transfer_function()).status, Stability::Stable);
  EXPECT_NE(out.controller->den.front().raw(), 0);
}

TEST(Synthesize, ContradictoryPlantsOnTinyGridHaveNoCandidate) {
  // Orders (0,0) at <1,0>: k/d with k, d in {-1, 0, 1}. S = d(z - 1.5) +/- k
  // needs k/d = 1 for one plant and k/d = -1 for the other.
  const FixedPointFormat pf{4, 4};
  const auto g1 = grid_plant({1, 1, dec("-1.5")}, 1, pf);
  const auto g2 = grid_plant({-1, 1, dec("-1.5")}, 1, pf);
  const FixedPointFormat tiny{1, 0};
  EXPECT_TRUE(synthesize_candidate({g1}, tiny, {0, 0}, 1, 100).controller.has_value());
  EXPECT_TRUE(synthesize_candidate({g2}, tiny, {0, 0}, 1, 100).controller.has_value());
  const auto out = synthesize_candidate({g1, g2}, tiny, {0, 0}, 1, 100);
  EXPECT_FALSE(out.controller.has_value());
  EXPECT_FALSE(out.timed_out);
  EXPECT_LE(out.evaluations, 10u);
}

TEST(Synthesize, DeterministicForSeed) {
  const auto plant = grid_plant({dec("0.0264"), 1, dec("-0.9998")}, 1, k16_24);
  const auto a = synthesize_candidate({plant}, k4_16, {2, 2}, 11, 100000);
  const auto b = synthesize_candidate({plant}, k4_16, {2, 2}, 11, 100000);
  ASSERT_TRUE(a.controller && b.controller);
  EXPECT_EQ(*a.controller, *b.controller);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(VerifyUncertainty, ZeroCandidateYieldsCounterexample) {
  const auto out = verify_uncertainty(Controller::zero(k4_16, {2, 2}), cruise("0"), k16_24);
  ASSERT_EQ(out.kind, UncertaintyOutcome::Kind::Counterexample);
  EXPECT_TRUE(grid_box(cruise("0"), k16_24).contains(*out.counterexample));
}

TEST(VerifyUncertainty, FinalControllerPasses) {
  const auto out = verify_uncertainty(final_controller(), cruise("0"), {20, 28});
  EXPECT_EQ(out.kind, UncertaintyOutcome::Kind::Ok);
  EXPECT_EQ(out.box_verdict, Stability::Stable);
}

TEST(VerifyUncertainty, PointFamilyReducesToExactJury) {
  const TransferFunction g{P({dec("0.5")}), P({1, dec("-0.25")})};
  const auto fam = PlantFamily::point(g, k16_24);
  const auto stable = Controller::quantized({dec("0.5")}, {1}, k4_16, Rounding::Nearest);
  const auto unstable = Controller::quantized({dec("-3")}, {1}, k4_16, Rounding::Nearest);
  EXPECT_EQ(exact_verdict(stable, g).status, Stability::Stable);
  EXPECT_EQ(verify_uncertainty(stable, fam, k16_24).kind, UncertaintyOutcome::Kind::Ok);
  const auto bad = verify_uncertainty(unstable, fam, k16_24);
  ASSERT_EQ(bad.kind, UncertaintyOutcome::Kind::Counterexample);
  EXPECT_EQ(bad.counterexample->transfer_function(), g);
}

TEST(VerifyUncertainty, CounterexamplesAreExactlyUnstable) {
  const auto fam = cruise("0.05");
  std::mt19937_64 rng{5};
  int found = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Rational> num, den;
    std::uniform_int_distribution<int> c(-4000, 4000);
    for (int i = 0; i < 3; ++i) num.emplace_back(c(rng), 1000);
    den = {1, Rational(c(rng), 4000), Rational(c(rng), 4000)};
    const auto cand = Controller::quantized(num, den, k4_16, Rounding::Nearest);
    const auto out = verify_uncertainty(cand, fam, k16_24);
    if (out.kind != UncertaintyOutcome::Kind::Counterexample) continue;
    ++found;
    EXPECT_TRUE(grid_box(fam, k16_24).contains(*out.counterexample));
    EXPECT_NE(exact_verdict(cand, out.counterexample->transfer_function()).status, Stability::Stable);
  }
  EXPECT_GT(found, 10);
}

TEST(VerifyPrecision, Examples) {
  EXPECT_TRUE(verify_precision(final_controller(), cruise("0"), {20, 28}));
  // This candidate cannot cover the wide family: its
  // numerator interval [-0.4736, 0.5264] admits a plant with no input.
  EXPECT_FALSE(verify_precision(first_candidate(), cruise("0.5")));
  // Exactly representable point family: equals the exact verdict.
  const TransferFunction g{P({dec("0.5")}), P({1, dec("-0.25")})};
  const auto c = Controller::quantized({dec("0.5")}, {1}, k4_16, Rounding::Nearest);
  EXPECT_EQ(verify_precision(c, PlantFamily::point(g, k16_24)), exact_verdict(c, g).status == Stability::Stable);
}

TEST(TwoStage, CruiseSucceedsWithCertificate) {
  const auto fam = cruise("0");
  const auto r = cegis_two_stage(fam, config(7));
  ASSERT_TRUE(r.success) << (r.failure ? to_string(*r.failure) : "");
  EXPECT_EQ(r.certificate.status, Stability::Stable);
  EXPECT_EQ(precision_certificate(*r.controller, fam, r.precision).status, Stability::Stable);
  const auto check = spot_check(*r.controller, fam, r.precision, 1000, 1);
  EXPECT_EQ(check.sampled, 1000u);
  EXPECT_TRUE(check.passed());
  // The zero controller is the first candidate and is refuted.
  ASSERT_GE(r.transcript.size(), 2u);
  ASSERT_TRUE(r.transcript[0].candidate.has_value());
  EXPECT_TRUE(r.transcript[0].candidate->is_zero());
  EXPECT_EQ(r.transcript[1].outcome, "counterexample");
}

TEST(TwoStage, Deterministic) {
  const auto a = cegis_two_stage(cruise("0"), config(7));
  const auto b = cegis_two_stage(cruise("0"), config(7));
  ASSERT_TRUE(a.success && b.success);
  EXPECT_EQ(*a.controller, *b.controller);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.evaluations, b.evaluations);
  ASSERT_EQ(a.transcript.size(), b.transcript.size());
  for (std::size_t i = 0; i < a.transcript.size(); ++i) {
    EXPECT_EQ(a.transcript[i].outcome, b.transcript[i].outcome);
    EXPECT_EQ(a.transcript[i].candidate, b.transcript[i].candidate);
    EXPECT_EQ(a.transcript[i].counterexample, b.transcript[i].counterexample);
  }
}

TEST(TwoStage, ProgressAddsNewCounterexamples) {
  const auto r = cegis_two_stage(cruise("0.002"), config(3));
  std::vector<GridPlant> seen;
  for (const auto& t : r.transcript) {
    if (t.phase == Phase::IncreasePrecision) seen.clear();
    if (!t.counterexample) continue;
    EXPECT_EQ(std::count(seen.begin(), seen.end(), *t.counterexample), 0);
    seen.push_back(*t.counterexample);
  }
}

TEST(TwoStage, EscalatesPrecisionWhenTheEnclosureIsTooWide) {
  // Plant pole one grid step below 1 at <16,24>: the grid box is stable for
  // a good controller, but the rational enclosure at 2^-24 reaches z = 1.
  const TransferFunction g{P({pow2(-30)}), P({1, Rational{1 - pow2(-24)}})};
  auto cfg = config(2);
  cfg.orders = {0, 0};
  const auto r = cegis_two_stage(PlantFamily::point(g, k16_24), cfg);
  ASSERT_TRUE(r.success) << (r.failure ? to_string(*r.failure) : "");
  EXPECT_EQ(r.precision, (FixedPointFormat{20, 28}));
  const auto escalations = std::count_if(r.transcript.begin(), r.transcript.end(),
                                         [](const TranscriptRecord& t) { return t.phase == Phase::IncreasePrecision; });
  EXPECT_EQ(escalations, 1);

  cfg.limits.max_precision = k16_24;
  const auto capped = cegis_two_stage(PlantFamily::point(g, k16_24), cfg);
  EXPECT_FALSE(capped.success);
  EXPECT_EQ(capped.failure, FailureReason::PrecisionLimit);
}

TEST(TwoStage, UnstabilizableFamilyFails) {
  // b in [-1, 1] includes the plant 0/(z - 1.5): its pole cannot be moved.
  const TransferFunction g{P({0}), P({1, dec("-1.5")})};
  const PlantFamily fam(g, {1, 0, 0}, {8, 8});
  auto cfg = config(1);
  cfg.controller_format = {1, 0};
  cfg.orders = {0, 0};
  const auto r = cegis_two_stage(fam, cfg);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.failure, FailureReason::NoCandidate);
  // Cross-check by brute force over the whole <1,0> grid.
  for (int k = -1; k <= 1; ++k)
    for (int d = -1; d <= 1; ++d) {
      if (d == 0) continue;
      const auto c = Controller::quantized({k}, {d}, cfg.controller_format, Rounding::Nearest);
      EXPECT_NE(exact_verdict(c, TransferFunction{P({0}), P({1, dec("-1.5")})}).status, Stability::Stable);
    }
}

TEST(TwoStage, Limits) {
  auto cfg = config(1);
  cfg.limits.max_iterations = 0;
  EXPECT_EQ(cegis_two_stage(cruise("0"), cfg).failure, FailureReason::IterationLimit);
  EXPECT_EQ(cegis_one_stage(cruise("0"), cfg).failure, FailureReason::IterationLimit);
  cfg = config(1);
  cfg.limits.timeout_seconds = 0;
  EXPECT_EQ(cegis_two_stage(cruise("0"), cfg).failure, FailureReason::Timeout);
  EXPECT_EQ(cegis_one_stage(cruise("0"), cfg).failure, FailureReason::Timeout);
  cfg = config(1);
  cfg.limits.max_precision = {12, 20};
  EXPECT_EQ(cegis_two_stage(cruise("0"), cfg).failure, FailureReason::PrecisionLimit);
  cfg = config(1);
  cfg.limits.search_budget = 1;
  EXPECT_EQ(cegis_one_stage(cruise("0"), cfg).failure, FailureReason::NoCandidate);
}

TEST(OneStage, CruiseSucceedsAndAgreesWithTwoStage) {
  const auto one = cegis_one_stage(cruise("0"), config(7));
  const auto two = cegis_two_stage(cruise("0"), config(7));
  ASSERT_TRUE(one.success);
  EXPECT_EQ(one.success, two.success);
  EXPECT_EQ(one.certificate.status, Stability::Stable);
  EXPECT_TRUE(spot_check(*one.controller, cruise("0"), one.precision, 200, 2).passed());
}

TEST(OneStage, PointFamilyAgreesWithTwoStageOnFailure) {
  const TransferFunction g{P({0}), P({1, dec("-1.5")})};
  auto cfg = config(1);
  cfg.controller_format = {1, 0};
  cfg.orders = {0, 0};
  const auto fam = PlantFamily::point(g, {8, 8});
  EXPECT_EQ(cegis_one_stage(fam, cfg).success, cegis_two_stage(fam, cfg).success);
  EXPECT_FALSE(cegis_one_stage(fam, cfg).success);
}

}  // namespace
}  // namespace fwlsynth
