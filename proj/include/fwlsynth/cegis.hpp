#pragma once

// Counterexample-guided inductive synthesis of fixed-point controllers.
//
// Two-stage engine: the synthesizer proposes a controller that stabilizes
// every plant collected so far; the uncertainty stage checks the whole grid
// box of the family with fast fixed-point interval Jury and, failing that,
// extracts a concrete destabilized plant; the precision stage certifies the
// candidate over the rational enclosure of the family with exact interval
// Jury, and raises the plant precision <Ip,Fp> when that fails.
//
// One-stage engine: the same search, scored directly by exact interval Jury
// over the whole family.

#include "fwlsynth/family.hpp"
#include "fwlsynth/fixed_point.hpp"
#include "fwlsynth/jury.hpp"
#include "fwlsynth/rational.hpp"
#include "fwlsynth/roots.hpp"
#include "fwlsynth/transfer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace fwlsynth {

enum class Engine { TwoStage, OneStage };

enum class FailureReason { IterationLimit, PrecisionLimit, Timeout, NoCandidate, CounterexampleExtractionFailed };

inline const char* to_string(Engine e) { return e == Engine::TwoStage ? "two-stage" : "one-stage"; }

inline const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::IterationLimit: return "iteration-limit";
    case FailureReason::PrecisionLimit: return "precision-limit";
    case FailureReason::Timeout: return "timeout";
    case FailureReason::NoCandidate: return "no-candidate";
    case FailureReason::CounterexampleExtractionFailed: return "counterexample-extraction-failed";
  }
  return "?";
}

struct Limits {
  int max_iterations = 100;
  FixedPointFormat max_precision{32, 32};
  double timeout_seconds = 600;
  /// Candidate evaluations allowed per synthesize call.
  std::size_t search_budget = 200000;
  /// Exact plant evaluations allowed per counterexample extraction.
  std::size_t extraction_budget = 4000;
};

inline const FixedPointFormat kDefaultPlantFormat{16, 24};
inline constexpr int kPrecisionStep = 4;

class Deadline {
public:
  explicit Deadline(double seconds) : start_(Clock::now()), seconds_(seconds) {}
  bool expired() const { return seconds_ <= 0 || elapsed() >= seconds_; }
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point start_;
  double seconds_;
};

/// Deterministic generator for one phase of one run.
inline std::mt19937_64 phase_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

/// Search stream for a plant precision. Both engines draw candidates from
/// the same stream at the same precision, so with equal seeds they explore
/// the same controllers and differ only in how candidates are checked.
inline std::uint64_t search_stream(const FixedPointFormat& precision) {
  return static_cast<std::uint64_t>(precision.integer_bits) * 256 + static_cast<std::uint64_t>(precision.fraction_bits);
}

// ---------------------------------------------------------------------------
// Candidate search

struct SearchOutcome {
  std::optional<Controller> controller;
  std::size_t evaluations = 0;
  bool timed_out = false;
};

/// Cost 0 means accepted; larger is worse.
using CostFunction = std::function<double(const Controller&)>;

inline constexpr std::size_t kExhaustiveLimit = std::size_t{1} << 20;
inline constexpr int kStallLimit = 200;

namespace detail {

inline std::int64_t raw_limit(const FixedPointFormat& f) { return static_cast<std::int64_t>(f.raw_bound() - 1); }

inline Controller from_raws(const FixedPointFormat& f, const ControllerOrders& o, const std::vector<std::int64_t>& r) {
  Controller c = Controller::zero(f, o);
  const std::size_t nn = c.num.size();
  for (std::size_t i = 0; i < r.size(); ++i) {
    (i < nn ? c.num[i] : c.den[i - nn]) = FixedPointValue::from_raw(r[i], f);
  }
  return c;
}

/// Number of controllers on the grid, saturating at kExhaustiveLimit + 1.
inline std::size_t grid_size(const FixedPointFormat& f, std::size_t coefficients) {
  const double per = 2.0 * static_cast<double>(raw_limit(f)) + 1.0;
  const double total = std::pow(per, static_cast<double>(coefficients));
  return total > static_cast<double>(kExhaustiveLimit) ? kExhaustiveLimit + 1 : static_cast<std::size_t>(total);
}

}  // namespace detail

/// Seeded search over the <I,F> grid. The all-zero controller is probed
/// first; small grids are enumerated, larger ones searched by hill climbing
/// on single-coefficient power-of-two moves with random restarts.
inline SearchOutcome search_controller(const FixedPointFormat& fmt, const ControllerOrders& orders,
                                       std::mt19937_64& rng, std::size_t budget, const Deadline& deadline,
                                       const CostFunction& cost) {
  SearchOutcome out;
  const std::size_t nn = static_cast<std::size_t>(orders.numerator) + 1;
  const std::size_t n = nn + static_cast<std::size_t>(orders.denominator) + 1;
  const std::int64_t limit = detail::raw_limit(fmt);

  const auto evaluate = [&](const std::vector<std::int64_t>& raws) -> std::optional<double> {
    if (out.evaluations >= budget) return std::nullopt;
    if (deadline.expired()) {
      out.timed_out = true;
      return std::nullopt;
    }
    ++out.evaluations;
    return cost(detail::from_raws(fmt, orders, raws));
  };

  std::vector<std::int64_t> current(n, 0);
  auto c0 = evaluate(current);
  if (!c0) return out;
  if (*c0 == 0) {
    out.controller = detail::from_raws(fmt, orders, current);
    return out;
  }

  if (detail::grid_size(fmt, n) <= kExhaustiveLimit) {
    std::vector<std::int64_t> raws(n, -limit);
    for (;;) {
      if (raws[nn] != 0) {
        const auto c = evaluate(raws);
        if (!c) return out;
        if (*c == 0) {
          out.controller = detail::from_raws(fmt, orders, raws);
          return out;
        }
      }
      std::size_t i = n;
      while (i > 0) {
        --i;
        if (raws[i] < limit) {
          ++raws[i];
          break;
        }
        raws[i] = -limit;
        if (i == 0) return out;
      }
    }
  }

  const int bits = fmt.integer_bits + fmt.fraction_bits;
  std::uniform_real_distribution<double> log_mag(0.0, static_cast<double>(std::min(bits, 62)));
  std::uniform_int_distribution<int> coin(0, 1), quarter(0, 3);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<int> shift(0, std::min(bits, 62) - 1);

  const auto random_coefficient = [&](bool nonzero) {
    if (!nonzero && quarter(rng) == 0) return std::int64_t{0};
    const auto mag = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::exp2(log_mag(rng))), 1, limit);
    return coin(rng) ? mag : -mag;
  };

  for (;;) {
    for (std::size_t i = 0; i < n; ++i) current[i] = random_coefficient(i == nn);
    current[nn] = std::abs(current[nn]);
    auto cur = evaluate(current);
    if (!cur) return out;
    int stall = 0;
    while (*cur != 0 && stall < kStallLimit) {
      std::vector<std::int64_t> next = current;
      const std::size_t i = pick(rng);
      const std::int64_t step = std::int64_t{1} << shift(rng);
      const std::int64_t moved = coin(rng) ? next[i] + step : next[i] - step;
      if (moved > limit || moved < -limit || (i == nn && moved <= 0)) {
        ++stall;
        continue;
      }
      next[i] = moved;
      const auto c = evaluate(next);
      if (!c) return out;
      if (*c < *cur) {
        stall = 0;
      } else {
        ++stall;
        if (*c > *cur) continue;
      }
      current = std::move(next);
      cur = c;
    }
    if (*cur == 0) {
      out.controller = detail::from_raws(fmt, orders, current);
      return out;
    }
  }
}

/// Penalty for a degenerate or overflowing characteristic polynomial.
inline constexpr double kDegeneratePenalty = 8.0;

/// Jury margin scaled by the coefficient mass of S, so costs compare across
/// candidates of different gain.
template <typename T>
double normalized_margin(const Rational& margin, const Poly<T>& s) {
  double mass = 0;
  for (const auto& c : s.coeffs()) mass += std::abs(to_double(lower_bound(c))) + std::abs(to_double(upper_bound(c)));
  return mass > 0 ? to_double(margin) / mass : 0.0;
}

/// Exact Jury verdict of one concrete plant; degenerate S counts as unstable.
inline JuryVerdict exact_verdict(const Controller& c, const TransferFunction& plant) {
  try {
    return jury_stable(char_poly(c, plant));
  } catch (const DegenerateCharPoly&) {
    JuryVerdict v;
    v.status = Stability::Unstable;
    v.margin = -1;
    return v;
  }
}

/// Two-stage synthesizer cost over the counterexample set. Fast fixed-point
/// Jury ranks candidates; a candidate only scores 0 once exact Jury agrees on
/// every input.
inline double inputs_cost(const Controller& c, const std::vector<GridPlant>& inputs) {
  if (c.den.front().raw() == 0 && !inputs.empty()) return inputs.size() * (1 + kDegeneratePenalty);
  double total = 0;
  for (const auto& p : inputs) {
    try {
      const auto s = char_poly_fixed(c, p.num(), p.den(), p.format);
      const auto v = jury_stable_fast(s);
      if (v.status == Stability::Stable) continue;
      if (!v.margin) {
        total += 1 + kDegeneratePenalty;
        continue;
      }
      total += 1 + std::max(0.0, -normalized_margin(lower_bound(*v.margin), s));
    } catch (const DegenerateCharPoly&) {
      total += 1 + kDegeneratePenalty;
    } catch (const FixedPointOverflow&) {
      total += 1 + kDegeneratePenalty;
    }
  }
  if (total > 0) return total;
  for (const auto& p : inputs) {
    if (exact_verdict(c, p.transfer_function()).status != Stability::Stable) total += 1;
  }
  return total;
}

/// Finds a controller that exact Jury certifies on every input plant.
inline SearchOutcome synthesize_candidate(const std::vector<GridPlant>& inputs, const FixedPointFormat& fmt,
                                          const ControllerOrders& orders, std::uint64_t seed, std::size_t budget,
                                          const Deadline& deadline = Deadline{std::numeric_limits<double>::infinity()},
                                          std::uint64_t stream = 0) {
  if (orders.numerator < 0 || orders.denominator < 0) throw std::invalid_argument("orders must be nonnegative");
  auto rng = phase_rng(seed, stream, 1);
  return search_controller(fmt, orders, rng, budget, deadline,
                           [&](const Controller& c) { return inputs_cost(c, inputs); });
}

// ---------------------------------------------------------------------------
// Uncertainty stage

struct UncertaintyOutcome {
  enum class Kind { Ok, Counterexample, ExtractionFailed };
  Kind kind = Kind::Ok;
  std::optional<GridPlant> counterexample;
  /// Verdict of the fast interval test over the grid box.
  Stability box_verdict = Stability::Unknown;
  std::size_t evaluations = 0;
};

inline constexpr int kMaxSubdivisionDepth = 8;

namespace detail {

class Extractor {
public:
  Extractor(const Controller& c, const GridBox& box, std::size_t budget) : c_(c), box_(box), budget_(budget) {}

  std::size_t evaluations() const { return evaluations_; }
  bool exhausted() const { return evaluations_ >= budget_; }

  /// Exact normalized margin; nullopt when the budget is spent.
  std::optional<double> score(const GridPlant& p) {
    if (exhausted()) return std::nullopt;
    ++evaluations_;
    const auto tf = p.transfer_function();
    const auto v = exact_verdict(c_, tf);
    if (v.status != Stability::Stable) {
      witness_ = p;
      return -1.0;
    }
    return normalized_margin(v.margin, char_poly(c_, tf));
  }

  const std::optional<GridPlant>& witness() const { return witness_; }

  /// Coordinate descent on the exact margin from `start`.
  void descend(GridPlant start, double start_score) {
    GridPlant best = std::move(start);
    double best_score = start_score;
    bool improved = true;
    while (improved && !witness_ && !exhausted()) {
      improved = false;
      for (std::size_t i = 0; i < box_.size() && !witness_; ++i) {
        const std::int64_t width = box_.hi[i] - box_.lo[i];
        if (width == 0) continue;
        for (std::int64_t step = std::int64_t{1} << static_cast<int>(std::floor(std::log2(static_cast<double>(width))));
             step > 0 && !witness_; step /= 2) {
          for (int dir : {1, -1}) {
            GridPlant trial = best;
            trial.raw[i] += dir * step;
            if (trial.raw[i] < box_.lo[i] || trial.raw[i] > box_.hi[i]) continue;
            const auto s = score(trial);
            if (!s) return;
            if (*s < best_score) {
              best = std::move(trial);
              best_score = *s;
              improved = true;
              break;
            }
          }
        }
      }
    }
  }

  /// Splits the box until every leaf is fast-Stable (true), a witness turns
  /// up, or depth/budget runs out (false).
  bool cover(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi, int depth) {
    GridBox sub{box_.format, box_.num_len, lo, hi};
    if (jury_stable_fast(family_char_poly_fixed(c_, sub)).status == Stability::Stable) return true;
    const auto s = score(sub.center());
    if (!s || witness_) return false;
    std::size_t widest = 0;
    for (std::size_t i = 1; i < lo.size(); ++i) {
      if (hi[i] - lo[i] > hi[widest] - lo[widest]) widest = i;
    }
    if (hi[widest] == lo[widest]) return true;  // a single plant, exactly stable
    if (depth >= kMaxSubdivisionDepth) return false;
    const std::int64_t mid = lo[widest] + (hi[widest] - lo[widest]) / 2;
    auto lo2 = lo, hi1 = hi;
    hi1[widest] = mid;
    lo2[widest] = mid + 1;
    const bool left = cover(lo, hi1, depth + 1);
    if (witness_) return false;
    const bool right = cover(lo2, hi, depth + 1);
    return left && right;
  }

private:
  const Controller& c_;
  const GridBox& box_;
  std::size_t budget_;
  std::size_t evaluations_ = 0;
  std::optional<GridPlant> witness_;
};

}  // namespace detail

/// First stage: fast interval Jury over the grid box of the family at
/// `precision`; on failure, a concrete grid plant that exact Jury rejects.
inline UncertaintyOutcome verify_uncertainty(const Controller& candidate, const PlantFamily& family,
                                             const FixedPointFormat& precision,
                                             std::size_t budget = Limits{}.extraction_budget) {
  UncertaintyOutcome out;
  const GridBox box = grid_box(family, precision);
  out.box_verdict = jury_stable_fast(family_char_poly_fixed(candidate, box)).status;
  if (out.box_verdict == Stability::Stable) return out;

  detail::Extractor ex(candidate, box, budget);
  const auto finish = [&](UncertaintyOutcome::Kind kind) {
    out.kind = kind;
    out.counterexample = ex.witness();
    out.evaluations = ex.evaluations();
    return out;
  };

  // Center, then vertices, keeping the lowest margin as the descent start.
  GridPlant best = box.center();
  auto best_score = ex.score(best);
  if (ex.witness()) return finish(UncertaintyOutcome::Kind::Counterexample);
  std::size_t free = 0;
  for (std::size_t i = 0; i < box.size(); ++i) free += box.lo[i] != box.hi[i];
  if (free <= 12) {
    for (auto& v : vertices(box)) {
      const auto s = ex.score(v);
      if (ex.witness()) return finish(UncertaintyOutcome::Kind::Counterexample);
      if (!s) break;
      if (*s < *best_score) {
        best = std::move(v);
        best_score = s;
      }
    }
  }
  if (best_score) ex.descend(best, *best_score);
  if (ex.witness()) return finish(UncertaintyOutcome::Kind::Counterexample);

  const bool covered = ex.cover(box.lo, box.hi, 0);
  if (ex.witness()) return finish(UncertaintyOutcome::Kind::Counterexample);
  return finish(covered ? UncertaintyOutcome::Kind::Ok : UncertaintyOutcome::Kind::ExtractionFailed);
}

// ---------------------------------------------------------------------------
// Precision stage

/// Exact interval Jury over [c - d - 2^-Fp, c + d + 2^-Fp] for every
/// coefficient.
inline JuryVerdict precision_certificate(const Controller& candidate, const PlantFamily& family,
                                         const FixedPointFormat& precision) {
  return jury_stable_interval(family_char_poly(candidate, family_to_interval_poly(family, precision)));
}

inline bool verify_precision(const Controller& candidate, const PlantFamily& family,
                             const FixedPointFormat& precision) {
  return precision_certificate(candidate, family, precision).status == Stability::Stable;
}

inline bool verify_precision(const Controller& candidate, const PlantFamily& family) {
  return verify_precision(candidate, family, family.plant_format());
}

// ---------------------------------------------------------------------------
// Orchestration

enum class Phase { Synthesize, VerifyUncertainty, VerifyPrecision, IncreasePrecision, Done };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::Synthesize: return "synthesize";
    case Phase::VerifyUncertainty: return "verify-uncertainty";
    case Phase::VerifyPrecision: return "verify-precision";
    case Phase::IncreasePrecision: return "increase-precision";
    case Phase::Done: return "done";
  }
  return "?";
}

struct TranscriptRecord {
  int iteration = 0;
  Phase phase = Phase::Synthesize;
  std::string outcome;
  std::optional<Controller> candidate;
  std::optional<GridPlant> counterexample;
  FixedPointFormat precision;
};

struct SynthesisConfig {
  FixedPointFormat controller_format{4, 16};
  ControllerOrders orders{2, 2};
  std::uint64_t seed = 1;
  Limits limits;
};

struct SynthesisResult {
  Engine engine = Engine::TwoStage;
  bool success = false;
  std::optional<Controller> controller;
  std::optional<FailureReason> failure;
  FixedPointFormat precision;
  int iterations = 0;
  std::size_t evaluations = 0;
  double wall_seconds = 0;
  /// Exact interval Jury over the whole family for the last candidate.
  JuryVerdict certificate;
  std::vector<TranscriptRecord> transcript;
};

inline FixedPointFormat raise_precision(const FixedPointFormat& f) {
  const int i = f.integer_bits + kPrecisionStep;
  const int fr = f.fraction_bits + kPrecisionStep;
  if (i + fr > 64) return FixedPointFormat{std::min(i, 64 - fr < 1 ? 1 : 64 - fr), std::min(fr, 63)};
  return FixedPointFormat{i, fr};
}

inline bool within(const FixedPointFormat& f, const FixedPointFormat& cap) {
  return f.integer_bits <= cap.integer_bits && f.fraction_bits <= cap.fraction_bits;
}

inline SynthesisResult cegis_two_stage(const PlantFamily& family, const SynthesisConfig& config) {
  const Deadline deadline(config.limits.timeout_seconds);
  SynthesisResult result;
  result.engine = Engine::TwoStage;
  FixedPointFormat precision = family.plant_format();
  result.precision = precision;
  std::vector<GridPlant> inputs;

  const auto fail = [&](FailureReason why) {
    result.failure = why;
    result.wall_seconds = deadline.elapsed();
    return result;
  };
  if (!within(precision, config.limits.max_precision)) return fail(FailureReason::PrecisionLimit);

  for (int iteration = 1;; ++iteration) {
    if (iteration > config.limits.max_iterations) return fail(FailureReason::IterationLimit);
    if (deadline.expired()) return fail(FailureReason::Timeout);
    result.iterations = iteration;

    const auto found = synthesize_candidate(inputs, config.controller_format, config.orders, config.seed,
                                            config.limits.search_budget, deadline, search_stream(precision));
    result.evaluations += found.evaluations;
    if (!found.controller) {
      result.transcript.push_back({iteration, Phase::Synthesize, found.timed_out ? "timeout" : "no-candidate",
                                   std::nullopt, std::nullopt, precision});
      return fail(found.timed_out ? FailureReason::Timeout : FailureReason::NoCandidate);
    }
    const Controller candidate = *found.controller;
    result.controller = candidate;
    result.transcript.push_back({iteration, Phase::Synthesize, "candidate", candidate, std::nullopt, precision});

    const auto unc = verify_uncertainty(candidate, family, precision, config.limits.extraction_budget);
    result.evaluations += unc.evaluations;
    if (unc.kind == UncertaintyOutcome::Kind::Counterexample) {
      result.transcript.push_back(
          {iteration, Phase::VerifyUncertainty, "counterexample", candidate, unc.counterexample, precision});
      inputs.push_back(*unc.counterexample);
      continue;
    }
    if (unc.kind == UncertaintyOutcome::Kind::ExtractionFailed) {
      result.transcript.push_back(
          {iteration, Phase::VerifyUncertainty, "extraction-failed", candidate, std::nullopt, precision});
      result.certificate = precision_certificate(candidate, family, precision);
      return fail(FailureReason::CounterexampleExtractionFailed);
    }
    result.transcript.push_back({iteration, Phase::VerifyUncertainty, "ok", candidate, std::nullopt, precision});

    result.certificate = precision_certificate(candidate, family, precision);
    if (result.certificate.status == Stability::Stable) {
      result.transcript.push_back({iteration, Phase::VerifyPrecision, "ok", candidate, std::nullopt, precision});
      result.success = true;
      result.failure.reset();
      result.wall_seconds = deadline.elapsed();
      return result;
    }
    result.transcript.push_back(
        {iteration, Phase::VerifyPrecision, "insufficient-precision", candidate, std::nullopt, precision});

    const FixedPointFormat next = raise_precision(precision);
    if (!within(next, config.limits.max_precision) || next == precision) return fail(FailureReason::PrecisionLimit);
    precision = next;
    result.precision = precision;
    inputs.clear();
    result.transcript.push_back({iteration, Phase::IncreasePrecision, to_string(precision), std::nullopt,
                                 std::nullopt, precision});
  }
}

/// One-stage cost: exact interval Jury over the full rational enclosure.
inline double family_cost(const Controller& c, const IntervalPlant& plant) {
  if (c.den.front().raw() == 0) return 1 + kDegeneratePenalty;
  const auto s = family_char_poly(c, plant);
  const auto v = jury_stable_interval(s);
  if (v.status == Stability::Stable) return 0;
  if (v.singular && v.margin == 0) return 1 + kDegeneratePenalty;
  return 1 + std::max(0.0, -normalized_margin(v.margin, s));
}

inline SynthesisResult cegis_one_stage(const PlantFamily& family, const SynthesisConfig& config) {
  const Deadline deadline(config.limits.timeout_seconds);
  SynthesisResult result;
  result.engine = Engine::OneStage;
  result.precision = family.plant_format();
  const auto fail = [&](FailureReason why) {
    result.failure = why;
    result.wall_seconds = deadline.elapsed();
    return result;
  };
  if (config.limits.max_iterations < 1) return fail(FailureReason::IterationLimit);
  if (!within(result.precision, config.limits.max_precision)) return fail(FailureReason::PrecisionLimit);
  if (deadline.expired()) return fail(FailureReason::Timeout);
  result.iterations = 1;

  const IntervalPlant plant = family_to_interval_poly(family, result.precision);
  auto rng = phase_rng(config.seed, search_stream(result.precision), 1);
  const auto found = search_controller(config.controller_format, config.orders, rng, config.limits.search_budget,
                                       deadline, [&](const Controller& c) { return family_cost(c, plant); });
  result.evaluations = found.evaluations;
  if (!found.controller) {
    result.transcript.push_back({1, Phase::Synthesize, found.timed_out ? "timeout" : "no-candidate", std::nullopt,
                                 std::nullopt, result.precision});
    return fail(found.timed_out ? FailureReason::Timeout : FailureReason::NoCandidate);
  }
  result.controller = *found.controller;
  result.certificate = jury_stable_interval(family_char_poly(*found.controller, plant));
  result.transcript.push_back({1, Phase::Synthesize, "candidate", found.controller, std::nullopt, result.precision});
  result.transcript.push_back({1, Phase::VerifyPrecision, "ok", found.controller, std::nullopt, result.precision});
  result.success = true;
  result.wall_seconds = deadline.elapsed();
  return result;
}

inline SynthesisResult synthesize(Engine engine, const PlantFamily& family, const SynthesisConfig& config) {
  return engine == Engine::TwoStage ? cegis_two_stage(family, config) : cegis_one_stage(family, config);
}

// ---------------------------------------------------------------------------
// Independent spot check of a controller against sampled family members

struct SpotCheck {
  std::size_t sampled = 0;
  std::size_t oracle_stable = 0;
  std::size_t cancellations = 0;
  double max_root_modulus = 0;

  bool passed() const { return sampled > 0 && oracle_stable == sampled && cancellations == 0; }
};

/// Root-oracle and cancellation checks on every vertex of the grid box plus
/// random grid members, `samples` plants in total (at least the vertices).
inline SpotCheck spot_check(const Controller& c, const PlantFamily& family, const FixedPointFormat& precision,
                            std::size_t samples, std::uint64_t seed) {
  SpotCheck out;
  const GridBox box = grid_box(family, precision);
  std::vector<GridPlant> plants;
  std::size_t free = 0;
  for (std::size_t i = 0; i < box.size(); ++i) free += box.lo[i] != box.hi[i];
  if (free <= 12) plants = vertices(box);
  auto rng = phase_rng(seed, 0, 7);
  while (plants.size() < samples) plants.push_back(random_member(box, rng));

  for (const auto& p : plants) {
    const auto tf = p.transfer_function();
    ++out.sampled;
    double rho = std::numeric_limits<double>::infinity();
    try {
      rho = root_oracle(char_poly(c, tf));
    } catch (const DegenerateCharPoly&) {
    }
    out.max_root_modulus = std::max(out.max_root_modulus, rho);
    if (rho < 1.0) ++out.oracle_stable;
    if (cancellation_on_or_outside_unit_circle(c, tf)) ++out.cancellations;
  }
  return out;
}

}  // namespace fwlsynth
