#pragma once

// Jury's stability test for S(z) = a_0 z^N + ... + a_N, a_0 > 0:
//
//   R1  S(1) > 0
//   R2  (-1)^N S(-1) > 0
//   R3  |a_N| < a_0
//   R4  the first element of every reduced row is positive, where each row
//       pair is (row, reversed row) and
//           next_j = row_j - (row_last / row_first) * row_{n-1-j}.
//
// N - 1 reductions are needed (rows V^(0) .. V^(N-1)); with fewer the test is
// only necessary. The same recursion runs over exact rationals, truncating
// fixed point, and intervals of either; interval inputs produce a
// three-valued answer.

#include "fwlsynth/fixed_point.hpp"
#include "fwlsynth/interval.hpp"
#include "fwlsynth/poly.hpp"
#include "fwlsynth/rational.hpp"
#include "fwlsynth/transfer.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace fwlsynth {

enum class Stability { Stable, Unstable, Unknown };

enum class JuryCondition { R1, R2, R3, R4 };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Unknown: return "unknown";
  }
  return "?";
}

inline const char* to_string(JuryCondition c) {
  switch (c) {
    case JuryCondition::R1: return "R1";
    case JuryCondition::R2: return "R2";
    case JuryCondition::R3: return "R3";
    case JuryCondition::R4: return "R4";
  }
  return "?";
}

struct JuryOptions {
  /// Reversed R3 form |a_0| < a_N (index 0 is the leading coefficient).
  /// Off by default: the standard form is |a_N| < a_0.
  bool reversed_r3 = false;
};

/// Three-valued answer to "x > 0".
enum class Sign3 { Positive, NonPositive, Unknown };

inline Sign3 positivity(const Rational& x) { return x > 0 ? Sign3::Positive : Sign3::NonPositive; }
inline Sign3 positivity(const FixedPointValue& x) { return x.raw() > 0 ? Sign3::Positive : Sign3::NonPositive; }
inline Sign3 positivity(double x) { return x > 0 ? Sign3::Positive : Sign3::NonPositive; }

template <typename T>
Sign3 positivity(const Interval<T>& x) {
  if (positivity(x.lo) == Sign3::Positive) return Sign3::Positive;
  if (positivity(x.hi) == Sign3::NonPositive) return Sign3::NonPositive;
  return Sign3::Unknown;
}

template <typename T>
T min_of(const T& a, const T& b) {
  return b < a ? b : a;
}

template <typename T>
Interval<T> min_of(const Interval<T>& a, const Interval<T>& b) {
  return Interval<T>{min_of(a.lo, b.lo), min_of(a.hi, b.hi)};
}

inline Rational lower_bound(const Rational& x) { return x; }
inline Rational lower_bound(const FixedPointValue& x) { return x.to_rational(); }
template <typename T>
Rational lower_bound(const Interval<T>& x) {
  return lower_bound(x.lo);
}

inline Rational upper_bound(const Rational& x) { return x; }
inline Rational upper_bound(const FixedPointValue& x) { return x.to_rational(); }
template <typename T>
Rational upper_bound(const Interval<T>& x) {
  return upper_bound(x.hi);
}

template <typename T>
struct JuryOutcome {
  Stability status = Stability::Unknown;
  std::optional<JuryCondition> violated;
  /// Minimum slack over the conditions evaluated; absent when the test could
  /// not start (leading coefficient of unknown sign).
  std::optional<T> margin;
  /// A pivot (or the leading coefficient) could not be shown nonzero.
  bool singular = false;
};

/// Rows of the reduction table, kept for inspection.
template <typename T>
struct JuryTable {
  std::vector<std::vector<T>> rows;
};

template <typename T>
JuryOutcome<T> jury_generic(const Poly<T>& s_in, const JuryOptions& options = {},
                            JuryTable<T>* table = nullptr) {
  JuryOutcome<T> out;
  std::vector<T> a = s_in.coeffs();
  const std::size_t n = a.size() - 1;

  switch (positivity(a.front())) {
    case Sign3::Positive:
      break;
    case Sign3::NonPositive:
    case Sign3::Unknown:
      if (positivity(-a.front()) == Sign3::Positive) {
        for (auto& c : a) c = -c;
      } else {
        out.singular = true;
        out.status = Stability::Unknown;
        return out;
      }
      break;
  }

  if (n == 0) {
    // No poles at all.
    out.status = Stability::Stable;
    out.margin = a.front();
    return out;
  }

  bool unknown = false;
  const auto record = [&](const T& slack, JuryCondition which) {
    out.margin = out.margin ? min_of(*out.margin, slack) : slack;
    const Sign3 sign = positivity(slack);
    if (sign == Sign3::NonPositive && !out.violated) out.violated = which;
    if (sign == Sign3::Unknown) unknown = true;
    return sign;
  };

  T at_one = a[0];
  T at_minus_one = a[0];
  for (std::size_t i = 1; i <= n; ++i) {
    at_one = at_one + a[i];
    at_minus_one = (i % 2 == 0) ? at_minus_one + a[i] : at_minus_one - a[i];
  }
  record(at_one, JuryCondition::R1);
  record(at_minus_one, JuryCondition::R2);
  if (options.reversed_r3) {
    record(a[n] - abs(a[0]), JuryCondition::R3);
  } else {
    record(a[0] - abs(a[n]), JuryCondition::R3);
  }

  if (table) table->rows.push_back(a);
  std::vector<T> row = a;
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t len = row.size();
    const T alpha = row.back() / row.front();
    std::vector<T> next;
    next.reserve(len - 1);
    for (std::size_t j = 0; j + 1 < len; ++j) next.push_back(row[j] - alpha * row[len - 1 - j]);
    if (table) table->rows.push_back(next);
    const Sign3 sign = record(next.front(), JuryCondition::R4);
    if (sign != Sign3::Positive) {
      if (sign == Sign3::Unknown) out.singular = true;
      break;
    }
    row = std::move(next);
  }

  if (out.violated) {
    out.status = Stability::Unstable;
  } else if (unknown) {
    out.status = Stability::Unknown;
  } else {
    out.status = Stability::Stable;
  }
  return out;
}

struct JuryVerdict {
  Stability status = Stability::Unknown;
  std::optional<JuryCondition> violated;
  /// Minimum slack (exact); for interval inputs, a lower bound of it.
  Rational margin{0};
  bool singular = false;
};

template <typename T>
JuryVerdict to_verdict(const JuryOutcome<T>& o) {
  JuryVerdict v;
  v.status = o.status;
  v.violated = o.violated;
  v.singular = o.singular;
  if (o.margin) v.margin = lower_bound(*o.margin);
  return v;
}

/// Exact Jury test. Throws DegenerateCharPoly for the zero polynomial.
inline JuryVerdict jury_stable(const Poly<Rational>& s, const JuryOptions& options = {}) {
  if (is_zero(s)) throw DegenerateCharPoly("Jury test on the zero polynomial");
  return to_verdict(jury_generic(normalize(s), options));
}

inline JuryTable<Rational> jury_table(const Poly<Rational>& s) {
  JuryTable<Rational> table;
  jury_generic(normalize(s), {}, &table);
  return table;
}

/// Interval Jury test: Stable only if every member polynomial is stable,
/// Unstable only if every member violates some condition.
inline JuryVerdict jury_stable_interval(const IntervalPoly& s, const JuryOptions& options = {}) {
  try {
    return to_verdict(jury_generic(s, options));
  } catch (const DivisorContainsZero&) {
    JuryVerdict v;
    v.singular = true;
    return v;
  }
}

/// Fixed-point Jury test; overflow and zero pivots surface as Unknown.
template <typename T>
JuryOutcome<T> jury_stable_fast(const Poly<T>& s, const JuryOptions& options = {}) {
  try {
    return jury_generic(s, options);
  } catch (const FixedPointOverflow&) {
  } catch (const DivisionByZero&) {
  } catch (const DivisorContainsZero&) {
  }
  JuryOutcome<T> out;
  out.singular = true;
  return out;
}

}  // namespace fwlsynth
