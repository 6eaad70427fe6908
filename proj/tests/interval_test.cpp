#include "fwlsynth/interval.hpp"

#include <gtest/gtest.h>

#include <random>

namespace fwlsynth {
namespace {

RationalInterval iv(Rational lo, Rational hi) { return RationalInterval{lo, hi}; }

TEST(IntervalOps, Examples) {
  EXPECT_EQ(iv(1, 2) * iv(3, 4), iv(3, 8));
  EXPECT_EQ(iv(-1, 2) * iv(-3, 4), iv(-6, 8));
  EXPECT_EQ(iv(0, 0) + iv(Rational(-1, 3), 5), iv(Rational(-1, 3), 5));
  EXPECT_EQ(iv(1, 2) - iv(0, 5), iv(-4, 2));
  EXPECT_EQ(-iv(1, 2), iv(-2, -1));
}

TEST(IntervalOps, Division) {
  EXPECT_EQ(iv(4, 6) / iv(2, 2), iv(2, 3));
  EXPECT_EQ(iv(1, 2) / iv(-2, -1), iv(-2, Rational(-1, 2)));
  EXPECT_THROW(iv(1, 2) / iv(-1, 1), DivisorContainsZero);
  EXPECT_THROW(iv(1, 2) / iv(0, 1), DivisorContainsZero);
}

TEST(IntervalOps, AbsAndPredicates) {
  EXPECT_EQ(abs(iv(-3, 2)), iv(0, 3));
  EXPECT_EQ(abs(iv(-3, -2)), iv(2, 3));
  EXPECT_EQ(abs(iv(1, 2)), iv(1, 2));
  EXPECT_TRUE(iv(-1, 1).contains_zero());
  EXPECT_FALSE(iv(1, 2).contains_zero());
  EXPECT_TRUE(iv(1, 2).subset_of(iv(0, 3)));
  EXPECT_FALSE(iv(0, 3).subset_of(iv(1, 2)));
  EXPECT_THROW(iv(2, 1), std::invalid_argument);
}

TEST(IntervalOps, OutwardToGrid) {
  const FixedPointFormat f{4, 2};
  const auto g = outward_to_grid(iv(Rational(1, 3), Rational(2, 3)), f);
  EXPECT_EQ(g.lo.to_rational(), Rational(1, 4));
  EXPECT_EQ(g.hi.to_rational(), Rational(3, 4));
  const auto n = outward_to_grid(iv(Rational(-2, 3), Rational(-1, 3)), f);
  EXPECT_EQ(n.lo.to_rational(), Rational(-3, 4));
  EXPECT_EQ(n.hi.to_rational(), Rational(-1, 4));
}

class IntervalProperties : public ::testing::Test {
protected:
  std::mt19937_64 rng{7};
  std::uniform_int_distribution<int> num{-2000, 2000};
  std::uniform_int_distribution<int> den{1, 97};

  Rational r() { return Rational{num(rng), den(rng)}; }
  RationalInterval random_interval() {
    Rational a = r(), b = r();
    if (b < a) std::swap(a, b);
    return {a, b};
  }
  Rational member(const RationalInterval& x) {
    const Rational t{std::uniform_int_distribution<int>(0, 1000)(rng), 1000};
    return x.lo + t * (x.hi - x.lo);
  }
};

TEST_F(IntervalProperties, Containment) {
  for (int trial = 0; trial < 100000; ++trial) {
    const auto A = random_interval();
    const auto B = random_interval();
    const Rational a = member(A), b = member(B);
    ASSERT_TRUE((A + B).contains(a + b));
    ASSERT_TRUE((A - B).contains(a - b));
    ASSERT_TRUE((A * B).contains(a * b));
    if (!B.contains_zero()) {
      ASSERT_TRUE((A / B).contains(a / b));
    }
  }
}

TEST_F(IntervalProperties, InclusionMonotonicity) {
  for (int trial = 0; trial < 20000; ++trial) {
    const auto A = random_interval();
    const auto B = random_interval();
    const auto A2 = iv(A.lo - Rational(den(rng), 7), A.hi + Rational(den(rng), 11));
    const auto B2 = iv(B.lo - Rational(den(rng), 13), B.hi);
    ASSERT_TRUE((A + B).subset_of(A2 + B2));
    ASSERT_TRUE((A - B).subset_of(A2 - B2));
    ASSERT_TRUE((A * B).subset_of(A2 * B2));
    if (!B2.contains_zero()) {
      ASSERT_TRUE((A / B).subset_of(A2 / B2));
    }
  }
}

}  // namespace
}  // namespace fwlsynth
