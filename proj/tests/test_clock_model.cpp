#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "clocksync/clock_model.hpp"

using namespace clocksync;

TEST(ClockModel, ToReferenceExamples) {
  EXPECT_DOUBLE_EQ(to_reference(5.0, {1.0, 0.0}), 5.0);
  EXPECT_DOUBLE_EQ(to_reference(0.0, {1.01, -3.0}), -3.0);
  EXPECT_DOUBLE_EQ(to_reference(10.0, {2.0, 1.0}), 21.0);
}

TEST(ClockModel, ToLocalExamples) {
  EXPECT_DOUBLE_EQ(to_local(21.0, {2.0, 1.0}), 10.0);
  EXPECT_DOUBLE_EQ(to_local(7.0, {1.0, 0.0}), 7.0);
  EXPECT_DOUBLE_EQ(to_local(-3.0, {1.01, -3.0}), 0.0);
}

TEST(ClockModel, ToLocalRejectsZeroSkew) {
  EXPECT_THROW(to_local(1.0, {0.0, 0.0}), InvalidArgument);
}

TEST(ClockModel, Validity) {
  EXPECT_TRUE((ClockParams{1.0, 0.0}).valid());
  EXPECT_FALSE((ClockParams{0.0, 0.0}).valid());
  EXPECT_FALSE((ClockParams{-1.0, 0.0}).valid());
  EXPECT_FALSE((ClockParams{std::numeric_limits<double>::quiet_NaN(), 0.0}).valid());
  EXPECT_THROW(validate(ClockParams{-0.5, 1.0}), InvalidArgument);
}

TEST(ClockModel, RoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> skew(0.5, 2.0), offset(-1e3, 1e3), t(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const ClockParams p{skew(rng), offset(rng)};
    const double x = t(rng);
    EXPECT_LE(std::abs(to_local(to_reference(x, p), p) - x), 1e-9 * std::max(1.0, std::abs(x)));
  }
}

TEST(ClockModel, MonotoneForPositiveSkew) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> skew(0.5, 2.0), offset(-1e3, 1e3), t(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const ClockParams p{skew(rng), offset(rng)};
    double a = t(rng), b = t(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    EXPECT_LT(to_reference(a, p), to_reference(b, p));
  }
}
