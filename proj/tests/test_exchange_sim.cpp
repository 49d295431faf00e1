#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "clocksync/exchange_sim.hpp"
#include "test_support.hpp"

using namespace clocksync;

namespace {

void expect_rows(const ExchangeLog& log, const std::vector<ExchangeRecord>& want) {
  ASSERT_EQ(log.rows.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_DOUBLE_EQ(log.rows[i].t1, want[i].t1) << "round " << i;
    EXPECT_DOUBLE_EQ(log.rows[i].t2, want[i].t2) << "round " << i;
    EXPECT_DOUBLE_EQ(log.rows[i].t3, want[i].t3) << "round " << i;
    EXPECT_DOUBLE_EQ(log.rows[i].t4, want[i].t4) << "round " << i;
  }
}

}  // namespace

TEST(SimulateCycle, PerfectClocksZeroDelay) {
  const auto log = simulate_cycle({1.0, 0.0}, {0.0, 0.0, 0.0}, {2, 0.0, 10.0}, 1);
  expect_rows(log, {{0, 0, 0, 0}, {10, 10, 10, 10}});
}

TEST(SimulateCycle, HandEvaluatedForwardModel) {
  // T2 = 2 (T1 + 1) + 1, T3 = T2 + 1, T4 = (T3 - 1) / 2 + 1
  const auto log = simulate_cycle({2.0, 1.0}, {1.0, 1.0, 0.0}, {2, 0.0, 10.0}, 1);
  expect_rows(log, {{0, 3, 4, 2.5}, {10, 23, 24, 12.5}});
}

TEST(SimulateCycle, NoiseFreeRowsSatisfyExchangeEquations) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    auto c = fixtures::random_cycle(rng, 5, 5);
    const auto log = simulate_cycle(c.clock, c.delays, c.plan, 9);
    const double a = c.clock.skew, b = c.clock.offset, d = c.delays.fixed_delay;
    for (const auto& r : log.rows) {
      const double scale = std::max({1.0, std::abs(r.t2), std::abs(r.t3)});
      EXPECT_NEAR(r.t2, a * r.t1 + b + a * d, 1e-12 * scale);
      EXPECT_NEAR(r.t3, a * r.t4 + b - a * d, 1e-12 * scale);
    }
  }
}

TEST(SimulateCycle, RowInvariants) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    auto c = fixtures::random_cycle(rng);
    c.delays.noise_std = 2.0;
    const auto log = simulate_cycle(c.clock, c.delays, c.plan, 100 + k);
    ASSERT_EQ(log.rows.size(), c.plan.rounds);
    for (std::size_t i = 0; i < log.rows.size(); ++i) {
      EXPECT_EQ(log.rows[i].t3 - log.rows[i].t2 >= 0.0, true);
      EXPECT_NEAR(log.rows[i].t3 - log.rows[i].t2, c.delays.processing_delay,
                  1e-12 * std::max(1.0, std::abs(log.rows[i].t2)));
      if (i > 0) {
        EXPECT_LT(log.rows[i - 1].t1, log.rows[i].t1);
      }
    }
  }
}

TEST(SimulateCycle, DeterministicForSeed) {
  const DelayModel delays{3.0, 0.2, 1.0, DelayDistribution::Gaussian};
  const SchedulePlan plan{64, 1000.0, 1.0};
  const auto a = simulate_cycle({1.003, 4.0}, delays, plan, 77);
  const auto b = simulate_cycle({1.003, 4.0}, delays, plan, 77);
  const auto c = simulate_cycle({1.003, 4.0}, delays, plan, 78);
  EXPECT_EQ(a.rows, b.rows);
  EXPECT_NE(a.rows, c.rows);
  EXPECT_EQ(a.seed, 77u);
}

TEST(SimulateCycle, RejectsInvalidInputs) {
  const DelayModel ok_delays{1.0, 0.0, 0.0};
  const SchedulePlan ok_plan{2, 0.0, 1.0};
  EXPECT_THROW(simulate_cycle({0.0, 0.0}, ok_delays, ok_plan, 0), InvalidArgument);
  EXPECT_THROW(simulate_cycle({1.0, 0.0}, {-1.0, 0.0, 0.0}, ok_plan, 0), InvalidArgument);
  EXPECT_THROW(simulate_cycle({1.0, 0.0}, {1.0, -0.1, 0.0}, ok_plan, 0), InvalidArgument);
  EXPECT_THROW(simulate_cycle({1.0, 0.0}, {1.0, 0.0, -1.0}, ok_plan, 0), InvalidArgument);
  EXPECT_THROW(simulate_cycle({1.0, 0.0}, ok_delays, {1, 0.0, 1.0}, 0), InvalidArgument);
  EXPECT_THROW(simulate_cycle({1.0, 0.0}, ok_delays, {4, 0.0, 0.0}, 0), InvalidArgument);
}

TEST(DelayMoments, NoiseFreeIsZero) {
  const auto log = simulate_cycle({1.004, -7.0}, {5.0, 0.2, 0.0}, {20, 1000.0, 1.0}, 1);
  const auto m = empirical_delay_moments(log);
  EXPECT_NEAR(m.mean, 0.0, 1e-9);
  EXPECT_NEAR(m.variance, 0.0, 1e-18);
}

TEST(DelayMoments, LargeSampleMatchesVariance) {
  for (auto dist : {DelayDistribution::Gaussian, DelayDistribution::Exponential}) {
    const auto log = simulate_cycle({0.995, 2.0}, {4.0, 0.2, 1.0, dist}, {10000, 0.0, 1.0}, 5);
    const auto m = empirical_delay_moments(log);
    EXPECT_GE(m.variance, 0.95) << to_string(dist);
    EXPECT_LE(m.variance, 1.05) << to_string(dist);
    EXPECT_NEAR(m.mean, 0.0, 0.05) << to_string(dist);
  }
}

TEST(DelayMoments, TwoRoundsIsFinite) {
  const auto log = simulate_cycle({1.0, 0.0}, {1.0, 0.0, 1.0}, {2, 0.0, 1.0}, 8);
  const auto m = empirical_delay_moments(log);
  EXPECT_TRUE(std::isfinite(m.mean));
  EXPECT_TRUE(std::isfinite(m.variance));
}

TEST(DelayMoments, ExponentialIsSkewed) {
  const auto log = simulate_cycle({1.0, 0.0}, {1.0, 0.0, 1.0, DelayDistribution::Exponential}, {5000, 0.0, 1.0}, 8);
  // Shifted exponential: every sample >= -sigma.
  for (const auto& r : log.rows) EXPECT_GE(to_local(r.t2, log.clock) - r.t1 - 1.0, -1.0 - 1e-9);
}
