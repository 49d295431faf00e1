#include <random>

#include <gtest/gtest.h>

#include "clocksync/denoise.hpp"
#include "clocksync/matrix_forms.hpp"
#include "test_support.hpp"

using namespace clocksync;

namespace {

ExchangeLog hand_example() { return simulate_cycle({2.0, 1.0}, {1.0, 1.0, 0.0}, {2, 0.0, 10.0}, 1); }

}  // namespace

TEST(BuildTimestampMatrix, TranscribesLog) {
  const auto g = build_timestamp_matrix(hand_example());
  Eigen::MatrixXd want(2, 4);
  want << 0, 3, 4, 2.5, 10, 23, 24, 12.5;
  EXPECT_EQ(g.entries(), want);
}

TEST(BuildTimestampMatrix, RejectsBadShapes) {
  const Eigen::MatrixXd three_cols = Eigen::MatrixXd::Zero(3, 3);
  const Eigen::MatrixXd one_row = Eigen::MatrixXd::Zero(1, 4);
  EXPECT_THROW(TimestampMatrix{three_cols}, InvalidArgument);
  EXPECT_THROW(TimestampMatrix{one_row}, InvalidArgument);
}

TEST(BuildStacked, HandExample) {
  const auto s = build_stacked(build_timestamp_matrix(hand_example()));
  Eigen::VectorXd tb(4);
  tb << 0, 10, -2.5, -12.5;
  Eigen::MatrixXd ta(4, 3);
  ta << 3, -1, -1, 23, -1, -1, -4, 1, -1, -24, 1, -1;
  EXPECT_EQ(s.n_rounds, 2);
  EXPECT_EQ(s.tb, tb);
  EXPECT_EQ(s.ta, ta);
}

TEST(BuildStacked, ShapeAndSignPattern) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    auto c = fixtures::random_cycle(rng, 2, 40);
    c.delays.noise_std = 1.0;
    const auto g = build_timestamp_matrix(simulate_cycle(c.clock, c.delays, c.plan, k));
    const auto s = build_stacked(g);
    const auto n = static_cast<Eigen::Index>(c.plan.rounds);
    ASSERT_EQ(s.tb.size(), 2 * n);
    ASSERT_EQ(s.ta.rows(), 2 * n);
    ASSERT_EQ(s.ta.cols(), 3);
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
      EXPECT_EQ(s.ta(i, 1), i < n ? -1.0 : 1.0);
      EXPECT_EQ(s.ta(i, 2), -1.0);
    }
  }
}

TEST(BuildStacked, NoiseFreeResidualVanishesAtTruth) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const auto c = fixtures::random_cycle(rng);
    const auto s = build_stacked(simulate_cycle(c.clock, c.delays, c.plan, 0));
    const auto r = s.residual(psi_from_params(c.clock, c.delays.fixed_delay));
    EXPECT_LE(r.lpNorm<Eigen::Infinity>(), 1e-9 * std::max(1.0, s.tb.lpNorm<Eigen::Infinity>()));
  }
}

TEST(BuildStacked, ConsistentWithLog) {
  const auto log = simulate_cycle({1.002, 3.0}, {2.0, 0.2, 1.0}, {12, 5.0, 1.0}, 4);
  const auto via_matrix = build_stacked(build_timestamp_matrix(log));
  const auto via_log = build_stacked(log);
  EXPECT_EQ(via_matrix.tb, via_log.tb);
  EXPECT_EQ(via_matrix.ta, via_log.ta);
}

TEST(ParamsFromPsi, Examples) {
  auto p = params_from_psi({0.5, 0.5, 1.0});
  EXPECT_DOUBLE_EQ(p.clock.skew, 2.0);
  EXPECT_DOUBLE_EQ(p.clock.offset, 1.0);
  EXPECT_DOUBLE_EQ(p.fixed_delay, 1.0);
  p = params_from_psi({1.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(p.clock.skew, 1.0);
  EXPECT_DOUBLE_EQ(p.clock.offset, 0.0);
  EXPECT_DOUBLE_EQ(p.fixed_delay, 0.0);
  p = params_from_psi({1.0, -10.0, 5.0});
  EXPECT_DOUBLE_EQ(p.clock.skew, 1.0);
  EXPECT_DOUBLE_EQ(p.clock.offset, -10.0);
  EXPECT_DOUBLE_EQ(p.fixed_delay, 5.0);
  EXPECT_THROW(params_from_psi({0.0, 1.0, 1.0}), SingularSystem);
}

TEST(RankTwo, NoiseFreeMatrixHasTwoSingularValues) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const auto c = fixtures::random_cycle(rng, 3, 100);
    const auto g = build_timestamp_matrix(simulate_cycle(c.clock, c.delays, c.plan, 0));
    const auto s = singular_values(g.entries());
    EXPECT_LE(s(2), 1e-9 * s(0));
    EXPECT_LE(s(3), 1e-9 * s(0));
  }
}

TEST(RankTwo, EightRoundExample) {
  const auto g = build_timestamp_matrix(simulate_cycle({0.993, 8.5}, {7.0, 0.2, 0.0}, {8, 0.0, 1.0}, 0));
  const auto s = singular_values(g.entries());
  EXPECT_LE(s(2), 1e-9 * s(0));
  EXPECT_LE(s(3), 1e-9 * s(0));
  EXPECT_GT(s(1), 1e-6 * s(0));
}

TEST(RankTwo, RowVaryingProcessingDelayBreaksRankTwo) {
  auto log = simulate_cycle({1.0, 0.0}, {2.0, 0.5, 0.0}, {10, 0.0, 1.0}, 0);
  // b_i = 0.5 + jitter_i, propagated to T4 through the downlink (alpha = 1)
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    const double jitter = 0.1 * static_cast<double>(i % 3);
    log.rows[i].t3 += jitter;
    log.rows[i].t4 += jitter;
  }
  const auto s = singular_values(build_timestamp_matrix(log).entries());
  EXPECT_GT(s(2), 1e-6 * s(0));
}
