#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "clocksync/clock_model.hpp"
#include "clocksync/errors.hpp"
#include "clocksync/exchange_sim.hpp"

namespace clocksync {

/// N x 4 matrix of round timestamps, columns (T1, T2, T3, T4), one row per round.
class TimestampMatrix {
 public:
  static constexpr Eigen::Index kColumns = 4;

  TimestampMatrix() : entries_(2, kColumns) { entries_.setZero(); }

  explicit TimestampMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    detail::require(entries_.cols() == kColumns, "timestamp matrix must have 4 columns");
    detail::require(entries_.rows() >= 2, "timestamp matrix needs at least 2 rounds");
  }

  const Eigen::MatrixXd& entries() const { return entries_; }
  Eigen::Index rounds() const { return entries_.rows(); }

  double t1(Eigen::Index i) const { return entries_(i, 0); }
  double t2(Eigen::Index i) const { return entries_(i, 1); }
  double t3(Eigen::Index i) const { return entries_(i, 2); }
  double t4(Eigen::Index i) const { return entries_(i, 3); }

  friend bool operator==(const TimestampMatrix& a, const TimestampMatrix& b) { return a.entries_ == b.entries_; }

 private:
  Eigen::MatrixXd entries_;
};

inline TimestampMatrix build_timestamp_matrix(const ExchangeLog& log) {
  detail::require(log.rows.size() >= 2, "exchange log needs at least 2 rounds");
  Eigen::MatrixXd g(static_cast<Eigen::Index>(log.rows.size()), TimestampMatrix::kColumns);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    const auto& r = log.rows[static_cast<std::size_t>(i)];
    g.row(i) << r.t1, r.t2, r.t3, r.t4;
  }
  return TimestampMatrix(std::move(g));
}

/// psi = (1/alpha, beta/alpha, d).
struct ParamVector {
  double psi1 = 1.0;
  double psi2 = 0.0;
  double psi3 = 0.0;

  Eigen::Vector3d as_vector() const { return {psi1, psi2, psi3}; }
  static ParamVector from_vector(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
};

inline ParamVector psi_from_params(const ClockParams& clock, double fixed_delay) {
  validate(clock);
  return {1.0 / clock.skew, clock.offset / clock.skew, fixed_delay};
}

struct ClockAndDelay {
  ClockParams clock;
  double fixed_delay = 0.0;
};

inline ClockAndDelay params_from_psi(const ParamVector& psi) {
  if (psi.psi1 == 0.0) throw SingularSystem("params_from_psi: psi1 == 0, degenerate least-squares output");
  return {{1.0 / psi.psi1, psi.psi2 / psi.psi1}, psi.psi3};
}

/// Stacked linear model  tb = ta * psi - z  over all N rounds:
///   rows 0..N-1:   T1_i  = [ T2_i, -1, -1] . psi - X_i
///   rows N..2N-1: -T4_i  = [-T3_i, +1, -1] . psi - Y_i
struct StackedSystem {
  Eigen::VectorXd tb;
  Eigen::MatrixXd ta;
  Eigen::Index n_rounds = 0;

  Eigen::VectorXd residual(const ParamVector& psi) const { return tb - ta * psi.as_vector(); }
};

inline StackedSystem build_stacked(const TimestampMatrix& g) {
  const Eigen::Index n = g.rounds();
  detail::require(n >= 2, "stacked system needs at least 2 rounds");
  StackedSystem s;
  s.n_rounds = n;
  s.tb.resize(2 * n);
  s.ta.resize(2 * n, 3);
  const auto& m = g.entries();
  s.tb.head(n) = m.col(0);
  s.tb.tail(n) = -m.col(3);
  s.ta.col(0).head(n) = m.col(1);
  s.ta.col(0).tail(n) = -m.col(2);
  s.ta.col(1).head(n).setConstant(-1.0);
  s.ta.col(1).tail(n).setConstant(1.0);
  s.ta.col(2).setConstant(-1.0);
  return s;
}

inline StackedSystem build_stacked(const ExchangeLog& log) { return build_stacked(build_timestamp_matrix(log)); }

}  // namespace clocksync
