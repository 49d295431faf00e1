#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "clocksync/clock_model.hpp"
#include "clocksync/errors.hpp"

namespace clocksync {

enum class DelayDistribution { Gaussian, Exponential };

inline std::string_view to_string(DelayDistribution d) {
  return d == DelayDistribution::Gaussian ? "gaussian" : "exponential";
}

inline DelayDistribution parse_distribution(std::string_view name) {
  if (name == "gaussian" || name == "Gaussian") return DelayDistribution::Gaussian;
  if (name == "exponential" || name == "Exponential") return DelayDistribution::Exponential;
  throw InvalidArgument("unknown delay distribution: " + std::string(name));
}

/// Packet delay model of one link. The fixed delay is symmetric (uplink ==
/// downlink); random delays are zero-mean with standard deviation noise_std.
struct DelayModel {
  double fixed_delay = 0.0;       // d, seconds
  double processing_delay = 0.0;  // b, seconds on Node A's clock
  double noise_std = 0.0;         // sigma_n, seconds
  DelayDistribution distribution = DelayDistribution::Gaussian;
};

inline void validate(const DelayModel& delays) {
  detail::require(std::isfinite(delays.fixed_delay) && delays.fixed_delay >= 0.0, "fixed_delay must be >= 0");
  detail::require(std::isfinite(delays.processing_delay) && delays.processing_delay >= 0.0,
                  "processing_delay must be >= 0");
  detail::require(std::isfinite(delays.noise_std) && delays.noise_std >= 0.0, "noise_std must be >= 0");
}

/// Round i (0-based) starts at start_time + i * inter_round_interval on Node B's clock.
struct SchedulePlan {
  std::size_t rounds = 2;
  double start_time = 0.0;
  double inter_round_interval = 1.0;
};

inline void validate(const SchedulePlan& plan) {
  detail::require(plan.rounds >= 2, "a cycle needs at least 2 rounds");
  detail::require(std::isfinite(plan.start_time), "start_time must be finite");
  detail::require(std::isfinite(plan.inter_round_interval) && plan.inter_round_interval > 0.0,
                  "inter_round_interval must be > 0");
}

/// One round of the two-way exchange. t1/t4 are Node B clock readings,
/// t2/t3 are Node A clock readings.
struct ExchangeRecord {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;

  friend bool operator==(const ExchangeRecord&, const ExchangeRecord&) = default;
};

struct ExchangeLog {
  std::vector<ExchangeRecord> rows;
  ClockParams clock;
  DelayModel delays;
  std::uint64_t seed = 0;

  std::size_t rounds() const { return rows.size(); }
};

namespace detail {

class DelaySampler {
 public:
  explicit DelaySampler(const DelayModel& model) : model_(model) {}

  template <class Rng>
  double operator()(Rng& rng) {
    if (model_.noise_std == 0.0) return 0.0;
    if (model_.distribution == DelayDistribution::Gaussian) return gaussian_(rng) * model_.noise_std;
    // Exp(rate 1/sigma) has mean sigma and variance sigma^2; shift to zero mean.
    return exponential_(rng) * model_.noise_std - model_.noise_std;
  }

 private:
  DelayModel model_;
  std::normal_distribution<double> gaussian_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
};

}  // namespace detail

/// Simulates one synchronization cycle:
///   T2 = a (T1 + d + X) + b0,  T3 = T2 + b,  T4 = (T3 - b0) / a + d + Y
/// with a = skew, b0 = offset. X_i is drawn before Y_i in every round.
inline ExchangeLog simulate_cycle(const ClockParams& clock, const DelayModel& delays, const SchedulePlan& plan,
                                  std::uint64_t seed) {
  validate(clock);
  validate(delays);
  validate(plan);

  std::mt19937_64 rng(seed);
  detail::DelaySampler sample(delays);

  ExchangeLog log{.rows = {}, .clock = clock, .delays = delays, .seed = seed};
  log.rows.reserve(plan.rounds);
  for (std::size_t i = 0; i < plan.rounds; ++i) {
    const double uplink = sample(rng);
    const double downlink = sample(rng);
    ExchangeRecord r;
    r.t1 = plan.start_time + static_cast<double>(i) * plan.inter_round_interval;
    r.t2 = to_reference(r.t1 + delays.fixed_delay + uplink, clock);
    r.t3 = r.t2 + delays.processing_delay;
    r.t4 = to_local(r.t3, clock) + delays.fixed_delay + downlink;
    log.rows.push_back(r);
  }
  return log;
}

/// Nominal (noise-free) timestamps for the same schedule.
inline ExchangeLog nominal_cycle(const ClockParams& clock, DelayModel delays, const SchedulePlan& plan) {
  delays.noise_std = 0.0;
  return simulate_cycle(clock, delays, plan, 0);
}

struct DelayMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Recovers the realized random delays {X_i, Y_i} by inverting the forward
/// model with the true parameters, and returns their sample mean and
/// (unbiased) sample variance.
inline DelayMoments empirical_delay_moments(const ExchangeLog& log) {
  std::vector<double> samples;
  samples.reserve(2 * log.rows.size());
  for (const auto& r : log.rows) {
    samples.push_back(to_local(r.t2, log.clock) - r.t1 - log.delays.fixed_delay);
    samples.push_back(r.t4 - to_local(r.t3, log.clock) - log.delays.fixed_delay);
  }
  if (samples.empty()) return {};
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double variance = samples.size() > 1 ? ss / static_cast<double>(samples.size() - 1) : 0.0;
  return {mean, variance};
}

}  // namespace clocksync
