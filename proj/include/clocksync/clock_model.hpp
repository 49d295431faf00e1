#pragma once

#include <cmath>

#include "clocksync/errors.hpp"

namespace clocksync {

/// Affine map from a local clock (Node B) to the reference clock (Node A):
///   t_reference = skew * t_local + offset
struct ClockParams {
  double skew = 1.0;    // alpha, dimensionless
  double offset = 0.0;  // beta, seconds

  bool valid() const { return std::isfinite(skew) && std::isfinite(offset) && skew > 0.0; }
};

inline void validate(const ClockParams& params) {
  detail::require(params.valid(), "clock skew must be finite and positive");
}

inline double to_reference(double t_local, const ClockParams& params) {
  return params.skew * t_local + params.offset;
}

inline double to_local(double t_reference, const ClockParams& params) {
  if (params.skew == 0.0) throw InvalidArgument("to_local: degenerate clock with zero skew");
  return (t_reference - params.offset) / params.skew;
}

}  // namespace clocksync
