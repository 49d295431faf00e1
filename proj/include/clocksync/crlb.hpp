#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "clocksync/errors.hpp"
#include "clocksync/exchange_sim.hpp"

namespace clocksync {

/// Inputs of the closed-form Cramer-Rao bounds. t1 holds Node B send times,
/// t3 Node A reply times (both nominal, noise-free in the harness).
struct CrlbInputs {
  double alpha = 1.0;
  double beta = 0.0;
  double d = 0.0;
  double sigma2 = 1.0;
  std::vector<double> t1;
  std::vector<double> t3;
};

inline CrlbInputs crlb_inputs_from(const ExchangeLog& nominal, double sigma2) {
  CrlbInputs in{nominal.clock.skew, nominal.clock.offset, nominal.delays.fixed_delay, sigma2, {}, {}};
  in.t1.reserve(nominal.rows.size());
  in.t3.reserve(nominal.rows.size());
  for (const auto& r : nominal.rows) {
    in.t1.push_back(r.t1);
    in.t3.push_back(r.t3);
  }
  return in;
}

struct CrlbScalars {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  double two_n = 0.0;
  double denominator = 0.0;  // 2N U - alpha^2 V^2 - W^2
};

/// U, V, W and the shared denominator. Throws DegenerateGeometry when the
/// denominator is not positive (information-singular configuration).
inline CrlbScalars crlb_scalars(const CrlbInputs& in) {
  detail::require(in.t1.size() == in.t3.size(), "crlb: t1 and t3 must have equal length");
  detail::require(in.t1.size() >= 2, "crlb: need at least 2 rounds");
  detail::require(in.sigma2 >= 0.0 && std::isfinite(in.sigma2), "crlb: sigma2 must be >= 0");
  detail::require(in.alpha > 0.0 && std::isfinite(in.alpha), "crlb: alpha must be > 0");

  const double a = in.alpha;
  const double a2 = a * a;
  double su = 0.0, sv = 0.0, sw = 0.0;
  for (std::size_t i = 0; i < in.t1.size(); ++i) {
    const double up = in.t1[i] + in.d;
    const double down = in.t3[i] - in.beta;
    su += a2 * up * up + a2 * in.sigma2 + down * down;
    sv += a * up + down;
    sw += a * up - down;
  }
  CrlbScalars s;
  s.u = su / (a2 * a2);
  s.v = sv / (a2 * a);
  s.w = sw / a2;
  s.two_n = 2.0 * static_cast<double>(in.t1.size());
  s.denominator = s.two_n * s.u - a2 * s.v * s.v - s.w * s.w;
  if (!(s.denominator > 0.0)) throw DegenerateGeometry("crlb: nonpositive denominator 2NU - a^2 V^2 - W^2");
  return s;
}

/// 2N sigma^2 / (2N U - alpha^2 V^2 - W^2)
inline double crlb_skew(const CrlbInputs& in) {
  const auto s = crlb_scalars(in);
  return s.two_n * in.sigma2 / s.denominator;
}

/// sigma^2 alpha^2 (2N U - V^2) / (2N (2N U - alpha^2 V^2 - W^2))
///
/// The numerator carries V^2 in this closed form, whereas the (2,2) cofactor of the
/// Fisher matrix of the same likelihood is 2N U - W^2. This form can turn
/// negative when |T| >> N * interval; callers see the value as computed.
inline double crlb_offset(const CrlbInputs& in) {
  const auto s = crlb_scalars(in);
  return in.sigma2 * in.alpha * in.alpha * (s.two_n * s.u - s.v * s.v) / (s.two_n * s.denominator);
}

}  // namespace clocksync
