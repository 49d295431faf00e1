#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "clocksync/errors.hpp"
#include "clocksync/matrix_forms.hpp"

namespace clocksync {

enum class Method { MleRaw, MleSvd, MleLrma };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::MleRaw: return "MLE_RAW";
    case Method::MleSvd: return "MLE_SVD";
    case Method::MleLrma: return "MLE_LRMA";
  }
  return "?";
}

/// Accepts "MLE_RAW"/"raw", "MLE_SVD"/"svd", "MLE_LRMA"/"lrma".
inline Method parse_method(std::string_view name) {
  if (name == "MLE_RAW" || name == "raw") return Method::MleRaw;
  if (name == "MLE_SVD" || name == "svd") return Method::MleSvd;
  if (name == "MLE_LRMA" || name == "lrma") return Method::MleLrma;
  throw InvalidArgument("unknown method: " + std::string(name));
}

struct EstimateReport {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double d_hat = 0.0;
  double residual_norm = 0.0;
  Method method = Method::MleRaw;
  ParamVector psi;  // in the original (un-shifted) time frame
};

/// Least-squares solution of the stacked system (the Gaussian MLE).
///
/// All timestamps are first shifted by c = T1_1 so the regressor column is
/// O(N * interval) rather than O(absolute time). Shifting every timestamp by c
/// leaves alpha and d unchanged and maps beta to beta + (alpha - 1) c, which is
/// undone afterwards. The shifted system is solved with column-pivoting QR.
inline EstimateReport mle_estimate(const StackedSystem& system, Method method = Method::MleRaw) {
  const Eigen::Index n = system.n_rounds;
  detail::require(n >= 2 && system.tb.size() == 2 * n && system.ta.rows() == 2 * n && system.ta.cols() == 3,
                  "malformed stacked system");

  const double shift = system.tb(0);
  Eigen::VectorXd tb = system.tb;
  Eigen::MatrixXd ta = system.ta;
  tb.head(n).array() -= shift;
  tb.tail(n).array() += shift;
  ta.col(0).head(n).array() -= shift;
  ta.col(0).tail(n).array() += shift;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ta);
  if (qr.rank() < 3) throw SingularSystem("stacked system is rank deficient (rank " + std::to_string(qr.rank()) + ")");
  const Eigen::Vector3d psi_shifted = qr.solve(tb);

  const auto shifted = params_from_psi(ParamVector::from_vector(psi_shifted));
  EstimateReport report;
  report.method = method;
  report.alpha_hat = shifted.clock.skew;
  report.beta_hat = shifted.clock.offset - (report.alpha_hat - 1.0) * shift;
  report.d_hat = shifted.fixed_delay;
  report.residual_norm = (tb - ta * psi_shifted).norm();
  report.psi = {psi_shifted(0), report.beta_hat * psi_shifted(0), psi_shifted(2)};
  return report;
}

inline EstimateReport mle_estimate(const TimestampMatrix& g, Method method = Method::MleRaw) {
  return mle_estimate(build_stacked(g), method);
}

/// N ln(1 / (2 pi sigma2)) - |tb - ta psi|^2 / (2 sigma2)
inline double log_likelihood(const StackedSystem& system, const ParamVector& psi, double sigma2) {
  detail::require(sigma2 > 0.0, "log_likelihood: sigma2 must be > 0");
  const double n = static_cast<double>(system.n_rounds);
  return n * std::log(1.0 / (2.0 * std::numbers::pi * sigma2)) - system.residual(psi).squaredNorm() / (2.0 * sigma2);
}

}  // namespace clocksync
