#pragma once

#include <algorithm>
#include <cmath>
#include <variant>

#include <Eigen/Dense>

#include "clocksync/errors.hpp"
#include "clocksync/matrix_forms.hpp"

namespace clocksync {

/// Full SVD  M = U diag(sigma) V^T  with U (rows x rows), V (cols x cols).
struct SvdFactors {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;  // nonincreasing, length min(rows, cols)
  Eigen::MatrixXd v;

  Eigen::MatrixXd reconstruct() const {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(u.cols(), v.cols());
    s.diagonal().head(sigma.size()) = sigma;
    return u * s * v.transpose();
  }
};

inline SvdFactors compute_svd(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
}

inline double nuclear_norm(const Eigen::MatrixXd& m) { return singular_values(m).sum(); }

namespace detail {

template <class Shrink>
Eigen::MatrixXd map_singular_values(const Eigen::MatrixXd& m, Shrink&& shrink) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = shrink(i, s(i));
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

}  // namespace detail

/// Best rank-k approximation in Frobenius norm: keep sigma_1..sigma_k, zero the rest.
inline Eigen::MatrixXd svd_truncate(const Eigen::MatrixXd& m, Eigen::Index k) {
  const Eigen::Index p = std::min(m.rows(), m.cols());
  detail::require(k >= 1 && k <= p, "svd_truncate: rank k must lie in [1, min(rows, cols)]");
  return detail::map_singular_values(m, [k](Eigen::Index i, double s) { return i < k ? s : 0.0; });
}

inline TimestampMatrix svd_truncate(const TimestampMatrix& g, Eigen::Index k) {
  return TimestampMatrix(svd_truncate(g.entries(), k));
}

/// Proximal operator of tau * |.|_*, i.e. argmin_X tau |X|_* + 1/2 |X - M|_F^2.
inline Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& m, double tau) {
  detail::require(std::isfinite(tau) && tau >= 0.0, "soft_threshold: tau must be >= 0");
  if (tau == 0.0) return m;
  return detail::map_singular_values(m, [tau](Eigen::Index, double s) { return std::max(s - tau, 0.0); });
}

/// sqrt(|gn - ghat|_F^2 / (2N)); the cycle has 2N independent random delays.
inline double estimate_noise_std(const Eigen::MatrixXd& gn, const Eigen::MatrixXd& ghat) {
  detail::require(gn.rows() == ghat.rows() && gn.cols() == ghat.cols(), "estimate_noise_std: shape mismatch");
  return std::sqrt((gn - ghat).squaredNorm() / (2.0 * static_cast<double>(gn.rows())));
}

inline double estimate_noise_std(const TimestampMatrix& gn, const TimestampMatrix& ghat) {
  return estimate_noise_std(gn.entries(), ghat.entries());
}

struct FixedTau {
  double tau = 0.0;
};

/// tau = sigma_hat * (sqrt(N) + sqrt(L)), sigma_hat from the rank-k truncation residual.
struct UniversalTau {};

using ThresholdPolicy = std::variant<FixedTau, UniversalTau>;

struct DenoiseConfig {
  Eigen::Index rank_k = 2;
  ThresholdPolicy threshold = UniversalTau{};
  double eta = 0.0;  // optional feasibility radius; <= 0 means "not set"
};

inline void validate(const DenoiseConfig& config, Eigen::Index p) {
  detail::require(config.rank_k >= 1 && config.rank_k <= p, "rank_k must lie in [1, min(N, L)]");
  if (const auto* fixed = std::get_if<FixedTau>(&config.threshold))
    detail::require(std::isfinite(fixed->tau) && fixed->tau >= 0.0, "tau must be >= 0");
  detail::require(std::isfinite(config.eta) && config.eta >= 0.0, "eta must be > 0 when set");
}

struct LrmaResult {
  Eigen::MatrixXd denoised;
  double tau = 0.0;
  double sigma_hat = 0.0;       // bootstrap estimate (Universal only)
  double residual_norm = 0.0;   // |denoised - gn|_F
  bool within_eta = true;       // residual_norm < eta, or true when eta unset
};

inline double resolve_tau(const Eigen::MatrixXd& gn, const DenoiseConfig& config, double* sigma_hat = nullptr) {
  if (const auto* fixed = std::get_if<FixedTau>(&config.threshold)) return fixed->tau;
  const double s = estimate_noise_std(gn, svd_truncate(gn, config.rank_k));
  if (sigma_hat) *sigma_hat = s;
  return s * (std::sqrt(static_cast<double>(gn.rows())) + std::sqrt(static_cast<double>(gn.cols())));
}

/// Nuclear-norm denoising solved in Lagrangian form by singular-value soft
/// thresholding. eta, when set, is only checked after the fact.
inline LrmaResult lrma_denoise_report(const Eigen::MatrixXd& gn, const DenoiseConfig& config) {
  validate(config, std::min(gn.rows(), gn.cols()));
  LrmaResult out;
  out.tau = resolve_tau(gn, config, &out.sigma_hat);
  out.denoised = soft_threshold(gn, out.tau);
  out.residual_norm = (out.denoised - gn).norm();
  out.within_eta = config.eta <= 0.0 || out.residual_norm < config.eta;
  return out;
}

inline Eigen::MatrixXd lrma_denoise(const Eigen::MatrixXd& gn, const DenoiseConfig& config) {
  return lrma_denoise_report(gn, config).denoised;
}

inline TimestampMatrix lrma_denoise(const TimestampMatrix& gn, const DenoiseConfig& config) {
  return TimestampMatrix(lrma_denoise(gn.entries(), config));
}

}  // namespace clocksync
