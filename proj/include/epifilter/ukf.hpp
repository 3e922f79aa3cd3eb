//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef EPIFILTER_UKF_HPP
#define EPIFILTER_UKF_HPP

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "epifilter/data.hpp"
#include "epifilter/errors.hpp"
#include "epifilter/noise.hpp"
#include "epifilter/types.hpp"

namespace epi {

/// Sigma-point weighting variants.
///
/// `kappa_zero` is the unscented transform with kappa = 0: the centre point
/// carries weight zero and the 2n others carry 1/(2n) each, which matches
/// the sqrt(n P) column scaling and is exact on linear maps. `as_printed`
/// gives all 2n+1 points weight 1/(2n); the weights then sum to (2n+1)/(2n),
/// so even an identity map rescales the mean. It is retained for comparison
/// and is not used by default.
enum class SigmaWeighting { kappa_zero, as_printed };

template <int N>
using SigmaMatrix = Eigen::Matrix<double, N, 2 * N + 1>;

namespace detail {

/// Lower-triangular factor of `m` with an escalating diagonal jitter:
/// 1e-9 * trace/N, then x10 and x100; a fourth failure raises
/// NonPsdCovarianceError.
template <int N>
Eigen::Matrix<double, N, N> cholesky_with_jitter(const Eigen::Matrix<double, N, N>& m) {
  using Mat = Eigen::Matrix<double, N, N>;
  const double base = 1e-9 * std::max(m.trace(), 0.0) / N + 1e-300;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Mat candidate = m;
    if (attempt > 0) {
      candidate.diagonal().array() += base * std::pow(10.0, attempt - 1);
    }
    Eigen::LLT<Mat> llt(candidate);
    if (llt.info() == Eigen::Success) {
      return llt.matrixL();
    }
  }
  throw NonPsdCovarianceError("covariance not factorizable after jitter schedule");
}

}  // namespace detail

/// The 2n+1 symmetric sigma points of (mean, cov): the mean itself plus the
/// mean shifted by the columns of +-sqrt(n cov).
template <int N>
SigmaMatrix<N> sigma_points(const Eigen::Matrix<double, N, 1>& mean,
                            const Eigen::Matrix<double, N, N>& cov) {
  const Eigen::Matrix<double, N, N> root =
      detail::cholesky_with_jitter<N>((static_cast<double>(N) * cov).eval());
  SigmaMatrix<N> pts;
  pts.col(0) = mean;
  for (int i = 0; i < N; ++i) {
    pts.col(1 + i) = mean + root.col(i);
    pts.col(1 + N + i) = mean - root.col(i);
  }
  return pts;
}

namespace detail {

template <int N>
inline std::pair<double, double> sigma_weights(SigmaWeighting w) {
  const double side = 1.0 / (2.0 * N);
  return {w == SigmaWeighting::kappa_zero ? 0.0 : side, side};
}

}  // namespace detail

/// Propagates (mean, cov) through `f` with the unscented transform and adds
/// the transition noise covariance.
template <int N, class F>
std::pair<Eigen::Matrix<double, N, 1>, Eigen::Matrix<double, N, N>> ut_predict(
    const Eigen::Matrix<double, N, 1>& mean, const Eigen::Matrix<double, N, N>& cov, F&& f,
    const Eigen::Matrix<double, N, N>& process_cov,
    SigmaWeighting weighting = SigmaWeighting::kappa_zero) {
  const SigmaMatrix<N> pts = sigma_points<N>(mean, cov);
  const auto [w_centre, w_side] = detail::sigma_weights<N>(weighting);

  SigmaMatrix<N> prop;
  for (int i = 0; i < 2 * N + 1; ++i) {
    prop.col(i) = f(Eigen::Matrix<double, N, 1>(pts.col(i)));
  }

  Eigen::Matrix<double, N, 1> mean_pred = w_centre * prop.col(0);
  for (int i = 1; i < 2 * N + 1; ++i) mean_pred += w_side * prop.col(i);

  Eigen::Matrix<double, N, N> cov_pred = process_cov;
  {
    const Eigen::Matrix<double, N, 1> d0 = prop.col(0) - mean_pred;
    cov_pred += w_centre * d0 * d0.transpose();
  }
  for (int i = 1; i < 2 * N + 1; ++i) {
    const Eigen::Matrix<double, N, 1> d = prop.col(i) - mean_pred;
    cov_pred += w_side * d * d.transpose();
  }
  return {mean_pred, cov_pred};
}

template <int N, int M>
struct UtUpdate {
  Eigen::Matrix<double, N, 1> mean;
  Eigen::Matrix<double, N, N> cov;
  Eigen::Matrix<double, M, 1> predicted_obs;   // mu_t
  Eigen::Matrix<double, M, M> innovation_cov;  // S_t
  double loglik_increment = 0.0;
};

/// Assimilates the observation `y` through the observation map `h`:
/// regenerates sigma points at the prediction, forms the predicted
/// measurement mean, innovation covariance (plus `obs_cov`), and state-
/// measurement cross covariance, then applies the Kalman gain. The returned
/// loglik_increment is the Gaussian innovation log-density.
template <int N, int M, class H>
UtUpdate<N, M> ut_update(const Eigen::Matrix<double, N, 1>& mean_pred,
                         const Eigen::Matrix<double, N, N>& cov_pred, H&& h,
                         const Eigen::Matrix<double, M, M>& obs_cov,
                         const Eigen::Matrix<double, M, 1>& y,
                         SigmaWeighting weighting = SigmaWeighting::kappa_zero) {
  using VecN = Eigen::Matrix<double, N, 1>;
  using VecM = Eigen::Matrix<double, M, 1>;
  using MatNM = Eigen::Matrix<double, N, M>;
  using MatM = Eigen::Matrix<double, M, M>;

  const SigmaMatrix<N> pts = sigma_points<N>(mean_pred, cov_pred);
  const auto [w_centre, w_side] = detail::sigma_weights<N>(weighting);

  Eigen::Matrix<double, M, 2 * N + 1> obs;
  for (int i = 0; i < 2 * N + 1; ++i) {
    obs.col(i) = h(VecN(pts.col(i)));
  }

  VecM mu = w_centre * obs.col(0);
  for (int i = 1; i < 2 * N + 1; ++i) mu += w_side * obs.col(i);

  MatM s = obs_cov;
  MatNM c = MatNM::Zero();
  {
    const VecM dy0 = obs.col(0) - mu;
    const VecN dx0 = pts.col(0) - mean_pred;
    s += w_centre * dy0 * dy0.transpose();
    c += w_centre * dx0 * dy0.transpose();
  }
  for (int i = 1; i < 2 * N + 1; ++i) {
    const VecM dy = obs.col(i) - mu;
    const VecN dx = pts.col(i) - mean_pred;
    s += w_side * dy * dy.transpose();
    c += w_side * dx * dy.transpose();
  }

  const double det_s = s.determinant();
  if (!(det_s > 0.0) || !std::isfinite(det_s)) {
    throw SingularInnovationError("innovation covariance is singular (det = " +
                                  std::to_string(det_s) + ")");
  }
  const MatM s_inv = s.inverse();
  const MatNM gain = c * s_inv;
  const VecM innovation = y - mu;

  UtUpdate<N, M> out;
  out.mean = mean_pred + gain * innovation;
  out.cov = cov_pred - gain * s * gain.transpose();
  ensure_psd<N>(out.cov);
  out.predicted_obs = mu;
  out.innovation_cov = s;
  out.loglik_increment = -0.5 * std::log(std::pow(2.0 * std::numbers::pi, M) * det_s) -
                         0.5 * innovation.dot(s_inv * innovation);
  return out;
}

/// Mean and covariance implied by the first observation of a region:
/// E and I start at the reported new cases, D at reported deaths corrected
/// for sensitivity, R at zero, S takes the remainder; covariance is the
/// identity. An infeasible (negative) S raises InitializationError.
std::pair<Vec5, Mat5> init_from_observation(double p0, double q0, double population, double beta);

struct FilterEstimate {
  Vec5 mean = Vec5::Zero();            // m_{t|t}
  Mat5 cov = Mat5::Identity();         // P_{t|t}
  Vec2 predicted_obs = Vec2::Zero();   // mu_t (the observation itself at t0)
  Mat2 innovation_cov = Mat2::Identity();
  double loglik_increment = 0.0;
  bool initial = false;
};

struct FilterOptions {
  SigmaWeighting weighting = SigmaWeighting::kappa_zero;
};

struct FilterResult {
  std::vector<std::vector<FilterEstimate>> estimates;  // [region][time row]
  double total_loglik = 0.0;
  std::vector<FlagEvent> flags;
  std::vector<EpsilonSet> last_eps;  // per region, last feasible inversion
};

/// Runs the per-region UKF over an aligned observation series.
///
/// Per time row and region, the epsilon set is re-inverted from that
/// region's reported rates at the previous posterior mean (carrying the last
/// feasible set forward, flagged, when the inversion is infeasible); the
/// process and observation covariances are evaluated at the previous
/// posterior; cross-region infective pressure is frozen at the other
/// regions' previous posterior means. Row 0 initializes each region.
/// Numerical failures abort with the time row and region in the message.
FilterResult filter_series(const CleanSeries& series, const std::vector<RegionMeta>& regions,
                           const EpiParams& params, const TestParams& tests,
                           const Eigen::MatrixXd& coupling, const FilterOptions& options = {});

}  // namespace epi

#endif  // EPIFILTER_UKF_HPP
