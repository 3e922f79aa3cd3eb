//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef EPIFILTER_NOISE_HPP
#define EPIFILTER_NOISE_HPP

#include <Eigen/Dense>

#include "epifilter/errors.hpp"
#include "epifilter/types.hpp"

namespace epi {

/// Analytic covariance of the transition noise for one region, evaluated at
/// the given all-region state. Entries not produced by the model's fluxes
/// are exactly zero. `populations` supplies the N_j.
Mat5 process_covariance(const StateMatrix& states, const Eigen::VectorXd& populations,
                        const EpiParams& params, const Eigen::MatrixXd& coupling, int region);

/// Convenience overload taking N_j as the row sums of `states`.
Mat5 process_covariance(const StateMatrix& states, const EpiParams& params,
                        const Eigen::MatrixXd& coupling, int region);

/// Analytic covariance of the observation noise: diagonal 2x2 with the
/// variances of the new-case and death reports.
Mat2 observation_covariance(const Vec5& state, const EpsilonSet& eps, const TestParams& tests);

/// Symmetrizes `m` and repairs tiny negative eigenvalues by shifting the
/// diagonal. An eigenvalue below -rel_tol * trace means the matrix is not a
/// covariance at all and raises NonPsdCovarianceError.
template <int N>
void ensure_psd(Eigen::Matrix<double, N, N>& m, double rel_tol = 1e-8) {
  m = ((m + m.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es(m, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig >= 0.0) return;
  const double scale = std::max(std::abs(m.trace()), 1.0);
  if (min_eig < -rel_tol * scale) {
    throw NonPsdCovarianceError("covariance has eigenvalue " + std::to_string(min_eig) +
                                " beyond the PSD repair tolerance");
  }
  m.diagonal().array() += -min_eig;
}

}  // namespace epi

#endif  // EPIFILTER_NOISE_HPP
