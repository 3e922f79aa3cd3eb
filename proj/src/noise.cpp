//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "epifilter/noise.hpp"

#include <string>

namespace epi {

Mat5 process_covariance(const StateMatrix& states, const Eigen::VectorXd& populations,
                        const EpiParams& params, const Eigen::MatrixXd& coupling, int region) {
  const Eigen::Index g = states.rows();
  if (region < 0 || region >= g) {
    throw ValidationError("process_covariance: region index out of range");
  }
  if (populations.size() != g || coupling.rows() != g || coupling.cols() != g) {
    throw ValidationError("process_covariance: shape mismatch");
  }

  const Eigen::Index i = region;
  const double s = states(i, kS);
  const double e = states(i, kE);
  const double infective = states(i, kI);

  // Total exposure probability of one susceptible; the exposure count is a
  // multinomial over sources, so its sum has variance S p (1 - p).
  double pressure = 0.0;
  for (Eigen::Index j = 0; j < g; ++j) {
    pressure += params.lambda_s * coupling(i, j) * states(j, kI) / populations(j);
  }
  const double var_exposures = s * pressure * (1.0 - pressure);
  const double var_infections = e * params.lambda_e * (1.0 - params.lambda_e);
  const double removal = params.lambda_r + params.lambda_d;

  Mat5 q = Mat5::Zero();
  q(kS, kS) = var_exposures;
  q(kE, kE) = var_exposures + var_infections;
  q(kI, kI) = var_infections + infective * removal * (1.0 - removal);
  q(kR, kR) = infective * params.lambda_r * (1.0 - params.lambda_r);
  q(kD, kD) = infective * params.lambda_d * (1.0 - params.lambda_d);

  q(kS, kE) = -var_exposures;
  q(kE, kI) = -var_infections;
  q(kI, kR) = -infective * params.lambda_r * (1.0 - removal);
  q(kI, kD) = -infective * params.lambda_d * (1.0 - removal);
  q(kR, kD) = -infective * params.lambda_r * params.lambda_d;

  q(kE, kS) = q(kS, kE);
  q(kI, kE) = q(kE, kI);
  q(kR, kI) = q(kI, kR);
  q(kD, kI) = q(kI, kD);
  q(kD, kR) = q(kR, kD);
  return q;
}

Mat5 process_covariance(const StateMatrix& states, const EpiParams& params,
                        const Eigen::MatrixXd& coupling, int region) {
  return process_covariance(states, Eigen::VectorXd(states.rowwise().sum()), params, coupling,
                            region);
}

Mat2 observation_covariance(const Vec5& state, const EpsilonSet& eps, const TestParams& tests) {
  const double sr = state(kS) + state(kR);
  const double var_alpha = tests.alpha * (1.0 - tests.alpha);
  const double var_beta = tests.beta * (1.0 - tests.beta);

  Mat2 r = Mat2::Zero();
  r(0, 0) = eps.eps1 * (1.0 - eps.eps3) * sr * var_alpha + eps.eps2 * eps.eps3 * sr * var_alpha +
            eps.eps2 * (1.0 - eps.eps4) * state(kI) * var_beta +
            eps.eps1 * (eps.eps4 * state(kI) + state(kE)) * var_beta;
  r(1, 1) = state(kD) * var_beta;
  r(0, 0) = std::max(r(0, 0), 0.0);
  r(1, 1) = std::max(r(1, 1), 0.0);
  return r;
}

}  // namespace epi
