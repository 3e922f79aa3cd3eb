//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef EPIFILTER_TYPES_HPP
#define EPIFILTER_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace epi {

using Vec2 = Eigen::Vector2d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat5 = Eigen::Matrix<double, 5, 5>;

/// Compartment order used for every 5-vector and 5x5 matrix in the library.
enum Compartment : int { kS = 0, kE = 1, kI = 2, kR = 3, kD = 4 };

/// Real-valued compartment states, one row per region, columns (S,E,I,R,D).
using StateMatrix = Eigen::Matrix<double, Eigen::Dynamic, 5>;
/// Integer-valued counterpart used by the stochastic simulator.
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 5>;
using CountVec5 = Eigen::Matrix<std::int64_t, 5, 1>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

struct RegionMeta {
  int id = 0;
  std::string name;
  std::int64_t population = 0;
  double lat = 0.0;  // centroid latitude, degrees
  double lon = 0.0;  // centroid longitude, degrees
};

/// Throws ValidationError unless ids are exactly 0..G-1 in order and every
/// population is at least 1.
void validate_regions(const std::vector<RegionMeta>& regions);

Eigen::VectorXd populations_of(const std::vector<RegionMeta>& regions);

/// Per-time-unit transition probabilities of the compartment model. The
/// library is agnostic to whether the time unit is a day or a week.
struct EpiParams {
  double lambda_s = 0.0;  // infection rate
  double lambda_e = 0.0;  // exposed -> infective probability
  double lambda_r = 0.0;  // recovery probability
  double lambda_d = 0.0;  // mortality probability

  void validate() const;
};

/// Test characteristics and testing-behaviour constants, fixed per run.
struct TestParams {
  double alpha = 0.0;  // test false-positive rate
  double beta = 1.0;   // test sensitivity
  double zeta = 2.0;   // symptomatic / asymptomatic testing-rate ratio
  double eps4 = 0.0;   // asymptomatic fraction of infectives

  void validate() const;
};

/// Time-varying testing parameters recovered from reported rates.
struct EpsilonSet {
  double eps1 = 0.0;  // asymptomatic testing rate
  double eps2 = 0.0;  // symptomatic testing rate
  double eps3 = 0.0;  // non-specific symptomatic fraction
  double eps4 = 0.0;  // asymptomatic fraction of infectives
};

/// One reported data point for one region and one time unit.
struct ObservationRecord {
  double p = 0.0;   // new confirmed cases
  double q = 0.0;   // cumulative recorded deaths
  double rt = 0.0;  // reported testing rate, in (0,1)
  double rp = 0.0;  // reported positivity rate, in (0,1)
  int region_id = 0;
  int t = 0;
};

/// Audit markers attached to cleaned series and filter runs.
enum class FlagKind {
  negative_correction,  // a decreasing cumulative count was clamped
  imputed_rate,         // missing testing/positivity value carried forward
  carried_epsilon,      // infeasible inversion; last feasible epsilons reused
  clamped_mean,         // negative posterior mean component set to zero
};

struct FlagEvent {
  int t = 0;
  int region = 0;
  FlagKind kind = FlagKind::negative_correction;
};

std::string to_string(FlagKind kind);

}  // namespace epi

#endif  // EPIFILTER_TYPES_HPP
