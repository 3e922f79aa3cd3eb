//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "epifilter/types.hpp"

#include <cmath>
#include <string>

#include "epifilter/errors.hpp"

namespace epi {

void validate_regions(const std::vector<RegionMeta>& regions) {
  if (regions.empty()) {
    throw ValidationError("at least one region is required");
  }
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const RegionMeta& r = regions[i];
    if (r.id != static_cast<int>(i)) {
      throw ValidationError("region ids must be contiguous from 0; found id " +
                            std::to_string(r.id) + " at position " + std::to_string(i));
    }
    if (r.population < 1) {
      throw ValidationError("region " + std::to_string(r.id) + " has population " +
                            std::to_string(r.population) + "; must be >= 1");
    }
    if (!std::isfinite(r.lat) || !std::isfinite(r.lon)) {
      throw ValidationError("region " + std::to_string(r.id) + " has a non-finite centroid");
    }
  }
}

Eigen::VectorXd populations_of(const std::vector<RegionMeta>& regions) {
  Eigen::VectorXd n(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    n(static_cast<Eigen::Index>(i)) = static_cast<double>(regions[i].population);
  }
  return n;
}

void EpiParams::validate() const {
  if (!(lambda_s > 0.0) || !std::isfinite(lambda_s)) {
    throw ValidationError("lambda_s must be positive and finite");
  }
  if (!(lambda_e > 0.0 && lambda_e <= 1.0)) {
    throw ValidationError("lambda_e must lie in (0, 1]");
  }
  if (lambda_r < 0.0 || lambda_d < 0.0) {
    throw ValidationError("lambda_r and lambda_d must be nonnegative");
  }
  if (lambda_r + lambda_d > 1.0) {
    throw ValidationError("lambda_r + lambda_d must not exceed 1");
  }
}

void TestParams::validate() const {
  if (!(alpha >= 0.0 && alpha < beta && beta <= 1.0)) {
    throw ValidationError("test rates must satisfy 0 <= alpha < beta <= 1");
  }
  if (!(zeta > 1.0)) {
    throw ValidationError("zeta must exceed 1");
  }
  if (!(eps4 >= 0.0 && eps4 <= 1.0)) {
    throw ValidationError("eps4 must lie in [0, 1]");
  }
}

std::string to_string(FlagKind kind) {
  switch (kind) {
    case FlagKind::negative_correction:
      return "negative_correction";
    case FlagKind::imputed_rate:
      return "imputed_rate";
    case FlagKind::carried_epsilon:
      return "carried_epsilon";
    case FlagKind::clamped_mean:
      return "clamped_mean";
  }
  return "unknown";
}

}  // namespace epi
