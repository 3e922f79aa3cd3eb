//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef EPIFILTER_COUPLING_HPP
#define EPIFILTER_COUPLING_HPP

#include <Eigen/Dense>

#include <vector>

#include "epifilter/types.hpp"

namespace epi {

/// Great-circle distances between region centroids, in kilometres
/// (haversine formula, mean Earth radius 6371 km).
Eigen::MatrixXd great_circle_distances_km(const std::vector<RegionMeta>& regions);

/// Gravity coupling from an explicit distance matrix. Raw weights are
/// N_i * N_j / d_ij^exponent; off-diagonals are rescaled so the largest one
/// equals `cap`, and the diagonal is 1. Distances of zero between distinct
/// regions throw DegenerateDistanceError.
Eigen::MatrixXd gravity_coupling_from_distances(const Eigen::VectorXd& populations,
                                                const Eigen::MatrixXd& distances_km,
                                                double exponent, double cap);

/// Gravity coupling from region metadata (centroid distances + populations).
Eigen::MatrixXd gravity_coupling(const std::vector<RegionMeta>& regions,
                                 double exponent = 2.0, double cap = 0.1);

/// Throws ValidationError unless `coupling` is square, symmetric, has unit
/// diagonal, and all entries in [0, 1].
void validate_coupling(const Eigen::MatrixXd& coupling);

}  // namespace epi

#endif  // EPIFILTER_COUPLING_HPP
