//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "epifilter/coupling.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "epifilter/errors.hpp"

namespace epi {

namespace {

constexpr double kEarthRadiusKm = 6371.0;

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double phi1 = lat1 * deg;
  const double phi2 = lat2 * deg;
  const double dphi = (lat2 - lat1) * deg;
  const double dlam = (lon2 - lon1) * deg;
  const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) * std::sin(dlam / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

}  // namespace

Eigen::MatrixXd great_circle_distances_km(const std::vector<RegionMeta>& regions) {
  const Eigen::Index g = static_cast<Eigen::Index>(regions.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(g, g);
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index j = i + 1; j < g; ++j) {
      d(i, j) = d(j, i) = haversine_km(regions[i].lat, regions[i].lon, regions[j].lat,
                                       regions[j].lon);
    }
  }
  return d;
}

Eigen::MatrixXd gravity_coupling_from_distances(const Eigen::VectorXd& populations,
                                                const Eigen::MatrixXd& distances_km,
                                                double exponent, double cap) {
  const Eigen::Index g = populations.size();
  if (g < 1) {
    throw ValidationError("gravity coupling needs at least one region");
  }
  if (distances_km.rows() != g || distances_km.cols() != g) {
    throw ValidationError("distance matrix shape does not match the region count");
  }
  if (!(exponent > 0.0)) {
    throw ValidationError("gravity exponent must be positive");
  }
  if (!(cap > 0.0 && cap <= 1.0)) {
    throw ValidationError("coupling cap must lie in (0, 1]");
  }

  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(g, g);
  if (g == 1) return c;

  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(g, g);
  double max_raw = 0.0;
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index j = i + 1; j < g; ++j) {
      const double dist = distances_km(i, j);
      if (!(dist > 0.0)) {
        throw DegenerateDistanceError("regions " + std::to_string(i) + " and " +
                                      std::to_string(j) + " have zero centroid distance");
      }
      raw(i, j) = populations(i) * populations(j) / std::pow(dist, exponent);
      max_raw = std::max(max_raw, raw(i, j));
    }
  }

  const double scale = cap / max_raw;
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index j = i + 1; j < g; ++j) {
      c(i, j) = c(j, i) = raw(i, j) * scale;
    }
  }
  return c;
}

Eigen::MatrixXd gravity_coupling(const std::vector<RegionMeta>& regions, double exponent,
                                 double cap) {
  validate_regions(regions);
  return gravity_coupling_from_distances(populations_of(regions),
                                         great_circle_distances_km(regions), exponent, cap);
}

void validate_coupling(const Eigen::MatrixXd& coupling) {
  if (coupling.rows() != coupling.cols()) {
    throw ValidationError("coupling matrix must be square");
  }
  for (Eigen::Index i = 0; i < coupling.rows(); ++i) {
    if (coupling(i, i) != 1.0) {
      throw ValidationError("coupling diagonal must be exactly 1");
    }
    for (Eigen::Index j = 0; j < coupling.cols(); ++j) {
      if (coupling(i, j) < 0.0 || coupling(i, j) > 1.0) {
        throw ValidationError("coupling entries must lie in [0, 1]");
      }
      if (coupling(i, j) != coupling(j, i)) {
        throw ValidationError("coupling matrix must be symmetric");
      }
    }
  }
}

}  // namespace epi
