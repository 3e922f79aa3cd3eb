//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef EPIFILTER_ESTIMATE_HPP
#define EPIFILTER_ESTIMATE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "epifilter/types.hpp"
#include "epifilter/ukf.hpp"

namespace epi {

enum class ParamName { lambda_s, lambda_e, lambda_r, lambda_d };

std::string to_string(ParamName name);
ParamName param_name_from_string(const std::string& s);

struct UnknownParam {
  ParamName name = ParamName::lambda_s;
  double lower = 0.0;
  double upper = 0.0;
};

/// Which transmission parameters are searched and which are fixed. Unknowns
/// override the corresponding field of `fixed` during assembly.
struct ParamSpec {
  EpiParams fixed;
  std::vector<UnknownParam> unknowns;

  /// Bounds must be finite, ordered, and consistent with the EpiParams
  /// invariants even at the extremes (e.g. upper(lambda_r) + upper(lambda_d)
  /// must not exceed one).
  void validate() const;
  EpiParams assemble(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd lower_bounds() const;
  Eigen::VectorXd upper_bounds() const;
};

/// Fish School Search hyperparameters. Step sizes are fractions of the
/// search box width per dimension and decay linearly from init to final.
struct FssConfig {
  int school_size = 30;
  int iterations = 200;
  double step_ind_init = 0.1;
  double step_ind_final = 0.001;
  double step_vol_init = 0.2;
  double step_vol_final = 0.002;
  double weight_min = 1.0;
  double weight_max = 500.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FitResult {
  Eigen::VectorXd theta_hat;
  double loglik = 0.0;
  std::vector<double> trace;  // best objective so far, one entry per iteration
  long evaluations = 0;
  EpiParams params_hat;               // filled by fit()
  std::vector<double> final_weights;  // school weights after the last iteration
};

/// Maximizes `objective` over the box [lower, upper] with the canonical Fish
/// School Search loop: individual movement accepted on improvement, feeding
/// by normalized improvement, collective-instinctive drift, and collective-
/// volitive contraction/expansion around the weighted barycenter. -inf marks
/// an infeasible point; if the whole initial school is infeasible,
/// AllInfeasibleError is raised. Total objective calls are exactly
/// school_size * (1 + 2 * iterations).
FitResult fss_optimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                       const FssConfig& config);

/// Innovation log-likelihood of the candidate parameters; any filter-level
/// error maps to -inf so the optimizer treats the point as infeasible.
double loglik_objective(const Eigen::VectorXd& theta, const ParamSpec& spec,
                        const CleanSeries& series, const TestParams& tests,
                        const Eigen::MatrixXd& coupling, const std::vector<RegionMeta>& regions,
                        const FilterOptions& options = {});

/// Maximum-likelihood parameter estimation: FSS over the unknowns of `spec`
/// with the filter log-likelihood as objective. With no unknowns, returns
/// the fixed parameters and the plain filter log-likelihood.
FitResult fit(const CleanSeries& series, const ParamSpec& spec, const TestParams& tests,
              const Eigen::MatrixXd& coupling, const std::vector<RegionMeta>& regions,
              const FssConfig& config, const FilterOptions& options = {});

}  // namespace epi

#endif  // EPIFILTER_ESTIMATE_HPP
