//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "epifilter/ukf.hpp"

#include <string>

#include "epifilter/dynamics.hpp"
#include "epifilter/observation.hpp"

namespace epi {

std::pair<Vec5, Mat5> init_from_observation(double p0, double q0, double population,
                                            double beta) {
  if (!(population > 0.0)) {
    throw ValidationError("init_from_observation requires a positive population");
  }
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw ValidationError("init_from_observation requires beta in (0, 1]");
  }
  Vec5 mean;
  mean(kS) = population - 2.0 * p0 - q0 / beta;
  mean(kE) = p0;
  mean(kI) = p0;
  mean(kR) = 0.0;
  mean(kD) = q0 / beta;
  if (mean(kS) < 0.0) {
    throw InitializationError("initial observation implies negative susceptibles (" +
                              std::to_string(mean(kS)) + ")");
  }
  return {mean, Mat5::Identity()};
}

namespace {

struct StepContext {
  int row;
  int region;
};

std::string at(const StepContext& ctx) {
  return " at time row " + std::to_string(ctx.row) + ", region " + std::to_string(ctx.region);
}

}  // namespace

FilterResult filter_series(const CleanSeries& series, const std::vector<RegionMeta>& regions,
                           const EpiParams& params, const TestParams& tests,
                           const Eigen::MatrixXd& coupling, const FilterOptions& options) {
  validate_regions(regions);
  params.validate();
  tests.validate();
  const int g = static_cast<int>(regions.size());
  if (series.num_regions() != g) {
    throw ValidationError("series has " + std::to_string(series.num_regions()) +
                          " regions but metadata has " + std::to_string(g));
  }
  if (series.num_times() < 1) {
    throw ValidationError("observation series is empty");
  }
  if (coupling.rows() != g || coupling.cols() != g) {
    throw ValidationError("coupling matrix shape does not match the region count");
  }

  const Eigen::VectorXd populations = populations_of(regions);

  FilterResult result;
  result.estimates.assign(static_cast<std::size_t>(g), {});
  std::vector<bool> has_eps(static_cast<std::size_t>(g), false);
  result.last_eps.assign(static_cast<std::size_t>(g), EpsilonSet{});

  // Row 0 initializes each region from its first observation.
  StateMatrix posterior_mean(g, 5);
  std::vector<Mat5> posterior_cov(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) {
    auto [mean, cov] = init_from_observation(series.new_cases(0, i), series.cum_deaths(0, i),
                                             populations(i), tests.beta);
    FilterEstimate est;
    est.mean = mean;
    est.cov = cov;
    est.predicted_obs = Vec2(series.new_cases(0, i), series.cum_deaths(0, i));
    est.initial = true;
    result.estimates[static_cast<std::size_t>(i)].push_back(est);
    posterior_mean.row(i) = mean.transpose();
    posterior_cov[static_cast<std::size_t>(i)] = cov;
  }

  for (int row = 1; row < series.num_times(); ++row) {
    const StateMatrix previous_mean = posterior_mean;  // frozen cross-region terms

    for (int i = 0; i < g; ++i) {
      const StepContext ctx{row, i};
      const Vec5 prev = previous_mean.row(i).transpose();

      // Epsilon set for this step, from the region's reported rates at the
      // previous posterior; infeasible rows reuse the last feasible set.
      EpsilonSet eps;
      try {
        eps = compute_epsilons(prev, series.test_rate(row, i), series.positivity(row, i), tests);
        result.last_eps[static_cast<std::size_t>(i)] = eps;
        has_eps[static_cast<std::size_t>(i)] = true;
      } catch (const NumericalError& err) {
        if (!has_eps[static_cast<std::size_t>(i)]) {
          throw InversionInfeasibleError("no feasible epsilon set yet (" +
                                         std::string(err.what()) + ")" + at(ctx));
        }
        eps = result.last_eps[static_cast<std::size_t>(i)];
        result.flags.push_back(
            {series.first_time_index + row, i, FlagKind::carried_epsilon});
      }

      double coupled = 0.0;
      for (int j = 0; j < g; ++j) {
        if (j == i) continue;
        coupled += coupling(i, j) * std::max(previous_mean(j, kI), 0.0) / populations(j);
      }
      const double pressure =
          params.lambda_s * (std::max(prev(kI), 0.0) / populations(i) + coupled);
      if (pressure > 1.0 + 1e-12) {
        throw InfectionPressureError("exposure probabilities sum to " +
                                     std::to_string(pressure) + " > 1" + at(ctx));
      }

      try {
        Mat5 q = process_covariance(previous_mean, populations, params, coupling, i);
        ensure_psd<5>(q);
        Mat2 r = observation_covariance(prev, eps, tests);

        const double inv_population = 1.0 / populations(i);
        const auto transition = [&](const Vec5& x) {
          return seird_mean_map(x, params, inv_population, coupled);
        };
        auto [mean_pred, cov_pred] =
            ut_predict<5>(prev, posterior_cov[static_cast<std::size_t>(i)], transition, q,
                          options.weighting);

        const auto observation = [&](const Vec5& x) { return observe_mean(x, eps, tests); };
        const Vec2 y(series.new_cases(row, i), series.cum_deaths(row, i));
        UtUpdate<5, 2> upd =
            ut_update<5, 2>(mean_pred, cov_pred, observation, r, y, options.weighting);

        FilterEstimate est;
        est.mean = upd.mean;
        est.cov = upd.cov;
        est.predicted_obs = upd.predicted_obs;
        est.innovation_cov = upd.innovation_cov;
        est.loglik_increment = upd.loglik_increment;

        // Physical nonnegativity of the posterior mean; covariance untouched.
        if (est.mean.minCoeff() < 0.0) {
          est.mean = est.mean.cwiseMax(0.0);
          result.flags.push_back(
              {series.first_time_index + row, i, FlagKind::clamped_mean});
        }

        result.estimates[static_cast<std::size_t>(i)].push_back(est);
        posterior_mean.row(i) = est.mean.transpose();
        posterior_cov[static_cast<std::size_t>(i)] = est.cov;
        result.total_loglik += est.loglik_increment;
      } catch (const NumericalError& err) {
        throw NumericalError(std::string(err.what()) + at(ctx));
      }
    }
  }
  return result;
}

}  // namespace epi
