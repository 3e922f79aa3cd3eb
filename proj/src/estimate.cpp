//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "epifilter/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "epifilter/errors.hpp"
#include "epifilter/random.hpp"

namespace epi {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lerp_step(double init, double final, int iteration, int iterations) {
  if (iterations <= 1) return init;
  const double frac = static_cast<double>(iteration) / (iterations - 1);
  return init + (final - init) * frac;
}

Eigen::VectorXd clip_to_box(Eigen::VectorXd x, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

}  // namespace

std::string to_string(ParamName name) {
  switch (name) {
    case ParamName::lambda_s:
      return "lambda_S";
    case ParamName::lambda_e:
      return "lambda_E";
    case ParamName::lambda_r:
      return "lambda_R";
    case ParamName::lambda_d:
      return "lambda_D";
  }
  return "unknown";
}

ParamName param_name_from_string(const std::string& s) {
  if (s == "lambda_S") return ParamName::lambda_s;
  if (s == "lambda_E") return ParamName::lambda_e;
  if (s == "lambda_R") return ParamName::lambda_r;
  if (s == "lambda_D") return ParamName::lambda_d;
  throw ValidationError("unknown parameter name: " + s);
}

void ParamSpec::validate() const {
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    const UnknownParam& u = unknowns[i];
    if (!std::isfinite(u.lower) || !std::isfinite(u.upper) || !(u.lower < u.upper)) {
      throw ValidationError("bounds for " + to_string(u.name) + " must be finite with lower < upper");
    }
    for (std::size_t j = i + 1; j < unknowns.size(); ++j) {
      if (unknowns[j].name == u.name) {
        throw ValidationError("duplicate unknown parameter " + to_string(u.name));
      }
    }
  }
  // The box must respect the EpiParams invariants even at its corners.
  Eigen::VectorXd upper = upper_bounds();
  Eigen::VectorXd lower = lower_bounds();
  EpiParams at_upper = assemble(upper);
  EpiParams at_lower = assemble(lower);
  at_upper.validate();
  if (!(at_lower.lambda_s > 0.0) || !(at_lower.lambda_e > 0.0)) {
    throw ValidationError("lower bounds must keep lambda_s and lambda_e positive");
  }
}

EpiParams ParamSpec::assemble(const Eigen::VectorXd& theta) const {
  if (theta.size() != static_cast<Eigen::Index>(unknowns.size())) {
    throw ValidationError("theta has " + std::to_string(theta.size()) + " entries, expected " +
                          std::to_string(unknowns.size()));
  }
  EpiParams params = fixed;
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    const double value = theta(static_cast<Eigen::Index>(i));
    switch (unknowns[i].name) {
      case ParamName::lambda_s:
        params.lambda_s = value;
        break;
      case ParamName::lambda_e:
        params.lambda_e = value;
        break;
      case ParamName::lambda_r:
        params.lambda_r = value;
        break;
      case ParamName::lambda_d:
        params.lambda_d = value;
        break;
    }
  }
  return params;
}

Eigen::VectorXd ParamSpec::lower_bounds() const {
  Eigen::VectorXd lower(unknowns.size());
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    lower(static_cast<Eigen::Index>(i)) = unknowns[i].lower;
  }
  return lower;
}

Eigen::VectorXd ParamSpec::upper_bounds() const {
  Eigen::VectorXd upper(unknowns.size());
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    upper(static_cast<Eigen::Index>(i)) = unknowns[i].upper;
  }
  return upper;
}

void FssConfig::validate() const {
  if (school_size < 2) throw ValidationError("school_size must be at least 2");
  if (iterations < 1) throw ValidationError("iterations must be at least 1");
  const auto check_steps = [](double init, double final, const char* which) {
    if (!(0.0 < final && final <= init && init < 1.0)) {
      throw ValidationError(std::string(which) + " steps must satisfy 0 < final <= init < 1");
    }
  };
  check_steps(step_ind_init, step_ind_final, "individual");
  check_steps(step_vol_init, step_vol_final, "volitive");
  if (!(weight_min < weight_max)) throw ValidationError("weight_min must be below weight_max");
}

FitResult fss_optimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                       const FssConfig& config) {
  config.validate();
  const Eigen::Index dim = lower.size();
  if (upper.size() != dim || dim < 1) {
    throw ValidationError("fss_optimize: bound vectors must share a positive dimension");
  }
  if (((upper - lower).array() <= 0.0).any()) {
    throw ValidationError("fss_optimize: upper bounds must exceed lower bounds");
  }
  const Eigen::VectorXd width = upper - lower;
  const int school = config.school_size;

  // Per-fish substreams keep draws reproducible independent of evaluation
  // order; stream 0 seeds the initial positions.
  Rng school_rng = make_substream(config.seed, 0);
  std::vector<Rng> fish_rng;
  fish_rng.reserve(static_cast<std::size_t>(school));
  for (int i = 0; i < school; ++i) {
    fish_rng.push_back(make_substream(config.seed, static_cast<std::uint64_t>(i) + 1));
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> symmetric(-1.0, 1.0);

  FitResult result;
  result.evaluations = 0;
  const auto evaluate = [&](const Eigen::VectorXd& x) {
    ++result.evaluations;
    return objective(x);
  };

  std::vector<Eigen::VectorXd> position(static_cast<std::size_t>(school));
  std::vector<double> fitness(static_cast<std::size_t>(school));
  std::vector<double> weight(static_cast<std::size_t>(school),
                             (config.weight_min + config.weight_max) / 2.0);

  Eigen::VectorXd best_x;
  double best_f = kNegInf;
  bool any_feasible = false;
  for (int i = 0; i < school; ++i) {
    Eigen::VectorXd x(dim);
    for (Eigen::Index d = 0; d < dim; ++d) {
      x(d) = lower(d) + unit(school_rng) * width(d);
    }
    position[static_cast<std::size_t>(i)] = x;
    const double f = evaluate(x);
    fitness[static_cast<std::size_t>(i)] = f;
    if (std::isfinite(f)) any_feasible = true;
    if (f > best_f || best_x.size() == 0) {
      best_f = f;
      best_x = x;
    }
  }
  if (!any_feasible) {
    throw AllInfeasibleError("objective was -inf at every initial school position");
  }

  double previous_total_weight =
      static_cast<double>(school) * (config.weight_min + config.weight_max) / 2.0;

  for (int iter = 0; iter < config.iterations; ++iter) {
    const double step_ind = lerp_step(config.step_ind_init, config.step_ind_final, iter,
                                      config.iterations);
    const double step_vol = lerp_step(config.step_vol_init, config.step_vol_final, iter,
                                      config.iterations);

    // Individual movement: a uniform step in the box scale, kept only on
    // strict improvement.
    std::vector<Eigen::VectorXd> displacement(static_cast<std::size_t>(school),
                                              Eigen::VectorXd::Zero(dim));
    std::vector<double> improvement(static_cast<std::size_t>(school), 0.0);
    for (int i = 0; i < school; ++i) {
      auto& rng = fish_rng[static_cast<std::size_t>(i)];
      Eigen::VectorXd candidate(dim);
      for (Eigen::Index d = 0; d < dim; ++d) {
        candidate(d) = position[static_cast<std::size_t>(i)](d) +
                       symmetric(rng) * step_ind * width(d);
      }
      candidate = clip_to_box(std::move(candidate), lower, upper);
      const double f = evaluate(candidate);
      if (f > best_f) {
        best_f = f;
        best_x = candidate;
      }
      if (f > fitness[static_cast<std::size_t>(i)]) {
        double delta = f - fitness[static_cast<std::size_t>(i)];
        if (!std::isfinite(delta)) delta = 0.0;  // escaping from an infeasible point
        displacement[static_cast<std::size_t>(i)] =
            candidate - position[static_cast<std::size_t>(i)];
        improvement[static_cast<std::size_t>(i)] = delta;
        position[static_cast<std::size_t>(i)] = candidate;
        fitness[static_cast<std::size_t>(i)] = f;
      }
    }

    // Feeding: weight gain proportional to the normalized improvement.
    const double max_improvement = *std::max_element(improvement.begin(), improvement.end());
    if (max_improvement > 0.0) {
      for (int i = 0; i < school; ++i) {
        weight[static_cast<std::size_t>(i)] =
            std::clamp(weight[static_cast<std::size_t>(i)] +
                           improvement[static_cast<std::size_t>(i)] / max_improvement,
                       config.weight_min, config.weight_max);
      }
    }

    // Collective-instinctive movement: drift along the improvement-weighted
    // average displacement.
    const double total_improvement =
        std::accumulate(improvement.begin(), improvement.end(), 0.0);
    if (total_improvement > 0.0) {
      Eigen::VectorXd drift = Eigen::VectorXd::Zero(dim);
      for (int i = 0; i < school; ++i) {
        drift += displacement[static_cast<std::size_t>(i)] *
                 improvement[static_cast<std::size_t>(i)];
      }
      drift /= total_improvement;
      for (int i = 0; i < school; ++i) {
        position[static_cast<std::size_t>(i)] =
            clip_to_box(position[static_cast<std::size_t>(i)] + drift, lower, upper);
      }
    }

    // Collective-volitive movement: contract toward the weighted barycenter
    // when the school gained weight, expand away otherwise.
    const double total_weight = std::accumulate(weight.begin(), weight.end(), 0.0);
    Eigen::VectorXd barycenter = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < school; ++i) {
      barycenter += weight[static_cast<std::size_t>(i)] * position[static_cast<std::size_t>(i)];
    }
    barycenter /= total_weight;
    const double sign = total_weight > previous_total_weight ? -1.0 : 1.0;
    previous_total_weight = total_weight;
    for (int i = 0; i < school; ++i) {
      auto& pos = position[static_cast<std::size_t>(i)];
      const Eigen::VectorXd to_fish = pos - barycenter;
      const double distance = to_fish.norm();
      if (distance <= 0.0) continue;
      const double u = unit(fish_rng[static_cast<std::size_t>(i)]);
      pos = clip_to_box(
          pos + sign * u * step_vol * (width.array() * (to_fish / distance).array()).matrix(),
          lower, upper);
    }

    // Re-evaluate at the final positions so the next iteration's improvement
    // comparisons use current fitness.
    for (int i = 0; i < school; ++i) {
      const double f = evaluate(position[static_cast<std::size_t>(i)]);
      fitness[static_cast<std::size_t>(i)] = f;
      if (f > best_f) {
        best_f = f;
        best_x = position[static_cast<std::size_t>(i)];
      }
    }

    result.trace.push_back(best_f);
  }

  result.theta_hat = best_x;
  result.loglik = best_f;
  result.final_weights = weight;
  return result;
}

double loglik_objective(const Eigen::VectorXd& theta, const ParamSpec& spec,
                        const CleanSeries& series, const TestParams& tests,
                        const Eigen::MatrixXd& coupling, const std::vector<RegionMeta>& regions,
                        const FilterOptions& options) {
  try {
    EpiParams params = spec.assemble(theta);
    params.validate();
    const double loglik =
        filter_series(series, regions, params, tests, coupling, options).total_loglik;
    return std::isfinite(loglik) ? loglik : kNegInf;
  } catch (const NumericalError&) {
    return kNegInf;
  } catch (const ValidationError&) {
    return kNegInf;
  }
}

FitResult fit(const CleanSeries& series, const ParamSpec& spec, const TestParams& tests,
              const Eigen::MatrixXd& coupling, const std::vector<RegionMeta>& regions,
              const FssConfig& config, const FilterOptions& options) {
  spec.validate();
  if (spec.unknowns.empty()) {
    FitResult result;
    result.theta_hat = Eigen::VectorXd();
    result.loglik =
        filter_series(series, regions, spec.fixed, tests, coupling, options).total_loglik;
    result.trace = {result.loglik};
    result.evaluations = 1;
    result.params_hat = spec.fixed;
    return result;
  }

  const auto objective = [&](const Eigen::VectorXd& theta) {
    return loglik_objective(theta, spec, series, tests, coupling, regions, options);
  };
  FitResult result = fss_optimize(objective, spec.lower_bounds(), spec.upper_bounds(), config);
  result.params_hat = spec.assemble(result.theta_hat);
  return result;
}

}  // namespace epi
