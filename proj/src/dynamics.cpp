//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "epifilter/dynamics.hpp"

#include <string>

#include "epifilter/errors.hpp"
#include "epifilter/observation.hpp"

namespace epi {

namespace {

void check_integer_states(const CountMatrix& states) {
  if (states.rows() < 1) {
    throw ValidationError("state matrix must have at least one region row");
  }
  if ((states.array() < 0).any()) {
    throw ValidationError("compartment counts must be nonnegative");
  }
}

}  // namespace

StochasticStep step_stochastic(const CountMatrix& states, const EpiParams& params,
                               const Eigen::MatrixXd& coupling, Rng& rng) {
  check_integer_states(states);
  params.validate();
  const Eigen::Index g = states.rows();
  if (coupling.rows() != g || coupling.cols() != g) {
    throw ValidationError("coupling matrix shape does not match the region count");
  }

  const Eigen::VectorXd populations =
      states.rowwise().sum().cast<double>();

  // Per-source exposure probabilities lambda_S c_ij I_j / N_j, shared by all
  // rows of the multinomial draw below.
  Eigen::VectorXd infective_density(g);
  for (Eigen::Index j = 0; j < g; ++j) {
    infective_density(j) = static_cast<double>(states(j, kI)) / populations(j);
  }

  StochasticStep out;
  out.next = states;
  out.fluxes.resize(static_cast<std::size_t>(g));

  for (Eigen::Index i = 0; i < g; ++i) {
    Eigen::VectorXd exposure_probs =
        params.lambda_s * (coupling.row(i).transpose().array() * infective_density.array());
    const double pressure = exposure_probs.sum();
    if (pressure > 1.0 + 1e-12) {
      throw InfectionPressureError("region " + std::to_string(i) +
                                   ": exposure probabilities sum to " +
                                   std::to_string(pressure) + " > 1");
    }

    FluxRecord& flux = out.fluxes[static_cast<std::size_t>(i)];
    flux.new_exposed_by_source = draw_multinomial(rng, states(i, kS), exposure_probs);
    flux.new_infective = draw_binomial(rng, states(i, kE), params.lambda_e);

    Eigen::Vector2d removal_probs(params.lambda_r, params.lambda_d);
    const CountVector removals = draw_multinomial(rng, states(i, kI), removal_probs);
    flux.new_recovered = removals(0);
    flux.new_deceased = removals(1);

    const std::int64_t newly_exposed = flux.new_exposed_by_source.sum();
    out.next(i, kS) -= newly_exposed;
    out.next(i, kE) += newly_exposed - flux.new_infective;
    out.next(i, kI) += flux.new_infective - flux.new_recovered - flux.new_deceased;
    out.next(i, kR) += flux.new_recovered;
    out.next(i, kD) += flux.new_deceased;
  }
  return out;
}

CountMatrix apply_fluxes(const CountMatrix& states, const std::vector<FluxRecord>& fluxes) {
  if (static_cast<Eigen::Index>(fluxes.size()) != states.rows()) {
    throw ValidationError("flux record count does not match the region count");
  }
  CountMatrix next = states;
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    const FluxRecord& flux = fluxes[static_cast<std::size_t>(i)];
    const std::int64_t newly_exposed = flux.new_exposed_by_source.sum();
    next(i, kS) -= newly_exposed;
    next(i, kE) += newly_exposed - flux.new_infective;
    next(i, kI) += flux.new_infective - flux.new_recovered - flux.new_deceased;
    next(i, kR) += flux.new_recovered;
    next(i, kD) += flux.new_deceased;
  }
  return next;
}

Vec5 seird_mean_map(const Vec5& state, const EpiParams& params, double inv_population,
                    double coupled_infective_fraction) {
  const double pressure =
      params.lambda_s * (state(kI) * inv_population + coupled_infective_fraction);
  const double new_exposed = pressure * state(kS);

  Vec5 next;
  next(kS) = state(kS) - new_exposed;
  next(kE) = (1.0 - params.lambda_e) * state(kE) + new_exposed;
  next(kI) = (1.0 - params.lambda_r - params.lambda_d) * state(kI) + params.lambda_e * state(kE);
  next(kR) = state(kR) + params.lambda_r * state(kI);
  next(kD) = state(kD) + params.lambda_d * state(kI);

  if (next.minCoeff() < 0.0) {
    // Round-off can push a component slightly negative; clamp and take the
    // deficit from the largest compartment so the sum is preserved.
    const double target = state.sum();
    next = next.cwiseMax(0.0);
    Eigen::Index largest;
    next.maxCoeff(&largest);
    next(largest) -= next.sum() - target;
  }
  return next;
}

StateMatrix step_mean(const StateMatrix& states, const EpiParams& params,
                      const Eigen::MatrixXd& coupling) {
  params.validate();
  const Eigen::Index g = states.rows();
  if (coupling.rows() != g || coupling.cols() != g) {
    throw ValidationError("coupling matrix shape does not match the region count");
  }
  if ((states.array() < 0).any()) {
    throw ValidationError("compartment values must be nonnegative");
  }

  const Eigen::VectorXd populations = states.rowwise().sum();
  StateMatrix next(g, 5);
  for (Eigen::Index i = 0; i < g; ++i) {
    double coupled = 0.0;
    for (Eigen::Index j = 0; j < g; ++j) {
      if (j == i) continue;
      coupled += coupling(i, j) * states(j, kI) / populations(j);
    }
    next.row(i) =
        seird_mean_map(states.row(i).transpose(), params, 1.0 / populations(i), coupled)
            .transpose();
  }
  return next;
}

SimulationResult simulate(const CountMatrix& initial, const EpiParams& params,
                          const TestParams& tests, const EpsilonSet& eps,
                          const Eigen::MatrixXd& coupling, int horizon, Rng& rng) {
  if (horizon < 1) {
    throw ValidationError("simulation horizon must be at least 1");
  }
  check_integer_states(initial);
  tests.validate();

  SimulationResult result;
  result.states.reserve(static_cast<std::size_t>(horizon) + 1);
  result.states.push_back(initial);
  result.observations.reserve(static_cast<std::size_t>(horizon));
  result.fluxes.reserve(static_cast<std::size_t>(horizon));

  const Eigen::Index g = initial.rows();
  for (int t = 1; t <= horizon; ++t) {
    StochasticStep step = step_stochastic(result.states.back(), params, coupling, rng);
    result.fluxes.push_back(std::move(step.fluxes));
    result.states.push_back(std::move(step.next));

    std::vector<ObservationRecord> obs(static_cast<std::size_t>(g));
    for (Eigen::Index i = 0; i < g; ++i) {
      ObservationRecord rec = observe_stochastic(
          result.states.back().row(i).transpose(), eps, tests, rng);
      rec.region_id = static_cast<int>(i);
      rec.t = t;
      obs[static_cast<std::size_t>(i)] = rec;
    }
    result.observations.push_back(std::move(obs));
  }
  return result;
}

}  // namespace epi
