//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef EPIFILTER_DYNAMICS_HPP
#define EPIFILTER_DYNAMICS_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "epifilter/random.hpp"
#include "epifilter/types.hpp"

namespace epi {

/// One region's realized transition counts for one time unit.
struct FluxRecord {
  CountVector new_exposed_by_source;  // one entry per source region j
  std::int64_t new_infective = 0;
  std::int64_t new_recovered = 0;
  std::int64_t new_deceased = 0;
};

struct StochasticStep {
  CountMatrix next;                // states at t+1, one row per region
  std::vector<FluxRecord> fluxes;  // one record per region
};

/// Draws one step of the stochastic compartment model. Region populations
/// are the row sums of `states` (they are conserved exactly). Throws
/// InfectionPressureError, naming the region, if the per-region exposure
/// probabilities sum past one.
StochasticStep step_stochastic(const CountMatrix& states, const EpiParams& params,
                               const Eigen::MatrixXd& coupling, Rng& rng);

/// Replays flux records against a state; the result reproduces the next
/// state of the step that produced them, exactly.
CountMatrix apply_fluxes(const CountMatrix& states, const std::vector<FluxRecord>& fluxes);

/// Noise-free transition map for a single region.
///
/// `coupled_infective_fraction` is sum_{j != i} c_ij I_j / N_j, the frozen
/// contribution of the other regions; the region's own I enters through
/// `state` with c_ii = 1. Components driven negative by round-off are
/// clamped at zero and the deficit is taken from the largest compartment so
/// the component sum is preserved.
Vec5 seird_mean_map(const Vec5& state, const EpiParams& params, double inv_population,
                    double coupled_infective_fraction);

/// Noise-free transition map applied to all regions simultaneously.
/// Region populations are the row sums of `states`.
StateMatrix step_mean(const StateMatrix& states, const EpiParams& params,
                      const Eigen::MatrixXd& coupling);

struct SimulationResult {
  std::vector<CountMatrix> states;                          // t = 0..horizon
  std::vector<std::vector<ObservationRecord>> observations; // t = 1..horizon, inner index = region
  std::vector<std::vector<FluxRecord>> fluxes;              // fluxes[t] produced states[t+1]
};

/// Runs the stochastic model forward `horizon` steps, observing each new
/// state. Consumes `rng` sequentially: per step, first the state draw, then
/// one observation draw per region in region order.
SimulationResult simulate(const CountMatrix& initial, const EpiParams& params,
                          const TestParams& tests, const EpsilonSet& eps,
                          const Eigen::MatrixXd& coupling, int horizon, Rng& rng);

}  // namespace epi

#endif  // EPIFILTER_DYNAMICS_HPP
