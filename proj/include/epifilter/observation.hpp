//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef EPIFILTER_OBSERVATION_HPP
#define EPIFILTER_OBSERVATION_HPP

#include "epifilter/random.hpp"
#include "epifilter/types.hpp"

namespace epi {

struct ReportedRates {
  double rt = 0.0;  // tests per person per time unit
  double rp = 0.0;  // positives per test
};

/// Testing and positivity rates implied by a state and a full epsilon set.
/// If nobody is tested at all, both rates are zero.
ReportedRates forward_rates(const Vec5& state, const EpsilonSet& eps, const TestParams& tests);

/// Recovers (eps1, eps2, eps3) from reported rates, the current state, and
/// the fixed ratio zeta = eps2/eps1 and asymptomatic fraction eps4.
///
/// Preconditions enforced: alpha < rp < beta (else InversionInfeasibleError);
/// nonzero inversion denominators (else DegenerateStateError). Results are
/// required to land in [0, 1] and to reproduce (rt, rp) through
/// forward_rates within relative 1e-9; otherwise InconsistentInputsError.
EpsilonSet compute_epsilons(const Vec5& state, double rt, double rp, const TestParams& tests);

/// Noise-free observation map: expected (new confirmed cases, cumulative
/// recorded deaths).
Vec2 observe_mean(const Vec5& state, const EpsilonSet& eps, const TestParams& tests);

/// Draws one reported data point. Binomial size parameters are the tested
/// subpopulation sizes rounded half-to-even; the rt/rp fields are the
/// deterministic forward rates of the true state.
ObservationRecord observe_stochastic(const CountVec5& state, const EpsilonSet& eps,
                                     const TestParams& tests, Rng& rng);

}  // namespace epi

#endif  // EPIFILTER_OBSERVATION_HPP
