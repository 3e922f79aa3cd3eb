//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "epifilter/observation.hpp"

#include <cmath>
#include <string>

#include "epifilter/errors.hpp"

namespace epi {

namespace {

// Tested subpopulation sizes: asymptomatic healthy, symptomatic healthy,
// symptomatic infective, asymptomatic infective plus exposed.
struct Cohorts {
  double a;   // (1 - eps3)(S + R)
  double b;   // eps3 (S + R)
  double c;   // (1 - eps4) I
  double d4;  // eps4 I + E
};

Cohorts cohorts_of(const Vec5& state, const EpsilonSet& eps) {
  const double sr = state(kS) + state(kR);
  return {(1.0 - eps.eps3) * sr, eps.eps3 * sr, (1.0 - eps.eps4) * state(kI),
          eps.eps4 * state(kI) + state(kE)};
}

std::int64_t round_half_even(double x) {
  return static_cast<std::int64_t>(std::nearbyint(std::max(x, 0.0)));
}

}  // namespace

ReportedRates forward_rates(const Vec5& state, const EpsilonSet& eps, const TestParams& tests) {
  const Cohorts k = cohorts_of(state, eps);
  const double living = k.a + k.b + k.c + k.d4;  // = S + E + I + R
  const double tested = eps.eps1 * (k.a + k.d4) + eps.eps2 * (k.b + k.c);
  if (tested <= 0.0 || living <= 0.0) {
    return {0.0, 0.0};
  }
  const double positives = eps.eps1 * (k.a * tests.alpha + k.d4 * tests.beta) +
                           eps.eps2 * (k.b * tests.alpha + k.c * tests.beta);
  return {tested / living, positives / tested};
}

EpsilonSet compute_epsilons(const Vec5& state, double rt, double rp, const TestParams& tests) {
  if (!(tests.beta > tests.alpha)) {
    throw ValidationError("compute_epsilons requires beta > alpha");
  }
  if (!(rp > tests.alpha && rp < tests.beta)) {
    throw InversionInfeasibleError("positivity " + std::to_string(rp) +
                                   " outside the feasible interval (alpha, beta) = (" +
                                   std::to_string(tests.alpha) + ", " +
                                   std::to_string(tests.beta) + ")");
  }

  const double sr = state(kS) + state(kR);
  const double infective = state(kI);
  const double exposed = state(kE);
  const double living = sr + infective + exposed;
  if (!(sr > 0.0)) {
    throw DegenerateStateError("epsilon inversion needs S + R > 0");
  }

  const double d4 = tests.eps4 * infective + exposed;
  const double denom3 = (tests.zeta - 1.0) * sr * (rp - tests.alpha);
  if (denom3 == 0.0) {
    throw DegenerateStateError("epsilon_3 denominator vanished (zeta - 1)(S + R)(rp - alpha)");
  }
  const double eps3 = ((tests.beta - rp) * d4 +
                       tests.zeta * (1.0 - tests.eps4) * infective * (tests.beta - rp) -
                       sr * (rp - tests.alpha)) /
                      denom3;

  const double a = (1.0 - eps3) * sr;
  const double b = eps3 * sr;
  const double c = (1.0 - tests.eps4) * infective;
  const double denom1 = (tests.beta - tests.alpha) * (b * d4 - a * c);
  if (denom1 == 0.0) {
    throw DegenerateStateError("epsilon_1 denominator vanished; the tested cohorts are "
                               "linearly dependent");
  }
  const double eps1 =
      living * rt * (rp * (b + c) - tests.alpha * b - tests.beta * c) / denom1;
  const double eps2 = tests.zeta * eps1;

  EpsilonSet result{eps1, eps2, eps3, tests.eps4};
  for (double* value : {&result.eps1, &result.eps2, &result.eps3}) {
    if (*value < -1e-12 || *value > 1.0 + 1e-12) {
      throw InconsistentInputsError("inverted epsilon " + std::to_string(*value) +
                                    " lies outside [0, 1]");
    }
    *value = std::min(std::max(*value, 0.0), 1.0);
  }

  const ReportedRates round_trip = forward_rates(state, result, tests);
  const auto close = [](double got, double want) {
    return std::abs(got - want) <= 1e-9 * std::max({std::abs(got), std::abs(want), 1e-30});
  };
  if (!close(round_trip.rt, rt) || !close(round_trip.rp, rp)) {
    throw InconsistentInputsError("epsilon inversion failed to reproduce the reported rates");
  }
  return result;
}

Vec2 observe_mean(const Vec5& state, const EpsilonSet& eps, const TestParams& tests) {
  const Cohorts k = cohorts_of(state, eps);
  Vec2 expected;
  expected(0) = tests.beta * eps.eps2 * k.c + tests.beta * eps.eps1 * k.d4 +
                tests.alpha * eps.eps1 * k.a + tests.alpha * eps.eps2 * k.b;
  expected(1) = tests.beta * state(kD);
  return expected;
}

ObservationRecord observe_stochastic(const CountVec5& state, const EpsilonSet& eps,
                                     const TestParams& tests, Rng& rng) {
  const Vec5 real_state = state.cast<double>();
  const Cohorts k = cohorts_of(real_state, eps);

  const std::int64_t true_pos =
      draw_binomial(rng, round_half_even(eps.eps2 * k.c), tests.beta) +
      draw_binomial(rng, round_half_even(eps.eps1 * k.d4), tests.beta);
  const std::int64_t false_pos =
      draw_binomial(rng, round_half_even(eps.eps1 * k.a), tests.alpha) +
      draw_binomial(rng, round_half_even(eps.eps2 * k.b), tests.alpha);
  const std::int64_t reported_deaths = draw_binomial(rng, state(kD), tests.beta);

  ObservationRecord rec;
  rec.p = static_cast<double>(true_pos + false_pos);
  rec.q = static_cast<double>(reported_deaths);
  const ReportedRates rates = forward_rates(real_state, eps, tests);
  rec.rt = rates.rt;
  rec.rp = rates.rp;
  return rec;
}

}  // namespace epi
