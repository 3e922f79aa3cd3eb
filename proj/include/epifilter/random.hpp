//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef EPIFILTER_RANDOM_HPP
#define EPIFILTER_RANDOM_HPP

#include <cstdint>
#include <random>

#include "epifilter/types.hpp"

namespace epi {

using Rng = std::mt19937_64;

/// Child generator for stream `stream` of `seed`, derived with a splitmix64
/// step so that distinct streams decorrelate even for adjacent seeds.
Rng make_substream(std::uint64_t seed, std::uint64_t stream);

/// Binomial(n, p) draw; p is clamped to [0,1] within 1e-12 slack, anything
/// further out throws ValidationError.
std::int64_t draw_binomial(Rng& rng, std::int64_t n, double p);

/// Multinomial(n, probs) by conditional binomial decomposition. probs must
/// be nonnegative with sum <= 1 (within 1e-9); the remainder outcome is
/// implicit and not returned.
CountVector draw_multinomial(Rng& rng, std::int64_t n, const Eigen::VectorXd& probs);

}  // namespace epi

#endif  // EPIFILTER_RANDOM_HPP
