//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "epifilter/random.hpp"

#include <string>

#include "epifilter/errors.hpp"

namespace epi {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng make_substream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream * 0xda3e39cb94b95bdbULL + 1)));
}

std::int64_t draw_binomial(Rng& rng, std::int64_t n, double p) {
  if (n < 0) {
    throw ValidationError("binomial size must be nonnegative, got " + std::to_string(n));
  }
  if (p < -1e-12 || p > 1.0 + 1e-12) {
    throw ValidationError("binomial probability out of range: " + std::to_string(p));
  }
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<std::int64_t> dist(n, p);
  return dist(rng);
}

CountVector draw_multinomial(Rng& rng, std::int64_t n, const Eigen::VectorXd& probs) {
  const Eigen::Index m = probs.size();
  if ((probs.array() < -1e-12).any()) {
    throw ValidationError("multinomial probabilities must be nonnegative");
  }
  const double total = probs.sum();
  if (total > 1.0 + 1e-9) {
    throw ValidationError("multinomial probabilities sum to " + std::to_string(total) +
                          " which exceeds 1");
  }

  // Conditional decomposition: outcome j is Binomial over the counts still
  // unassigned, with its probability renormalized by the mass not yet used.
  CountVector out = CountVector::Zero(m);
  std::int64_t remaining = n;
  double used = 0.0;
  for (Eigen::Index j = 0; j < m && remaining > 0; ++j) {
    const double denom = 1.0 - used;
    double cond = denom > 0.0 ? probs(j) / denom : 1.0;
    cond = std::min(std::max(cond, 0.0), 1.0);
    out(j) = draw_binomial(rng, remaining, cond);
    remaining -= out(j);
    used += probs(j);
  }
  return out;
}

}  // namespace epi
