//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef EPIFILTER_RUN_HPP
#define EPIFILTER_RUN_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epifilter/estimate.hpp"
#include "epifilter/types.hpp"
#include "epifilter/ukf.hpp"

namespace epi {

/// A transmission parameter in a run configuration: either a fixed value or
/// an unknown with search bounds.
struct ParamSetting {
  bool unknown = false;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct SyntheticSpec {
  int horizon = 0;
  std::vector<std::int64_t> initial_infectives;  // one entry per region
  double eps1 = 0.0;                             // generation-time epsilon_1
  double eps3 = 0.0;                             // generation-time epsilon_3
};

struct ObservationsSpec {
  std::string path;
  std::string format = "series";  // "series" (t,region_id,P,Q,rt,rp) or "daily"
};

/// Parsed run configuration (a JSON document; see README for the schema).
struct RunConfig {
  std::string regions_path;
  std::string out_dir = "out";
  std::string time_unit = "day";  // label only; never converted
  std::uint64_t seed = 0;
  double coupling_exponent = 2.0;
  double coupling_cap = 0.1;
  ParamSetting lambda_s, lambda_e, lambda_r, lambda_d;
  TestParams tests;
  std::optional<ObservationsSpec> observations;
  std::optional<SyntheticSpec> synthetic;
  std::optional<std::string> state_path;  // forecast input; defaults to out_dir/filter_state.json
  FssConfig fss;
  SigmaWeighting weighting = SigmaWeighting::kappa_zero;
};

RunConfig load_run_config(const std::string& path);

/// Writes ground truth, observations, per-region summary, and the manifest.
void cmd_simulate(const RunConfig& config);

/// Runs the UKF at fixed parameters; writes estimates, one-step predictions,
/// the resumable filter state, and the manifest.
void cmd_filter(const RunConfig& config);

/// Maximum-likelihood fit of the unknown parameters, then a filter pass at
/// the estimate (same outputs as cmd_filter, plus fit.json and trace.csv).
void cmd_fit(const RunConfig& config);

/// Propagates the last filtered posterior mean forward `steps` time units
/// with the noise-free maps; writes forecast.csv and the manifest.
void cmd_forecast(const RunConfig& config, int steps);

}  // namespace epi

#endif  // EPIFILTER_RUN_HPP
