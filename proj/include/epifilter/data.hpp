//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef EPIFILTER_DATA_HPP
#define EPIFILTER_DATA_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epifilter/types.hpp"

namespace epi {

/// One row of daily reported data as ingested, before any cleaning.
struct RawDailyRecord {
  std::chrono::sys_days date;
  int region_id = 0;
  std::int64_t cum_cases = 0;
  std::int64_t cum_deaths = 0;
  std::optional<double> tests_total;  // tests administered that day
  std::optional<double> positivity;   // positives per test that day
};

/// Cleaned, aligned observation series: T x G matrices, one row per time
/// unit, one column per region, plus the audit flags raised while cleaning.
struct CleanSeries {
  Eigen::MatrixXd new_cases;   // P
  Eigen::MatrixXd cum_deaths;  // Q
  Eigen::MatrixXd test_rate;   // R_T
  Eigen::MatrixXd positivity;  // R_P
  std::vector<FlagEvent> flags;
  std::string time_unit = "day";
  int first_time_index = 0;             // time label of row 0
  std::vector<std::string> time_labels; // optional, e.g. week start dates

  int num_times() const { return static_cast<int>(new_cases.rows()); }
  int num_regions() const { return static_cast<int>(new_cases.cols()); }
  ObservationRecord record(int row, int region) const;
};

/// Region metadata CSV with header `id,name,population,lat,lon`.
std::vector<RegionMeta> load_regions(const std::string& path);

/// Daily observations CSV with header
/// `date,region_id,cum_cases,cum_deaths,tests_total,positivity`; the two
/// trailing fields may be empty. Dates are ISO-8601. Rows are returned
/// grouped by region in file order; per region, dates must be strictly
/// increasing.
std::vector<RawDailyRecord> load_daily_observations(const std::string& path);

/// Collapses daily records into one point per Sunday-to-Saturday week:
/// cumulative cases are differenced into daily new cases (negative
/// corrections clamped to zero and flagged), then block-averaged; cumulative
/// deaths are made non-decreasing and block-averaged; testing and positivity
/// rates are block-averaged with missing values carried forward and flagged.
/// Partial leading/trailing weeks are dropped. Requires contiguous dates and
/// an identical date range in every region.
CleanSeries weekly_aggregate(const std::vector<RawDailyRecord>& daily,
                             const std::vector<RegionMeta>& regions);

/// Same cleaning as weekly_aggregate, but one output point per day.
CleanSeries daily_series(const std::vector<RawDailyRecord>& daily,
                         const std::vector<RegionMeta>& regions);

struct SyntheticResult {
  std::vector<CountMatrix> truth;  // hidden states, t = 0..horizon
  CleanSeries observations;        // t = 1..horizon
};

/// Simulates a ground-truth epidemic and packages its observations as a
/// CleanSeries with exact reported rates. The epidemic starts with
/// `initial_infectives[i]` infective individuals in region i and everyone
/// else susceptible.
SyntheticResult generate_synthetic(const std::vector<RegionMeta>& regions,
                                   const EpiParams& params, const TestParams& tests,
                                   const EpsilonSet& eps, const Eigen::MatrixXd& coupling,
                                   int horizon, std::uint64_t seed,
                                   const CountVector& initial_infectives);

/// Aggregated series CSV with header `t,region_id,P,Q,rt,rp`.
CleanSeries load_series_csv(const std::string& path);
void write_series_csv(const std::string& path, const CleanSeries& series);

/// Ground-truth CSV with header `t,region_id,S,E,I,R,D`.
void write_truth_csv(const std::string& path, const std::vector<CountMatrix>& truth);

}  // namespace epi

#endif  // EPIFILTER_DATA_HPP
