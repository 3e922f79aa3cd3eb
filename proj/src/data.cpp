//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "epifilter/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "epifilter/dynamics.hpp"
#include "epifilter/errors.hpp"

namespace epi {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

template <class T>
T parse_number(const std::string& raw, const std::string& what, int line_no) {
  const std::string s = strip(raw);
  T value{};
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse " + what + " from '" +
                     raw + "'");
  }
  return value;
}

std::chrono::sys_days parse_date(const std::string& raw, int line_no) {
  const std::string s = strip(raw);
  int y = 0, m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' ||
      std::sscanf(s.c_str(), "%d-%d-%d", &y, &m, &d) != 3) {
    throw ParseError("line " + std::to_string(line_no) + ": expected ISO date, got '" + raw +
                     "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) {
    throw ParseError("line " + std::to_string(line_no) + ": invalid calendar date '" + raw + "'");
  }
  return std::chrono::sys_days{ymd};
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open file: " + path);
  }
  return in;
}

void expect_header(std::ifstream& in, const std::string& expected, const std::string& path) {
  std::string header;
  if (!std::getline(in, header)) {
    throw ParseError(path + ": missing header row");
  }
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (strip(header) != expected) {
    throw ParseError(path + ": expected header '" + expected + "', got '" + header + "'");
  }
}

std::string format_date(std::chrono::sys_days day) {
  const std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

// Shared cleaning core: differences cumulative cases (clamping corrections),
// enforces non-decreasing cumulative deaths, and imputes missing rates by
// carrying the last observed value (backwards at the series head).
struct CleanedRegion {
  std::vector<double> new_cases;
  std::vector<double> cum_deaths;
  std::vector<double> test_rate;
  std::vector<double> positivity;
  std::vector<std::pair<int, FlagKind>> flags;  // day offset, kind
};

CleanedRegion clean_region(const std::vector<RawDailyRecord>& rows, double population) {
  CleanedRegion out;
  const int n = static_cast<int>(rows.size());
  out.new_cases.resize(n);
  out.cum_deaths.resize(n);
  out.test_rate.resize(n);
  out.positivity.resize(n);

  std::int64_t prev_cases = 0;
  double running_deaths = 0.0;
  for (int k = 0; k < n; ++k) {
    const std::int64_t diff = rows[k].cum_cases - prev_cases;
    prev_cases = rows[k].cum_cases;
    if (diff < 0) {
      out.new_cases[k] = 0.0;
      out.flags.emplace_back(k, FlagKind::negative_correction);
    } else {
      out.new_cases[k] = static_cast<double>(diff);
    }

    const double deaths = static_cast<double>(rows[k].cum_deaths);
    if (deaths < running_deaths) {
      out.flags.emplace_back(k, FlagKind::negative_correction);
    } else {
      running_deaths = deaths;
    }
    out.cum_deaths[k] = running_deaths;

    out.test_rate[k] = rows[k].tests_total ? *rows[k].tests_total / population : -1.0;
    out.positivity[k] = rows[k].positivity ? *rows[k].positivity : -1.0;
  }

  const auto impute = [&](std::vector<double>& values, const char* what) {
    int first_known = -1;
    for (int k = 0; k < n; ++k) {
      if (values[k] >= 0.0) {
        first_known = k;
        break;
      }
    }
    if (first_known < 0) {
      throw InsufficientDataError(std::string("no ") + what +
                                  " values at all; the epsilon inversion needs them");
    }
    double last = values[first_known];
    for (int k = 0; k < n; ++k) {
      if (values[k] >= 0.0) {
        last = values[k];
      } else {
        values[k] = last;
        out.flags.emplace_back(k, FlagKind::imputed_rate);
      }
    }
  };
  impute(out.test_rate, "testing-rate");
  impute(out.positivity, "positivity");
  return out;
}

std::vector<std::vector<RawDailyRecord>> group_by_region(
    const std::vector<RawDailyRecord>& daily, const std::vector<RegionMeta>& regions) {
  validate_regions(regions);
  const int g = static_cast<int>(regions.size());
  std::vector<std::vector<RawDailyRecord>> grouped(static_cast<std::size_t>(g));
  for (const RawDailyRecord& row : daily) {
    if (row.region_id < 0 || row.region_id >= g) {
      throw DataError("observation row references unknown region " +
                      std::to_string(row.region_id));
    }
    grouped[static_cast<std::size_t>(row.region_id)].push_back(row);
  }
  for (int i = 0; i < g; ++i) {
    auto& rows = grouped[static_cast<std::size_t>(i)];
    if (rows.empty()) {
      throw InsufficientDataError("region " + std::to_string(i) + " has no observations");
    }
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (rows[k].date <= rows[k - 1].date) {
        throw DataError("region " + std::to_string(i) +
                        ": dates must be strictly increasing");
      }
      if ((rows[k].date - rows[k - 1].date).count() != 1) {
        throw InsufficientDataError("region " + std::to_string(i) + ": gap before " +
                                    format_date(rows[k].date) + "; dates must be contiguous");
      }
    }
    if (rows.front().date != grouped[0].front().date || rows.back().date != grouped[0].back().date) {
      throw DataError("all regions must cover the same date range");
    }
  }
  return grouped;
}

}  // namespace

ObservationRecord CleanSeries::record(int row, int region) const {
  ObservationRecord rec;
  rec.p = new_cases(row, region);
  rec.q = cum_deaths(row, region);
  rec.rt = test_rate(row, region);
  rec.rp = positivity(row, region);
  rec.region_id = region;
  rec.t = first_time_index + row;
  return rec;
}

std::vector<RegionMeta> load_regions(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  expect_header(in, "id,name,population,lat,lon", path);

  std::vector<RegionMeta> regions;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (strip(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                       std::to_string(fields.size()));
    }
    RegionMeta r;
    r.id = parse_number<int>(fields[0], "id", line_no);
    r.name = strip(fields[1]);
    r.population = parse_number<std::int64_t>(fields[2], "population", line_no);
    r.lat = parse_number<double>(fields[3], "lat", line_no);
    r.lon = parse_number<double>(fields[4], "lon", line_no);
    regions.push_back(std::move(r));
  }
  if (!regions.empty()) {
    std::vector<RegionMeta> sorted = regions;
    std::sort(sorted.begin(), sorted.end(),
              [](const RegionMeta& a, const RegionMeta& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].id == sorted[i - 1].id) {
        throw ValidationError("duplicate region id " + std::to_string(sorted[i].id));
      }
    }
    validate_regions(sorted);
    regions = std::move(sorted);
  }
  return regions;
}

std::vector<RawDailyRecord> load_daily_observations(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  expect_header(in, "date,region_id,cum_cases,cum_deaths,tests_total,positivity", path);

  std::vector<RawDailyRecord> rows;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (strip(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 6) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                       std::to_string(fields.size()));
    }
    RawDailyRecord row;
    row.date = parse_date(fields[0], line_no);
    row.region_id = parse_number<int>(fields[1], "region_id", line_no);
    row.cum_cases = parse_number<std::int64_t>(fields[2], "cum_cases", line_no);
    row.cum_deaths = parse_number<std::int64_t>(fields[3], "cum_deaths", line_no);
    if (row.cum_cases < 0 || row.cum_deaths < 0) {
      throw ParseError("line " + std::to_string(line_no) + ": counts must be nonnegative");
    }
    if (!strip(fields[4]).empty()) {
      row.tests_total = parse_number<double>(fields[4], "tests_total", line_no);
    }
    if (!strip(fields[5]).empty()) {
      row.positivity = parse_number<double>(fields[5], "positivity", line_no);
    }
    rows.push_back(row);
  }
  return rows;
}

CleanSeries weekly_aggregate(const std::vector<RawDailyRecord>& daily,
                             const std::vector<RegionMeta>& regions) {
  const auto grouped = group_by_region(daily, regions);
  const int g = static_cast<int>(regions.size());
  const int days = static_cast<int>(grouped[0].size());

  // Sunday-to-Saturday blocks fully inside the date range.
  const std::chrono::sys_days first_day = grouped[0].front().date;
  const std::chrono::weekday first_wd{first_day};
  const int lead = (7 - static_cast<int>(first_wd.c_encoding())) % 7;
  const int weeks = (days - lead) / 7;
  if (weeks < 1) {
    throw InsufficientDataError("no complete Sunday-to-Saturday week in the data");
  }

  CleanSeries series;
  series.time_unit = "week";
  series.first_time_index = 0;
  series.new_cases.resize(weeks, g);
  series.cum_deaths.resize(weeks, g);
  series.test_rate.resize(weeks, g);
  series.positivity.resize(weeks, g);
  series.time_labels.reserve(static_cast<std::size_t>(weeks));
  for (int w = 0; w < weeks; ++w) {
    series.time_labels.push_back(format_date(first_day + std::chrono::days{lead + 7 * w}));
  }

  for (int i = 0; i < g; ++i) {
    const CleanedRegion cleaned =
        clean_region(grouped[static_cast<std::size_t>(i)],
                     static_cast<double>(regions[static_cast<std::size_t>(i)].population));
    for (int w = 0; w < weeks; ++w) {
      const int begin = lead + 7 * w;
      double cases = 0.0, deaths = 0.0, rate = 0.0, pos = 0.0;
      for (int d = begin; d < begin + 7; ++d) {
        cases += cleaned.new_cases[d];
        deaths += cleaned.cum_deaths[d];
        rate += cleaned.test_rate[d];
        pos += cleaned.positivity[d];
      }
      series.new_cases(w, i) = cases / 7.0;
      series.cum_deaths(w, i) = deaths / 7.0;
      series.test_rate(w, i) = rate / 7.0;
      series.positivity(w, i) = pos / 7.0;
    }
    // Keep only flags raised inside a retained week, mapped to week indices.
    for (const auto& [day, kind] : cleaned.flags) {
      if (day >= lead && day < lead + 7 * weeks) {
        series.flags.push_back({(day - lead) / 7, i, kind});
      }
    }
  }
  return series;
}

CleanSeries daily_series(const std::vector<RawDailyRecord>& daily,
                         const std::vector<RegionMeta>& regions) {
  const auto grouped = group_by_region(daily, regions);
  const int g = static_cast<int>(regions.size());
  const int days = static_cast<int>(grouped[0].size());

  CleanSeries series;
  series.time_unit = "day";
  series.first_time_index = 0;
  series.new_cases.resize(days, g);
  series.cum_deaths.resize(days, g);
  series.test_rate.resize(days, g);
  series.positivity.resize(days, g);
  series.time_labels.reserve(static_cast<std::size_t>(days));
  for (int d = 0; d < days; ++d) {
    series.time_labels.push_back(format_date(grouped[0][static_cast<std::size_t>(d)].date));
  }

  for (int i = 0; i < g; ++i) {
    const CleanedRegion cleaned =
        clean_region(grouped[static_cast<std::size_t>(i)],
                     static_cast<double>(regions[static_cast<std::size_t>(i)].population));
    for (int d = 0; d < days; ++d) {
      series.new_cases(d, i) = cleaned.new_cases[d];
      series.cum_deaths(d, i) = cleaned.cum_deaths[d];
      series.test_rate(d, i) = cleaned.test_rate[d];
      series.positivity(d, i) = cleaned.positivity[d];
    }
    for (const auto& [day, kind] : cleaned.flags) {
      series.flags.push_back({day, i, kind});
    }
  }
  return series;
}

SyntheticResult generate_synthetic(const std::vector<RegionMeta>& regions,
                                   const EpiParams& params, const TestParams& tests,
                                   const EpsilonSet& eps, const Eigen::MatrixXd& coupling,
                                   int horizon, std::uint64_t seed,
                                   const CountVector& initial_infectives) {
  validate_regions(regions);
  const Eigen::Index g = static_cast<Eigen::Index>(regions.size());
  if (initial_infectives.size() != g) {
    throw ValidationError("initial_infectives must have one entry per region");
  }

  CountMatrix initial = CountMatrix::Zero(g, 5);
  for (Eigen::Index i = 0; i < g; ++i) {
    const std::int64_t seeded = initial_infectives(i);
    const std::int64_t population = regions[static_cast<std::size_t>(i)].population;
    if (seeded < 0 || seeded > population) {
      throw ValidationError("initial infectives for region " + std::to_string(i) +
                            " must lie in [0, population]");
    }
    initial(i, kS) = population - seeded;
    initial(i, kI) = seeded;
  }

  Rng rng = make_substream(seed, 0);
  SimulationResult sim = simulate(initial, params, tests, eps, coupling, horizon, rng);

  SyntheticResult out;
  out.truth = std::move(sim.states);
  CleanSeries& series = out.observations;
  series.time_unit = "day";
  series.first_time_index = 1;
  series.new_cases.resize(horizon, g);
  series.cum_deaths.resize(horizon, g);
  series.test_rate.resize(horizon, g);
  series.positivity.resize(horizon, g);
  for (int t = 0; t < horizon; ++t) {
    for (Eigen::Index i = 0; i < g; ++i) {
      const ObservationRecord& rec =
          sim.observations[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      series.new_cases(t, i) = rec.p;
      series.cum_deaths(t, i) = rec.q;
      series.test_rate(t, i) = rec.rt;
      series.positivity(t, i) = rec.rp;
    }
  }
  return out;
}

CleanSeries load_series_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  expect_header(in, "t,region_id,P,Q,rt,rp", path);

  struct Row {
    int t, region;
    double p, q, rt, rp;
  };
  std::vector<Row> rows;
  std::string line;
  int line_no = 1;
  int max_region = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (strip(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 6) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                       std::to_string(fields.size()));
    }
    Row row;
    row.t = parse_number<int>(fields[0], "t", line_no);
    row.region = parse_number<int>(fields[1], "region_id", line_no);
    row.p = parse_number<double>(fields[2], "P", line_no);
    row.q = parse_number<double>(fields[3], "Q", line_no);
    row.rt = parse_number<double>(fields[4], "rt", line_no);
    row.rp = parse_number<double>(fields[5], "rp", line_no);
    max_region = std::max(max_region, row.region);
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw InsufficientDataError(path + ": no data rows");
  }

  const int g = max_region + 1;
  int t_min = rows.front().t, t_max = rows.front().t;
  for (const Row& row : rows) {
    t_min = std::min(t_min, row.t);
    t_max = std::max(t_max, row.t);
  }
  const int times = t_max - t_min + 1;

  CleanSeries series;
  series.first_time_index = t_min;
  series.new_cases = Eigen::MatrixXd::Constant(times, g, -1.0);
  series.cum_deaths.resize(times, g);
  series.test_rate.resize(times, g);
  series.positivity.resize(times, g);
  for (const Row& row : rows) {
    const int r = row.t - t_min;
    if (series.new_cases(r, row.region) >= 0.0) {
      throw DataError(path + ": duplicate entry for t=" + std::to_string(row.t) +
                      ", region=" + std::to_string(row.region));
    }
    series.new_cases(r, row.region) = row.p;
    series.cum_deaths(r, row.region) = row.q;
    series.test_rate(r, row.region) = row.rt;
    series.positivity(r, row.region) = row.rp;
  }
  if ((series.new_cases.array() < 0.0).any()) {
    throw DataError(path + ": missing (t, region) combinations; the grid must be complete");
  }
  return series;
}

void write_series_csv(const std::string& path, const CleanSeries& series) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << "t,region_id,P,Q,rt,rp\n";
  char buf[256];
  for (int t = 0; t < series.num_times(); ++t) {
    for (int i = 0; i < series.num_regions(); ++i) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%.10g,%.10g,%.10g\n",
                    series.first_time_index + t, i, series.new_cases(t, i),
                    series.cum_deaths(t, i), series.test_rate(t, i), series.positivity(t, i));
      out << buf;
    }
  }
}

void write_truth_csv(const std::string& path, const std::vector<CountMatrix>& truth) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << "t,region_id,S,E,I,R,D\n";
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const CountMatrix& states = truth[t];
    for (Eigen::Index i = 0; i < states.rows(); ++i) {
      out << t << ',' << i << ',' << states(i, kS) << ',' << states(i, kE) << ','
          << states(i, kI) << ',' << states(i, kR) << ',' << states(i, kD) << '\n';
    }
  }
}

}  // namespace epi
