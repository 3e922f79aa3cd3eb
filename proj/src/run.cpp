//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "epifilter/run.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <string>

#include <json.hpp>

#include "epifilter/coupling.hpp"
#include "epifilter/data.hpp"
#include "epifilter/dynamics.hpp"
#include "epifilter/errors.hpp"
#include "epifilter/observation.hpp"
#include "epifilter/version.hpp"

namespace epi {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

template <class T>
T get_required(const json& j, const std::string& key, const std::string& context) {
  if (!j.contains(key)) {
    throw ConfigError("missing required field " + context + key);
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field " + context + key + " has the wrong type");
  }
}

template <class T>
T get_optional(const json& j, const std::string& key, T fallback, const std::string& context) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field " + context + key + " has the wrong type");
  }
}

ParamSetting parse_param(const json& j, const std::string& key) {
  if (!j.contains(key)) {
    throw ConfigError("missing required field params." + key);
  }
  const json& v = j.at(key);
  ParamSetting setting;
  if (v.is_number()) {
    setting.value = v.get<double>();
    return setting;
  }
  if (v.is_object()) {
    setting.unknown = get_optional<bool>(v, "unknown", false, "params." + key + ".");
    if (!setting.unknown) {
      setting.value = get_required<double>(v, "value", "params." + key + ".");
      return setting;
    }
    const auto bounds =
        get_required<std::vector<double>>(v, "bounds", "params." + key + ".");
    if (bounds.size() != 2) {
      throw ConfigError("params." + key + ".bounds must be [lower, upper]");
    }
    setting.lower = bounds[0];
    setting.upper = bounds[1];
    return setting;
  }
  throw ConfigError("params." + key + " must be a number or an object");
}

json param_to_json(const ParamSetting& p) {
  if (!p.unknown) return json(p.value);
  return json{{"unknown", true}, {"bounds", {p.lower, p.upper}}};
}

SigmaWeighting parse_weighting(const std::string& s) {
  if (s == "textbook" || s == "kappa_zero") return SigmaWeighting::kappa_zero;
  if (s == "as_printed") return SigmaWeighting::as_printed;
  throw ConfigError("ukf.weighting must be 'textbook' or 'as_printed', got '" + s + "'");
}

std::string weighting_to_string(SigmaWeighting w) {
  return w == SigmaWeighting::kappa_zero ? "textbook" : "as_printed";
}

/// Everything a command needs that is derived from the config.
struct RunInputs {
  std::vector<RegionMeta> regions;
  Eigen::MatrixXd coupling;
  TestParams tests;
};

RunInputs load_inputs(const RunConfig& config) {
  RunInputs in;
  in.regions = load_regions(config.regions_path);
  if (in.regions.empty()) {
    throw DataError(config.regions_path + ": no regions");
  }
  in.coupling = gravity_coupling(in.regions, config.coupling_exponent, config.coupling_cap);
  in.tests = config.tests;
  in.tests.validate();
  return in;
}

EpiParams fixed_params_or_throw(const RunConfig& config, const std::string& command) {
  for (const auto& [name, setting] :
       {std::pair{"lambda_S", &config.lambda_s}, {"lambda_E", &config.lambda_e},
        {"lambda_R", &config.lambda_r}, {"lambda_D", &config.lambda_d}}) {
    if (setting->unknown) {
      throw ConfigError(command + " needs every parameter fixed; params." + name +
                        " is marked unknown");
    }
  }
  EpiParams params{config.lambda_s.value, config.lambda_e.value, config.lambda_r.value,
                   config.lambda_d.value};
  params.validate();
  return params;
}

ParamSpec param_spec_of(const RunConfig& config) {
  ParamSpec spec;
  const auto add = [&spec](const ParamSetting& setting, ParamName name, double& fixed_slot) {
    if (setting.unknown) {
      spec.unknowns.push_back({name, setting.lower, setting.upper});
      fixed_slot = (setting.lower + setting.upper) / 2.0;  // placeholder, overridden
    } else {
      fixed_slot = setting.value;
    }
  };
  add(config.lambda_s, ParamName::lambda_s, spec.fixed.lambda_s);
  add(config.lambda_e, ParamName::lambda_e, spec.fixed.lambda_e);
  add(config.lambda_r, ParamName::lambda_r, spec.fixed.lambda_r);
  add(config.lambda_d, ParamName::lambda_d, spec.fixed.lambda_d);
  return spec;
}

EpsilonSet synthetic_epsilons(const RunConfig& config) {
  if (!config.synthetic) {
    throw ConfigError("this command needs either 'observations' or 'synthetic' in the config");
  }
  EpsilonSet eps;
  eps.eps1 = config.synthetic->eps1;
  eps.eps2 = config.tests.zeta * config.synthetic->eps1;
  eps.eps3 = config.synthetic->eps3;
  eps.eps4 = config.tests.eps4;
  for (double value : {eps.eps1, eps.eps2, eps.eps3}) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw ConfigError("synthetic epsilons (and zeta * eps1) must lie in [0, 1]");
    }
  }
  return eps;
}

CountVector initial_infectives_of(const RunConfig& config, std::size_t num_regions) {
  const auto& seeds = config.synthetic->initial_infectives;
  if (seeds.size() != num_regions) {
    throw ConfigError("synthetic.initial_infectives must have one entry per region (" +
                      std::to_string(num_regions) + ")");
  }
  CountVector out(num_regions);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = seeds[i];
  }
  return out;
}

/// Observation series from whichever source the config provides.
CleanSeries resolve_series(const RunConfig& config, const RunInputs& in) {
  if (config.observations) {
    const auto& obs = *config.observations;
    if (obs.format == "series") {
      CleanSeries series = load_series_csv(obs.path);
      series.time_unit = config.time_unit;
      if (series.num_regions() != static_cast<int>(in.regions.size())) {
        throw DataError(obs.path + ": region count does not match the regions file");
      }
      return series;
    }
    if (obs.format == "daily") {
      const auto daily = load_daily_observations(obs.path);
      if (config.time_unit == "week") {
        return weekly_aggregate(daily, in.regions);
      }
      return daily_series(daily, in.regions);
    }
    throw ConfigError("observations.format must be 'series' or 'daily', got '" + obs.format +
                      "'");
  }
  if (config.synthetic) {
    const EpiParams params = fixed_params_or_throw(config, "synthetic generation");
    SyntheticResult synthetic = generate_synthetic(
        in.regions, params, in.tests, synthetic_epsilons(config), in.coupling,
        config.synthetic->horizon, config.seed, initial_infectives_of(config, in.regions.size()));
    synthetic.observations.time_unit = config.time_unit;
    return std::move(synthetic.observations);
  }
  throw ConfigError("this command needs either 'observations' or 'synthetic' in the config");
}

json config_to_json(const RunConfig& config) {
  json j;
  j["regions"] = config.regions_path;
  j["out"] = config.out_dir;
  j["time_unit"] = config.time_unit;
  j["seed"] = config.seed;
  j["coupling"] = {{"exponent", config.coupling_exponent}, {"cap", config.coupling_cap}};
  j["params"] = {{"lambda_S", param_to_json(config.lambda_s)},
                 {"lambda_E", param_to_json(config.lambda_e)},
                 {"lambda_R", param_to_json(config.lambda_r)},
                 {"lambda_D", param_to_json(config.lambda_d)}};
  j["tests"] = {{"alpha", config.tests.alpha},
                {"beta", config.tests.beta},
                {"zeta", config.tests.zeta},
                {"eps4", config.tests.eps4}};
  if (config.observations) {
    j["observations"] = {{"path", config.observations->path},
                         {"format", config.observations->format}};
  }
  if (config.synthetic) {
    j["synthetic"] = {{"horizon", config.synthetic->horizon},
                      {"initial_infectives", config.synthetic->initial_infectives},
                      {"eps1", config.synthetic->eps1},
                      {"eps3", config.synthetic->eps3}};
  }
  if (config.state_path) {
    j["state"] = *config.state_path;
  }
  j["fss"] = {{"school_size", config.fss.school_size},
              {"iterations", config.fss.iterations},
              {"step_ind", {config.fss.step_ind_init, config.fss.step_ind_final}},
              {"step_vol", {config.fss.step_vol_init, config.fss.step_vol_final}},
              {"weights", {config.fss.weight_min, config.fss.weight_max}}};
  j["ukf"] = {{"weighting", weighting_to_string(config.weighting)}};
  return j;
}

json flags_to_json(const std::vector<FlagEvent>& flags) {
  json arr = json::array();
  for (const FlagEvent& f : flags) {
    arr.push_back({{"t", f.t}, {"region", f.region}, {"kind", to_string(f.kind)}});
  }
  return arr;
}

fs::path prepare_out_dir(const RunConfig& config) {
  fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw DataError("cannot create output directory " + config.out_dir + ": " + ec.message());
  }
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& config,
                    const json& extra, const std::vector<FlagEvent>& flags) {
  json manifest;
  manifest["command"] = command;
  manifest["version"] = kVersion;
  manifest["config"] = config_to_json(config);
  manifest["flags"] = flags_to_json(flags);
  // The timestamp is informational; output CSV bodies stay byte-identical
  // across reruns with the same config and seed.
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof stamp, "%FT%TZ", &tm_utc);
  manifest["written_at"] = stamp;
  for (const auto& [key, value] : extra.items()) {
    manifest[key] = value;
  }
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

void write_estimates(const fs::path& dir, const CleanSeries& series, const FilterResult& filtered) {
  std::ofstream est(dir / "estimates.csv");
  est << "t,region_id,S,E,I,R,D,var_S,var_E,var_I,var_R,var_D,pred_P,pred_Q,loglik_increment,"
         "initial\n";
  char buf[512];
  const int g = static_cast<int>(filtered.estimates.size());
  const int times = g > 0 ? static_cast<int>(filtered.estimates[0].size()) : 0;
  for (int row = 0; row < times; ++row) {
    for (int i = 0; i < g; ++i) {
      const FilterEstimate& e = filtered.estimates[static_cast<std::size_t>(i)]
                                                  [static_cast<std::size_t>(row)];
      std::snprintf(buf, sizeof buf,
                    "%d,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.6g,%.6g,%.6g,%.6g,%.6g,%.10g,%.10g,"
                    "%.10g,%d\n",
                    series.first_time_index + row, i, e.mean(kS), e.mean(kE), e.mean(kI),
                    e.mean(kR), e.mean(kD), e.cov(kS, kS), e.cov(kE, kE), e.cov(kI, kI),
                    e.cov(kR, kR), e.cov(kD, kD), e.predicted_obs(0), e.predicted_obs(1),
                    e.loglik_increment, e.initial ? 1 : 0);
      est << buf;
    }
  }

  std::ofstream pred(dir / "predictions.csv");
  pred << "t,region_id,observed_P,pred_P,observed_Q,pred_Q,initial\n";
  for (int row = 0; row < times; ++row) {
    for (int i = 0; i < g; ++i) {
      const FilterEstimate& e = filtered.estimates[static_cast<std::size_t>(i)]
                                                  [static_cast<std::size_t>(row)];
      std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%.10g,%.10g,%.10g,%d\n",
                    series.first_time_index + row, i, series.new_cases(row, i),
                    e.predicted_obs(0), series.cum_deaths(row, i), e.predicted_obs(1),
                    e.initial ? 1 : 0);
      pred << buf;
    }
  }
}

void write_filter_state(const fs::path& dir, const RunInputs& in, const EpiParams& params,
                        const CleanSeries& series, const FilterResult& filtered) {
  json state;
  state["time_unit"] = series.time_unit;
  state["last_time_index"] = series.first_time_index + series.num_times() - 1;
  state["params"] = {{"lambda_S", params.lambda_s},
                     {"lambda_E", params.lambda_e},
                     {"lambda_R", params.lambda_r},
                     {"lambda_D", params.lambda_d}};
  json regions = json::array();
  for (std::size_t i = 0; i < in.regions.size(); ++i) {
    const FilterEstimate& last = filtered.estimates[i].back();
    json region;
    region["id"] = in.regions[i].id;
    region["population"] = in.regions[i].population;
    region["mean"] = {last.mean(kS), last.mean(kE), last.mean(kI), last.mean(kR), last.mean(kD)};
    const EpsilonSet& eps = filtered.last_eps[i];
    region["eps"] = {eps.eps1, eps.eps2, eps.eps3, eps.eps4};
    regions.push_back(region);
  }
  state["regions"] = regions;

  json coupling = json::array();
  for (Eigen::Index i = 0; i < in.coupling.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < in.coupling.cols(); ++j) row.push_back(in.coupling(i, j));
    coupling.push_back(row);
  }
  state["coupling"] = coupling;
  state["tests"] = {{"alpha", in.tests.alpha},
                    {"beta", in.tests.beta},
                    {"zeta", in.tests.zeta},
                    {"eps4", in.tests.eps4}};

  std::ofstream out(dir / "filter_state.json");
  out << state.dump(2) << '\n';
}

FilterResult run_filter(const RunConfig& config, const RunInputs& in, const EpiParams& params,
                        const CleanSeries& series) {
  FilterOptions options;
  options.weighting = config.weighting;
  return filter_series(series, in.regions, params, in.tests, in.coupling, options);
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  const json j = parse_json_file(path);
  RunConfig config;
  config.regions_path = get_required<std::string>(j, "regions", "");
  config.out_dir = get_optional<std::string>(j, "out", "out", "");
  config.time_unit = get_optional<std::string>(j, "time_unit", "day", "");
  if (config.time_unit != "day" && config.time_unit != "week") {
    throw ConfigError("time_unit must be 'day' or 'week'");
  }
  config.seed = get_optional<std::uint64_t>(j, "seed", 0, "");

  if (j.contains("coupling")) {
    const json& c = j.at("coupling");
    config.coupling_exponent = get_optional<double>(c, "exponent", 2.0, "coupling.");
    config.coupling_cap = get_optional<double>(c, "cap", 0.1, "coupling.");
  }

  if (!j.contains("params")) throw ConfigError("missing required field params");
  const json& p = j.at("params");
  config.lambda_s = parse_param(p, "lambda_S");
  config.lambda_e = parse_param(p, "lambda_E");
  config.lambda_r = parse_param(p, "lambda_R");
  config.lambda_d = parse_param(p, "lambda_D");

  if (!j.contains("tests")) throw ConfigError("missing required field tests");
  const json& t = j.at("tests");
  config.tests.alpha = get_required<double>(t, "alpha", "tests.");
  config.tests.beta = get_required<double>(t, "beta", "tests.");
  config.tests.zeta = get_required<double>(t, "zeta", "tests.");
  config.tests.eps4 = get_required<double>(t, "eps4", "tests.");

  if (j.contains("observations")) {
    ObservationsSpec obs;
    const json& o = j.at("observations");
    obs.path = get_required<std::string>(o, "path", "observations.");
    obs.format = get_optional<std::string>(o, "format", "series", "observations.");
    config.observations = obs;
  }
  if (j.contains("synthetic")) {
    SyntheticSpec synth;
    const json& s = j.at("synthetic");
    synth.horizon = get_required<int>(s, "horizon", "synthetic.");
    synth.initial_infectives =
        get_required<std::vector<std::int64_t>>(s, "initial_infectives", "synthetic.");
    synth.eps1 = get_required<double>(s, "eps1", "synthetic.");
    synth.eps3 = get_required<double>(s, "eps3", "synthetic.");
    config.synthetic = synth;
  }
  if (j.contains("state")) {
    config.state_path = get_required<std::string>(j, "state", "");
  }

  if (j.contains("fss")) {
    const json& f = j.at("fss");
    config.fss.school_size = get_optional<int>(f, "school_size", 30, "fss.");
    config.fss.iterations = get_optional<int>(f, "iterations", 200, "fss.");
    const auto step_ind = get_optional<std::vector<double>>(f, "step_ind", {0.1, 0.001}, "fss.");
    const auto step_vol = get_optional<std::vector<double>>(f, "step_vol", {0.2, 0.002}, "fss.");
    const auto weights = get_optional<std::vector<double>>(f, "weights", {1.0, 500.0}, "fss.");
    if (step_ind.size() != 2 || step_vol.size() != 2 || weights.size() != 2) {
      throw ConfigError("fss.step_ind, fss.step_vol, and fss.weights must be pairs");
    }
    config.fss.step_ind_init = step_ind[0];
    config.fss.step_ind_final = step_ind[1];
    config.fss.step_vol_init = step_vol[0];
    config.fss.step_vol_final = step_vol[1];
    config.fss.weight_min = weights[0];
    config.fss.weight_max = weights[1];
  }
  config.fss.seed = config.seed;

  if (j.contains("ukf")) {
    config.weighting = parse_weighting(
        get_optional<std::string>(j.at("ukf"), "weighting", "textbook", "ukf."));
  }
  return config;
}

void cmd_simulate(const RunConfig& config) {
  const RunInputs in = load_inputs(config);
  const EpiParams params = fixed_params_or_throw(config, "simulate");
  if (!config.synthetic) {
    throw ConfigError("simulate needs a 'synthetic' block");
  }

  SyntheticResult result = generate_synthetic(
      in.regions, params, in.tests, synthetic_epsilons(config), in.coupling,
      config.synthetic->horizon, config.seed, initial_infectives_of(config, in.regions.size()));
  result.observations.time_unit = config.time_unit;

  const fs::path dir = prepare_out_dir(config);
  write_truth_csv((dir / "truth.csv").string(), result.truth);
  write_series_csv((dir / "observations.csv").string(), result.observations);

  // Per-region summary: peak infectives, when they peaked, final deaths.
  std::ofstream summary(dir / "summary.csv");
  summary << "region_id,peak_I,t_peak,final_D\n";
  const Eigen::Index g = result.truth.front().rows();
  for (Eigen::Index i = 0; i < g; ++i) {
    std::int64_t peak = -1;
    std::size_t t_peak = 0;
    for (std::size_t t = 0; t < result.truth.size(); ++t) {
      if (result.truth[t](i, kI) > peak) {
        peak = result.truth[t](i, kI);
        t_peak = t;
      }
    }
    summary << i << ',' << peak << ',' << t_peak << ',' << result.truth.back()(i, kD) << '\n';
  }

  write_manifest(dir, "simulate", config,
                 json{{"horizon", config.synthetic->horizon},
                      {"outputs", {"truth.csv", "observations.csv", "summary.csv"}}},
                 result.observations.flags);
}

void cmd_filter(const RunConfig& config) {
  const RunInputs in = load_inputs(config);
  const EpiParams params = fixed_params_or_throw(config, "filter");
  const CleanSeries series = resolve_series(config, in);
  const FilterResult filtered = run_filter(config, in, params, series);

  const fs::path dir = prepare_out_dir(config);
  write_estimates(dir, series, filtered);
  write_filter_state(dir, in, params, series, filtered);

  std::vector<FlagEvent> flags = series.flags;
  flags.insert(flags.end(), filtered.flags.begin(), filtered.flags.end());
  write_manifest(dir, "filter", config,
                 json{{"total_loglik", filtered.total_loglik},
                      {"outputs", {"estimates.csv", "predictions.csv", "filter_state.json"}}},
                 flags);
}

void cmd_fit(const RunConfig& config) {
  const RunInputs in = load_inputs(config);
  ParamSpec spec = param_spec_of(config);
  if (spec.unknowns.empty()) {
    throw ConfigError("fit needs at least one unknown parameter; use the filter command when "
                      "all parameters are known");
  }
  spec.validate();
  const CleanSeries series = resolve_series(config, in);

  FilterOptions options;
  options.weighting = config.weighting;
  FssConfig fss = config.fss;
  fss.seed = config.seed;
  const FitResult fitted = fit(series, spec, in.tests, in.coupling, in.regions, fss, options);

  const fs::path dir = prepare_out_dir(config);
  json fit_json;
  fit_json["loglik"] = fitted.loglik;
  fit_json["evaluations"] = fitted.evaluations;
  json theta = json::object();
  for (std::size_t k = 0; k < spec.unknowns.size(); ++k) {
    theta[to_string(spec.unknowns[k].name)] = fitted.theta_hat(static_cast<Eigen::Index>(k));
  }
  fit_json["theta_hat"] = theta;
  fit_json["params_hat"] = {{"lambda_S", fitted.params_hat.lambda_s},
                            {"lambda_E", fitted.params_hat.lambda_e},
                            {"lambda_R", fitted.params_hat.lambda_r},
                            {"lambda_D", fitted.params_hat.lambda_d}};
  {
    std::ofstream out(dir / "fit.json");
    out << fit_json.dump(2) << '\n';
  }
  {
    std::ofstream trace(dir / "trace.csv");
    trace << "iteration,best_loglik\n";
    for (std::size_t k = 0; k < fitted.trace.size(); ++k) {
      trace << k << ',' << std::setprecision(12) << fitted.trace[k] << '\n';
    }
  }

  // In-sample filter pass at the estimate: one-step predictions per region.
  const FilterResult filtered = run_filter(config, in, fitted.params_hat, series);
  write_estimates(dir, series, filtered);
  write_filter_state(dir, in, fitted.params_hat, series, filtered);

  std::vector<FlagEvent> flags = series.flags;
  flags.insert(flags.end(), filtered.flags.begin(), filtered.flags.end());
  write_manifest(dir, "fit", config,
                 json{{"total_loglik", filtered.total_loglik},
                      {"fit", fit_json},
                      {"outputs",
                       {"fit.json", "trace.csv", "estimates.csv", "predictions.csv",
                        "filter_state.json"}}},
                 flags);
}

void cmd_forecast(const RunConfig& config, int steps) {
  if (steps < 0) {
    throw ConfigError("forecast steps must be nonnegative");
  }
  const fs::path state_path = config.state_path
                                  ? fs::path(*config.state_path)
                                  : fs::path(config.out_dir) / "filter_state.json";
  if (!fs::exists(state_path)) {
    throw DataError("no filter state at " + state_path.string() +
                    "; run the filter or fit command first");
  }
  const json state = parse_json_file(state_path.string());

  EpiParams params;
  try {
    params.lambda_s = state.at("params").at("lambda_S").get<double>();
    params.lambda_e = state.at("params").at("lambda_E").get<double>();
    params.lambda_r = state.at("params").at("lambda_R").get<double>();
    params.lambda_d = state.at("params").at("lambda_D").get<double>();
    params.validate();

    TestParams tests{state.at("tests").at("alpha").get<double>(),
                     state.at("tests").at("beta").get<double>(),
                     state.at("tests").at("zeta").get<double>(),
                     state.at("tests").at("eps4").get<double>()};

    const json& regions = state.at("regions");
    const Eigen::Index g = static_cast<Eigen::Index>(regions.size());
    StateMatrix means(g, 5);
    std::vector<EpsilonSet> eps(static_cast<std::size_t>(g));
    for (Eigen::Index i = 0; i < g; ++i) {
      const json& region = regions.at(static_cast<std::size_t>(i));
      for (int c = 0; c < 5; ++c) {
        means(i, c) = region.at("mean").at(static_cast<std::size_t>(c)).get<double>();
      }
      auto& e = eps[static_cast<std::size_t>(i)];
      e.eps1 = region.at("eps").at(0).get<double>();
      e.eps2 = region.at("eps").at(1).get<double>();
      e.eps3 = region.at("eps").at(2).get<double>();
      e.eps4 = region.at("eps").at(3).get<double>();
    }

    Eigen::MatrixXd coupling(g, g);
    for (Eigen::Index i = 0; i < g; ++i) {
      for (Eigen::Index j = 0; j < g; ++j) {
        coupling(i, j) = state.at("coupling").at(static_cast<std::size_t>(i))
                             .at(static_cast<std::size_t>(j)).get<double>();
      }
    }
    const int last_t = state.at("last_time_index").get<int>();

    const fs::path dir = prepare_out_dir(config);
    std::ofstream out(dir / "forecast.csv");
    out << "t,region_id,S,E,I,R,D,pred_P,pred_Q\n";
    char buf[512];
    StateMatrix current = means;
    for (int step = 0; step <= steps; ++step) {
      for (Eigen::Index i = 0; i < g; ++i) {
        const Vec2 obs = observe_mean(current.row(i).transpose(),
                                      eps[static_cast<std::size_t>(i)], tests);
        std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      last_t + step, static_cast<int>(i), current(i, kS), current(i, kE),
                      current(i, kI), current(i, kR), current(i, kD), obs(0), obs(1));
        out << buf;
      }
      if (step < steps) {
        current = step_mean(current, params, coupling);
      }
    }
    write_manifest(dir, "forecast", config,
                   json{{"steps", steps}, {"outputs", {"forecast.csv"}}}, {});
  } catch (const json::exception& e) {
    throw DataError(state_path.string() + ": malformed filter state: " + e.what());
  }
}

}  // namespace epi
