//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "epifilter/errors.hpp"
#include "epifilter/run.hpp"
#include "epifilter/version.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;
constexpr int kExitNumericalError = 4;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Override the config seed");
  cmd->add_option("--out", args.out_dir, "Override the output directory");
}

epi::RunConfig resolve(const CommonArgs& args) {
  epi::RunConfig config = epi::load_run_config(args.config_path);
  if (args.seed) {
    config.seed = *args.seed;
    config.fss.seed = *args.seed;
  }
  if (args.out_dir) config.out_dir = *args.out_dir;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic metapopulation SEIRD simulation, UKF state estimation, and "
               "maximum-likelihood parameter fitting"};
  app.set_version_flag("--version", epi::kVersion);
  app.require_subcommand(1);

  CommonArgs sim_args, filter_args, fit_args, forecast_args;
  int forecast_steps = 0;

  CLI::App* sim = app.add_subcommand("simulate", "Generate a synthetic epidemic");
  add_common(sim, sim_args);
  CLI::App* filter = app.add_subcommand("filter", "Estimate hidden states at known parameters");
  add_common(filter, filter_args);
  CLI::App* fit = app.add_subcommand("fit", "Maximum-likelihood parameter estimation");
  add_common(fit, fit_args);
  CLI::App* forecast = app.add_subcommand("forecast", "Propagate the last filtered state");
  add_common(forecast, forecast_args);
  forecast->add_option("--steps", forecast_steps, "Forecast horizon in time units")
      ->required()
      ->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      epi::cmd_simulate(resolve(sim_args));
    } else if (filter->parsed()) {
      epi::cmd_filter(resolve(filter_args));
    } else if (fit->parsed()) {
      epi::cmd_fit(resolve(fit_args));
    } else if (forecast->parsed()) {
      epi::cmd_forecast(resolve(forecast_args), forecast_steps);
    }
  } catch (const epi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const epi::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const epi::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const epi::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericalError;
  }
  return 0;
}
