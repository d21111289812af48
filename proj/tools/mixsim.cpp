// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------
//
// mixsim: run an outage / sum-rate experiment and write CSV files.
//
//   mixsim --preset fig2a --trials 100000 --out-dir out/fig2a
//   mixsim --config my.cfg --snr 0:2:30 --scheme mixture,zf

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "mixsim/config.hpp"
#include "mixsim/runner.hpp"

namespace {

int workers_from_env() {
  const char* env = std::getenv("MIXSIM_WORKERS");
  if (env == nullptr || *env == '\0') {
    return 1;
  }
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    std::cerr << "mixsim: ignoring malformed MIXSIM_WORKERS='" << env << "'\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outage and sum-rate simulator for grouped superposition/SIC downlink beamforming"};
  app.set_version_flag("--version", mixsim::version_string());

  std::optional<std::string> preset, config_path, snr, scheme, out_dir_opt;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<double> theta_th, rth, cmargin;
  std::optional<int> workers;
  bool list_presets = false;

  app.add_option("--preset", preset, "Built-in experiment (see --list-presets)");
  app.add_option("--config", config_path, "Experiment file (key = value lines)");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--trials", trials, "Channel draws per SNR point");
  app.add_option("--snr", snr, "SNR grid in dB, lo:step:hi or a comma list");
  app.add_option("--scheme", scheme, "Comma list of mixture, zf, mrt, single_group");
  app.add_option("--theta-th", theta_th, "Grouping alignment threshold in (0, 1)");
  app.add_option("--rth", rth, "Target rate in bits per channel use");
  app.add_option("--cmargin", cmargin, "Power-split margin C > 0");
  app.add_option("--out-dir", out_dir_opt, "Output directory (default: out/<name>)");
  app.add_option("--workers", workers, "Worker threads (overrides MIXSIM_WORKERS)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--list-presets", list_presets, "Print the preset names and exit");

  CLI11_PARSE(app, argc, argv);

  if (list_presets) {
    for (const auto& n : mixsim::preset_names()) {
      std::cout << n << '\n';
    }
    return 0;
  }
  if (!preset && !config_path) {
    std::cerr << "mixsim: need --preset or --config\n\n" << app.help();
    return 2;
  }

  try {
    mixsim::ExperimentConfig cfg;
    if (preset) {
      cfg = mixsim::preset(*preset);
    }
    if (config_path) {
      cfg = mixsim::parse_config_file(*config_path, cfg);
    }
    if (seed) cfg.seed = *seed;
    if (trials) cfg.trials = *trials;
    if (snr) mixsim::apply_setting(cfg, "snr_db", *snr);
    if (scheme) mixsim::apply_setting(cfg, "schemes", *scheme);
    if (theta_th) cfg.grouping.theta_th = *theta_th;
    if (rth) cfg.deltas.r_th = *rth;
    if (cmargin) cfg.deltas.c_margin = *cmargin;
    // Histogram points that fell off an overridden grid are dropped.
    std::erase_if(cfg.histogram_snr_db, [&](double db) {
      return std::none_of(cfg.snr_db.begin(), cfg.snr_db.end(),
                          [db](double g) { return std::abs(g - db) < 1e-9; });
    });
    cfg.validate();

    const int n_workers = workers ? *workers : workers_from_env();
    const std::string out_dir = out_dir_opt ? *out_dir_opt : "out/" + cfg.name;
    const mixsim::RunManifest m = mixsim::run_experiment(cfg, out_dir, n_workers);
    for (const auto& o : m.outputs) {
      std::cout << o << '\n';
    }
    std::cout << m.manifest_path << '\n';
  } catch (const mixsim::ConfigError& e) {
    std::cerr << "mixsim: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mixsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
