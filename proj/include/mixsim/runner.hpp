// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixsim/montecarlo.hpp"

namespace mixsim {

/// Library version, with the git description of the build tree when known.
std::string version_string();

struct RunManifest {
  std::string config_path;  // echo of the parsed config
  std::string version;
  std::uint64_t seed = 0;
  std::string started;  // UTC, ISO 8601
  std::string finished;
  std::vector<std::string> outputs;  // CSV files
  std::string manifest_path;
};

/// Runs the experiment and writes into `out_dir` (created when missing):
/// outage.csv, sum_rate.csv, histogram_<snr>dB.csv per histogram point,
/// config.txt and manifest.txt. Files appear atomically; on failure every
/// file this run wrote is removed and the error is rethrown.
RunManifest run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                           int workers = 1);

}  // namespace mixsim
