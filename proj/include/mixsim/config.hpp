// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------
//
// Line-oriented experiment files:
//
//   # comment
//   antennas = 4
//   users = 4
//   schemes = mixture, zf
//   snr_db = 0:5:40          (lo:step:hi, or a comma list)
//   csi = perfect, fixed:0.1, power-scaled
//
//   [grouping]
//   method = algorithm1
//   theta_th = 0.9
//
//   [mixture]
//   r_th = 1.5
//   c_margin = 2
//   deltas.2 = 0.2, 0.8
//
// Keys inside a section are addressed as "section.key" (for example
// "grouping.theta_th"); unknown keys are errors.

#pragma once

#include <string>
#include <vector>

#include "mixsim/montecarlo.hpp"

namespace mixsim {

/// Names accepted by preset().
std::vector<std::string> preset_names();

/// Built-in experiment. Throws ConfigError for an unknown name.
ExperimentConfig preset(const std::string& name);

/// Sets one qualified key from its textual value.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// "lo:step:hi" (hi included) or "a, b, c".
std::vector<double> parse_snr_grid(const std::string& text);

/// Parses a whole file body onto `base`. Errors name the key and line.
ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base = {});
ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig base = {});

/// Text that parse_config_text() maps back to an equal config.
std::string serialize_config(const ExperimentConfig& config);

/// Shortest text that reads back to exactly `x`.
std::string format_double(double x);

}  // namespace mixsim
