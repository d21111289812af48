// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "mixsim/types.hpp"

namespace mixsim {

/// Counter-derived random stream. The state depends only on
/// (master seed, experiment id, trial index, salt), so a trial draws the same
/// numbers no matter which worker thread runs it.
class RngStream {
 public:
  static RngStream derive(std::uint64_t master_seed, std::uint64_t experiment_id,
                          std::uint64_t trial_index, std::uint64_t salt = 0);

  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  /// Circularly symmetric complex Gaussian with total variance `variance`
  /// (real and imaginary parts each variance / 2).
  cdouble complex_normal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// SplitMix64 finaliser; used to decorrelate the stream-derivation inputs.
std::uint64_t mix64(std::uint64_t x);

/// Stable 64-bit id for a textual experiment name (FNV-1a).
std::uint64_t experiment_id_from_name(const std::string& name);

}  // namespace mixsim
