// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include <string>
#include <vector>

#include "mixsim/rng.hpp"
#include "mixsim/types.hpp"

namespace mixsim {

/// K channel vectors h_k in C^N (column k of `h`) plus the norm ordering.
struct ChannelSet {
  CMatrixXd h;
  /// ordering[r] is the user with the (r+1)-th largest |h|^2; ties keep the
  /// lower user index first.
  std::vector<int> ordering;

  /// Validates K <= N and finite entries, then computes the ordering.
  static ChannelSet from_matrix(CMatrixXd h);

  int antennas() const { return static_cast<int>(h.rows()); }
  int users() const { return static_cast<int>(h.cols()); }
  double norm2(int user) const { return h.col(user).squaredNorm(); }

  /// Inverse of `ordering`: rank_of()[user] = rank (0 = strongest).
  std::vector<int> rank_of() const;
};

/// Norm ordering of the columns of `h`, descending, ties by index.
std::vector<int> order_by_norm(const CMatrixXd& h);

enum class CsiMode { Perfect, FixedError, PowerScaledError };

/// Transmitter-side CSI quality. The estimate is H + E with i.i.d.
/// CN(0, sigma_e^2) entries in E.
struct CsiModel {
  CsiMode mode = CsiMode::Perfect;
  double sigma_e2 = 0.0;

  static CsiModel perfect() { return {}; }
  static CsiModel fixed(double sigma_e2) { return {CsiMode::FixedError, sigma_e2}; }
  static CsiModel power_scaled() { return {CsiMode::PowerScaledError, 0.0}; }

  /// Error variance at total transmit power p_t (1 / (1 + p_t) when power scaled).
  double error_variance(double p_t) const;
  /// True when the error variance does not change with p_t.
  bool power_independent() const { return mode != CsiMode::PowerScaledError; }
  void validate() const;

  bool operator==(const CsiModel&) const = default;
};

std::string to_string(CsiMode mode);
CsiMode csi_mode_from_string(const std::string& name);

/// i.i.d. Rayleigh channels: real and imaginary parts N(0, 1) per entry, so
/// |h|^2 is chi-square with 2N degrees of freedom.
ChannelSet sample_channels(int antennas, int users, RngStream& rng);

/// N x K matrix of unit-variance CN(0, 1) entries; scaled by sqrt(sigma_e^2)
/// it becomes a CSI error draw. Lets several error levels share one draw.
CMatrixXd sample_unit_error(int antennas, int users, RngStream& rng);

/// H + sqrt(variance) * unit_error. Zero variance returns `channels` unchanged.
ChannelSet apply_csi_error(const ChannelSet& channels, const CMatrixXd& unit_error,
                           double variance);

/// Estimated channels under `model` at transmit power p_t.
ChannelSet corrupt_csi(const ChannelSet& channels, const CsiModel& model, double p_t,
                       RngStream& rng);

}  // namespace mixsim
