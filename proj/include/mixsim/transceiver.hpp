// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------
//
// Beam design and achievable rates: inter-group zero-forcing, a common
// max-min beam per superposition/SIC group with fixed power split, and the
// ZF / MRT baselines. Noise variance is 1 throughout, so SNR equals P_t.

#pragma once

#include <limits>
#include <map>
#include <vector>

#include "mixsim/channel.hpp"
#include "mixsim/grouping.hpp"
#include "mixsim/rng.hpp"
#include "mixsim/types.hpp"

namespace mixsim {

/// c(L) = L for L <= 3 and 8 L^2 otherwise; c(1) = 1.
int c_constant(int group_size);

/// Power split of a group of `group_size` users for target rate `r_th` and
/// margin `c_margin` > 0. The first (strongest) user gets the smallest share.
std::vector<double> delta_solution(int group_size, double r_th, double c_margin);

/// High-SNR rate caps log2(1 + d_i / sum_{m<i} d_m); the first entry is +inf.
std::vector<double> saturation_caps(const std::vector<double>& deltas);

/// Throws InvalidInputError unless the entries are >= 0 and sum to 1.
void check_deltas(const std::vector<double>& deltas);

struct MaxMinOptions {
  int randomizations = 200;  // Gaussian roundings of sum_i v_i v_i^H
  int iterations = 500;      // projected subgradient steps per start
  double step = 0.1;         // step size step / sqrt(t)
  int polished_roundings = 4;  // best roundings refined besides the eigenvector

  bool operator==(const MaxMinOptions&) const = default;
};

struct MaxMinBeam {
  CVectorXd w;
  double achieved = 0.0;  // min_i |v_i^H w|^2
  bool certificate_ok = false;
};

/// min_i |v_i^H w|^2.
double min_gain(const std::vector<CVectorXd>& unit_channels, const CVectorXd& w);

/// Unit-norm beam approximately maximising min_i |v_i^H w|^2.
///
/// Starts from the principal eigenvector of sum_i v_i v_i^H and from Gaussian
/// roundings of that matrix, refines the most promising starts by projected
/// subgradient ascent and returns the best. Two channels are solved in closed
/// form. `certificate_ok` reports achieved >= 1 / c(L) - 1e-9.
MaxMinBeam maxmin_beam(const std::vector<CVectorXd>& unit_channels, RngStream& rng,
                       const MaxMinOptions& options = {});

/// SIC rates of one group sharing the beam w. `g` is ordered by descending
/// norm; message i is decoded by every receiver j <= i with the messages of
/// users m < i as interference.
std::vector<double> group_rates_exact(const std::vector<CVectorXd>& g, const CVectorXd& w,
                                      const std::vector<double>& deltas, double power);

/// Rate lower bounds from the channel norms alone (sorted descending).
/// A single user gets the exact MRT rate.
std::vector<double> prop1_lower_bounds(const std::vector<double>& norms2,
                                       const std::vector<double>& deltas, double power);

/// |h_k^H w_k|^2 for unit ZF beams w_k; 0 for a user whose channel lies in
/// the span of the others.
std::vector<double> zf_gains(const ChannelSet& channels);

/// log2(1 + (P_t / K) |h_k^H w_k|^2) per user.
std::vector<double> zf_baseline_rates(const ChannelSet& channels, double p_t);

/// (2^R - 1)^N / (2^N N! snr^N): high-SNR outage of single-user MRT.
double mrt_outage_closed_form(int antennas, double r_th, double snr);

/// Power split per group size. Sizes listed in `fixed` use those values,
/// everything else comes from delta_solution(L, r_th, c_margin).
struct DeltaPolicy {
  double r_th = 1.5;
  double c_margin = 2.0;
  std::map<int, std::vector<double>> fixed;

  std::vector<double> for_size(int group_size) const;
  void validate() const;

  bool operator==(const DeltaPolicy&) const = default;
};

/// One superposition/SIC stream: a shared beam, its share of P_t and the
/// users it carries in decoding order (strongest first).
struct StreamDesign {
  std::vector<int> members;
  CVectorXd w;
  std::vector<double> deltas;
  double power_fraction = 0.0;  // of P_t
  double achieved = 1.0;
  bool certificate_ok = true;
};

struct LinkDesign {
  int users = 0;
  std::vector<StreamDesign> streams;
};

/// Inter-group ZF plus a max-min common beam per group; group power is
/// |G_j| P_t / K. Uses grouping.effective for beams and decoding order
/// (descending effective norm, ties by user index).
LinkDesign design_mixture(const Grouping& grouping, const DeltaPolicy& policy, RngStream& rng,
                          const MaxMinOptions& options = {});

/// One ZF stream per user with power P_t / K, from the given channels.
LinkDesign design_zf(const ChannelSet& channels);

/// One MRT stream per user with power P_t / K.
LinkDesign design_mrt(const ChannelSet& channels);

/// Rates on the true channels `h` at total power p_t, counting leakage from
/// every other stream as noise.
std::vector<double> evaluate_rates(const LinkDesign& design, const CMatrixXd& h, double p_t);

struct RateReport {
  std::vector<double> achieved_rate;
  std::vector<double> lower_bound;
  std::vector<double> saturation_cap;
  bool certificate_ok = true;
};

/// Mixture rates of every user for a grouping built on `channels` (perfect
/// CSI), together with the norm-only lower bounds and saturation caps.
RateReport mixture_rates(const ChannelSet& channels, const Grouping& grouping, double p_t,
                         const DeltaPolicy& policy, RngStream& rng,
                         const MaxMinOptions& options = {});

}  // namespace mixsim
