// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------
//
// Monte Carlo engine: outage per channel-norm rank, overall outage, average
// sum rate and pooled rate histograms over an SNR grid.
//
// Every trial draws from its own stream derived from (seed, experiment,
// trial), trials are grouped in fixed blocks and the block results are
// reduced in block order, so results do not depend on the worker count.
// All schemes and CSI models of one run see the same channel draws.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixsim/channel.hpp"
#include "mixsim/grouping.hpp"
#include "mixsim/transceiver.hpp"

namespace mixsim {

enum class Scheme { Mixture, Zf, Mrt, SingleGroup };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct ExperimentConfig {
  std::string name = "custom";
  int antennas = 4;
  int users = 4;
  std::vector<Scheme> schemes{Scheme::Mixture};
  GroupingConfig grouping;
  DeltaPolicy deltas;  // r_th, c_margin and fixed splits
  MaxMinOptions maxmin;
  std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0};
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  std::vector<CsiModel> csi{CsiModel::perfect()};
  /// SNR points (dB, must be on the grid) at which rate histograms are kept.
  std::vector<double> histogram_snr_db;
  double histogram_bin = 0.05;
  double histogram_max = 40.0;

  double r_th() const { return deltas.r_th; }
  /// Throws ConfigError describing the first offending field.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval at 95 %.
Interval wilson_interval(std::int64_t events, std::int64_t trials);

/// Outage counts of one (scheme, csi) pair. events[p][r] counts trials at
/// grid point p in which the user of channel-norm rank r (0 = strongest) is
/// below R_th; index `users` holds the overall count (any user below R_th).
struct OutageCurve {
  Scheme scheme = Scheme::Mixture;
  CsiModel csi;
  int users = 0;
  std::vector<double> snr_db;
  std::vector<std::vector<std::int64_t>> events;
  std::int64_t trials = 0;

  int overall() const { return users; }
  double estimate(std::size_t point, int rank) const;
  Interval interval(std::size_t point, int rank) const;
};

struct SumRateCurve {
  std::vector<double> snr_db;
  std::vector<double> mean;
  std::vector<double> std_error;
};

struct RateHistogram {
  double snr_db = 0.0;
  double bin_width = 0.05;
  std::vector<std::int64_t> counts;  // bin b covers [b w, (b + 1) w); last bin open
  std::int64_t total = 0;
  std::int64_t below_target = 0;     // rates < R_th
  std::int64_t near_cap = 0;         // finite-cap users within [cap - 0.1, cap]
  std::int64_t capped = 0;           // users with a finite cap

  double mass_below_target() const;
  double mass_near_cap() const;
};

struct SchemeResult {
  OutageCurve outage;
  SumRateCurve sum_rate;
  std::vector<RateHistogram> histograms;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SchemeResult> results;  // scheme-major, then csi model

  const SchemeResult& find(Scheme scheme, std::size_t csi_index = 0) const;
};

/// Number of trials per reduction block.
inline constexpr std::int64_t kBlockTrials = 4096;

ExperimentResult run_experiment_mc(const ExperimentConfig& config, int workers = 1);

/// Outage curve of the first scheme / csi model.
OutageCurve estimate_outage(const ExperimentConfig& config, int workers = 1);

SumRateCurve avg_sum_rate(const ExperimentConfig& config, int workers = 1);

RateHistogram rate_histogram(ExperimentConfig config, double snr_db, int workers = 1);

/// Paired curves of the first scheme under fixed-variance and power-scaled
/// CSI error, on the same channel and error draws.
std::pair<OutageCurve, OutageCurve> csi_floor_study(ExperimentConfig config, double sigma_e2,
                                                    int workers = 1);

struct SlopeRange {
  double lo = 1e-5;
  double hi = 1e-1;
  std::int64_t min_events = 50;
};

/// Least-squares slope of -log10(outage) against log10(P_t) over the grid
/// points whose estimate lies in the range and that saw at least
/// `min_events` outages. Throws InsufficientDataError below 3 points.
double fit_slope(const OutageCurve& curve, int rank, const SlopeRange& range = {});

/// Least-squares slope of y against x.
double linear_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mixsim
