// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "mixsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mixsim {

std::vector<int> order_by_norm(const CMatrixXd& h) {
  const int k = static_cast<int>(h.cols());
  std::vector<double> n2(k);
  for (int u = 0; u < k; ++u) {
    n2[u] = h.col(u).squaredNorm();
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return n2[a] > n2[b]; });
  return order;
}

ChannelSet ChannelSet::from_matrix(CMatrixXd h) {
  if (h.rows() < 1 || h.cols() < 1) {
    throw ConfigError("ChannelSet: need N >= 1 and K >= 1");
  }
  if (h.cols() > h.rows()) {
    throw ConfigError("ChannelSet: K = " + std::to_string(h.cols()) +
                      " exceeds N = " + std::to_string(h.rows()));
  }
  if (!h.allFinite()) {
    throw InvalidInputError("ChannelSet: non-finite channel entry");
  }
  ChannelSet set;
  set.ordering = order_by_norm(h);
  set.h = std::move(h);
  return set;
}

std::vector<int> ChannelSet::rank_of() const {
  std::vector<int> rank(ordering.size());
  for (std::size_t r = 0; r < ordering.size(); ++r) {
    rank[ordering[r]] = static_cast<int>(r);
  }
  return rank;
}

double CsiModel::error_variance(double p_t) const {
  switch (mode) {
    case CsiMode::Perfect:
      return 0.0;
    case CsiMode::FixedError:
      return sigma_e2;
    case CsiMode::PowerScaledError:
      return 1.0 / (1.0 + p_t);
  }
  return 0.0;
}

void CsiModel::validate() const {
  if (!(sigma_e2 >= 0.0) || !std::isfinite(sigma_e2)) {
    throw ConfigError("csi: sigma_e2 must be a finite value >= 0");
  }
  if (mode == CsiMode::Perfect && sigma_e2 != 0.0) {
    throw ConfigError("csi: perfect mode requires sigma_e2 = 0");
  }
}

std::string to_string(CsiMode mode) {
  switch (mode) {
    case CsiMode::Perfect:
      return "perfect";
    case CsiMode::FixedError:
      return "fixed";
    case CsiMode::PowerScaledError:
      return "power-scaled";
  }
  return "perfect";
}

CsiMode csi_mode_from_string(const std::string& name) {
  if (name == "perfect") return CsiMode::Perfect;
  if (name == "fixed") return CsiMode::FixedError;
  if (name == "power-scaled") return CsiMode::PowerScaledError;
  throw ConfigError("csi: unknown mode '" + name + "' (perfect | fixed | power-scaled)");
}

ChannelSet sample_channels(int antennas, int users, RngStream& rng) {
  if (antennas < 1 || users < 1 || users > antennas) {
    throw ConfigError("sample_channels: need 1 <= K <= N, got N = " + std::to_string(antennas) +
                      ", K = " + std::to_string(users));
  }
  CMatrixXd h(antennas, users);
  for (int k = 0; k < users; ++k) {
    for (int n = 0; n < antennas; ++n) {
      h(n, k) = rng.complex_normal(2.0);
    }
  }
  ChannelSet set;
  set.ordering = order_by_norm(h);
  set.h = std::move(h);
  return set;
}

CMatrixXd sample_unit_error(int antennas, int users, RngStream& rng) {
  CMatrixXd e(antennas, users);
  for (int k = 0; k < users; ++k) {
    for (int n = 0; n < antennas; ++n) {
      e(n, k) = rng.complex_normal(1.0);
    }
  }
  return e;
}

ChannelSet apply_csi_error(const ChannelSet& channels, const CMatrixXd& unit_error,
                           double variance) {
  if (variance == 0.0) {
    return channels;
  }
  ChannelSet est;
  est.h = channels.h + std::sqrt(variance) * unit_error;
  est.ordering = order_by_norm(est.h);
  return est;
}

ChannelSet corrupt_csi(const ChannelSet& channels, const CsiModel& model, double p_t,
                       RngStream& rng) {
  model.validate();
  if (model.mode == CsiMode::Perfect) {
    return channels;
  }
  const CMatrixXd e = sample_unit_error(channels.antennas(), channels.users(), rng);
  return apply_csi_error(channels, e, model.error_variance(p_t));
}

}  // namespace mixsim
