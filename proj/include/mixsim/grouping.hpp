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

#include "mixsim/channel.hpp"
#include "mixsim/types.hpp"

namespace mixsim {

/// Largest K accepted by the exhaustive grouping search.
inline constexpr int kMaxExhaustiveUsers = 12;

enum class GroupingMethod { Algorithm1, Sus };

std::string to_string(GroupingMethod method);
GroupingMethod grouping_method_from_string(const std::string& name);

struct GroupingConfig {
  GroupingMethod method = GroupingMethod::Algorithm1;
  /// Alignment threshold of the exhaustive search, in (0, 1).
  double theta_th = 0.9;
  /// Hyperslab half-width and merge angle of the SUS variant, radians.
  double theta_tau1 = 0.25;
  double theta_tau2 = 0.55;

  void validate() const;

  bool operator==(const GroupingConfig&) const = default;
};

/// Partition of the users into groups, with the inter-group zero-forcing
/// projector of every group and the resulting effective channels.
struct Grouping {
  std::vector<std::vector<int>> groups;  // members ascending within a group
  std::vector<int> group_of;             // user -> group index
  CMatrixXd effective;                   // column u = Pi^(group_of[u]) h_u
  std::vector<CMatrixXd> zf_projectors;  // Pi^(j), N x N
  /// (1 - theta_th)^(N_g - 1) for the exhaustive search; 0 when the method
  /// gives no norm guarantee.
  double reduction_floor = 0.0;
  /// SUS seed users in selection order (empty for the exhaustive search).
  std::vector<int> seeds;

  int group_count() const { return static_cast<int>(groups.size()); }
};

/// Exhaustive adaptive grouping: for n = 1, 2, ... look for the first
/// (lexicographic) subset S of the remaining users with
/// theta(F_rest, F_S) <= theta_th on the current projected vectors; accept it,
/// project the remaining vectors off span(F_S) and keep the same n. When
/// nothing of size n exists, n grows. Refuses K > kMaxExhaustiveUsers.
Grouping group_algorithm1(const ChannelSet& channels, double theta_th);

/// SUS-based grouping: semi-orthogonal seeds chosen greedily by norm inside
/// intersecting hyperslabs, then each leftover user (by descending norm)
/// joins the group of its closest member, merging every group that comes
/// closer than theta_tau2 to it.
Grouping group_sus(const ChannelSet& channels, double theta_tau1, double theta_tau2);

Grouping group_users(const ChannelSet& channels, const GroupingConfig& config);

/// Every user in one group (no inter-group projection).
Grouping single_group(const ChannelSet& channels);

/// Fills group_of, zf_projectors and effective from `groups` using the
/// complement of all other groups' channels. Dependent channels in that
/// complement are dropped rather than rejected.
void complete_grouping(Grouping& grouping, const ChannelSet& channels);

/// True when `groups` are disjoint, nonempty and cover {0, ..., K-1}.
bool is_partition(const std::vector<std::vector<int>>& groups, int users);

/// Normalised correlation |a^H b| / (|a| |b|) clamped to [0, 1].
double channel_correlation(const CVectorXd& a, const CVectorXd& b);

struct NormFloorReport {
  double floor = 1.0;
  std::vector<double> ratio;    // |g_u|^2 / |h_u|^2 per user
  std::vector<int> violations;  // users with ratio < floor * (1 - slack)
  bool ok() const { return violations.empty(); }
};

/// Checks |g|^2 >= (1 - theta_th)^(N_g - 1) |h|^2 for every user.
NormFloorReport verify_norm_floor(const Grouping& grouping, const ChannelSet& channels,
                                  double slack = 1e-9);

}  // namespace mixsim
