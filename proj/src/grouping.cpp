// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "mixsim/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "mixsim/subspace.hpp"

namespace mixsim {

namespace {

CMatrixXd gather(const CMatrixXd& f, const std::vector<int>& users) {
  CMatrixXd out(f.rows(), static_cast<Eigen::Index>(users.size()));
  for (std::size_t i = 0; i < users.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = f.col(users[i]);
  }
  return out;
}

// Channels of every user outside group j (the matrix H~_j).
CMatrixXd others_of(const Grouping& g, const ChannelSet& channels, std::size_t j) {
  std::vector<int> others;
  for (std::size_t i = 0; i < g.groups.size(); ++i) {
    if (i != j) {
      others.insert(others.end(), g.groups[i].begin(), g.groups[i].end());
    }
  }
  return gather(channels.h, others);
}

void fill_projectors(Grouping& g, const ChannelSet& channels, bool compute_effective) {
  const int n = channels.antennas();
  g.group_of.assign(channels.users(), -1);
  g.zf_projectors.clear();
  if (compute_effective) {
    g.effective = CMatrixXd::Zero(n, channels.users());
  }
  for (std::size_t j = 0; j < g.groups.size(); ++j) {
    const CMatrixXd q = orthonormal_basis(others_of(g, channels, j), /*strict=*/false);
    CMatrixXd p = CMatrixXd::Identity(n, n);
    if (q.cols() > 0) {
      p.noalias() -= q * q.adjoint();
    }
    for (int u : g.groups[j]) {
      g.group_of[u] = static_cast<int>(j);
      if (compute_effective) {
        g.effective.col(u) = residual_from_basis(q, channels.h.col(u));
      }
    }
    g.zf_projectors.push_back(std::move(p));
  }
}

// Advances `idx` (sorted positions into a pool of size n) to the next
// lexicographic k-combination. Returns false after the last one.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) {
    --i;
  }
  if (i < 0) {
    return false;
  }
  ++idx[i];
  for (int j = i + 1; j < k; ++j) {
    idx[j] = idx[j - 1] + 1;
  }
  return true;
}

}  // namespace

std::string to_string(GroupingMethod method) {
  return method == GroupingMethod::Sus ? "sus" : "algorithm1";
}

GroupingMethod grouping_method_from_string(const std::string& name) {
  if (name == "algorithm1") return GroupingMethod::Algorithm1;
  if (name == "sus") return GroupingMethod::Sus;
  throw ConfigError("grouping: unknown method '" + name + "' (algorithm1 | sus)");
}

void GroupingConfig::validate() const {
  if (method == GroupingMethod::Algorithm1) {
    if (!(theta_th > 0.0 && theta_th < 1.0)) {
      throw ConfigError("theta_th must lie in (0, 1)");
    }
    return;
  }
  const double half_pi = std::numbers::pi / 2.0;
  if (!(theta_tau1 > 0.0 && theta_tau1 < half_pi) || !(theta_tau2 > 0.0 && theta_tau2 < half_pi)) {
    throw ConfigError("theta_tau1 and theta_tau2 must lie in (0, pi/2)");
  }
  if (!(theta_tau2 < half_pi - theta_tau1)) {
    throw ConfigError("theta_tau2 must be below pi/2 - theta_tau1");
  }
}

double channel_correlation(const CVectorXd& a, const CVectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) {
    return 0.0;
  }
  return std::min(1.0, std::abs(a.dot(b)) / (na * nb));
}

bool is_partition(const std::vector<std::vector<int>>& groups, int users) {
  std::vector<int> seen(users, 0);
  for (const auto& g : groups) {
    if (g.empty()) {
      return false;
    }
    for (int u : g) {
      if (u < 0 || u >= users || seen[u]++) {
        return false;
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

void complete_grouping(Grouping& grouping, const ChannelSet& channels) {
  fill_projectors(grouping, channels, /*compute_effective=*/true);
}

Grouping group_algorithm1(const ChannelSet& channels, double theta_th) {
  const int k_users = channels.users();
  if (k_users > kMaxExhaustiveUsers) {
    throw ConfigError("group_algorithm1: K = " + std::to_string(k_users) +
                      " is above the exhaustive-search cap of " +
                      std::to_string(kMaxExhaustiveUsers) + "; use the sus grouping");
  }
  if (!(theta_th > 0.0 && theta_th < 1.0)) {
    throw ConfigError("group_algorithm1: theta_th must lie in (0, 1)");
  }

  Grouping out;
  out.effective = CMatrixXd::Zero(channels.antennas(), k_users);
  CMatrixXd f = channels.h;  // current (projected) vectors
  std::vector<int> candidates(k_users);
  std::iota(candidates.begin(), candidates.end(), 0);

  int group_size = 1;
  while (!candidates.empty()) {
    const int pool = static_cast<int>(candidates.size());
    // Fewer users left than the current size: they can only form one group.
    group_size = std::min(group_size, pool);
    bool found = false;
    std::vector<int> chosen;
    std::vector<int> rest;
    {
      std::vector<int> idx(group_size);
      std::iota(idx.begin(), idx.end(), 0);
      do {
        chosen.clear();
        rest.clear();
        for (int p = 0, c = 0; p < pool; ++p) {
          if (c < group_size && idx[c] == p) {
            chosen.push_back(candidates[p]);
            ++c;
          } else {
            rest.push_back(candidates[p]);
          }
        }
        if (theta(gather(f, rest), gather(f, chosen)) <= theta_th) {
          found = true;
          break;
        }
      } while (next_combination(idx, pool));
    }
    if (!found) {
      ++group_size;
      continue;
    }

    const CMatrixXd q_rest = orthonormal_basis(gather(f, rest), /*strict=*/false);
    for (int u : chosen) {
      out.effective.col(u) = residual_from_basis(q_rest, f.col(u));
    }
    const CMatrixXd q_chosen = orthonormal_basis(gather(f, chosen), /*strict=*/false);
    for (int u : rest) {
      f.col(u) = residual_from_basis(q_chosen, f.col(u));
    }
    out.groups.push_back(chosen);
    candidates = rest;
  }

  fill_projectors(out, channels, /*compute_effective=*/false);
  out.reduction_floor = std::pow(1.0 - theta_th, out.group_count() - 1);
  return out;
}

Grouping group_sus(const ChannelSet& channels, double theta_tau1, double theta_tau2) {
  GroupingConfig cfg;
  cfg.method = GroupingMethod::Sus;
  cfg.theta_tau1 = theta_tau1;
  cfg.theta_tau2 = theta_tau2;
  cfg.validate();

  const int k_users = channels.users();
  const double gamma = std::cos(std::numbers::pi / 2.0 - theta_tau1);
  const auto& h = channels.h;

  // Phase 1: semi-orthogonal seeds.
  Grouping out;
  std::vector<int> eligible = channels.ordering;  // descending norm
  while (!eligible.empty() && static_cast<int>(out.seeds.size()) < k_users) {
    const int s = eligible.front();
    out.seeds.push_back(s);
    std::vector<int> next;
    for (int u : eligible) {
      if (u != s && channel_correlation(h.col(s), h.col(u)) <= gamma) {
        next.push_back(u);
      }
    }
    eligible = std::move(next);
  }
  for (int s : out.seeds) {
    out.groups.push_back({s});
  }

  // Phase 2: attach the leftovers, strongest first.
  std::vector<char> seeded(k_users, 0);
  for (int s : out.seeds) {
    seeded[s] = 1;
  }
  for (int u : channels.ordering) {
    if (seeded[u]) {
      continue;
    }
    const std::size_t n_groups = out.groups.size();
    std::vector<double> closest(n_groups, std::numbers::pi / 2.0);
    std::size_t target = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n_groups; ++j) {
      for (int m : out.groups[j]) {
        const double angle = std::acos(channel_correlation(h.col(u), h.col(m)));
        closest[j] = std::min(closest[j], angle);
        if (angle < best) {
          best = angle;
          target = j;
        }
      }
    }
    std::vector<int> merged{u};
    std::vector<std::vector<int>> kept;
    std::size_t insert_at = n_groups;
    for (std::size_t j = 0; j < n_groups; ++j) {
      if (j == target || closest[j] < theta_tau2) {
        merged.insert(merged.end(), out.groups[j].begin(), out.groups[j].end());
        insert_at = std::min(insert_at, kept.size());
      } else {
        kept.push_back(std::move(out.groups[j]));
      }
    }
    std::sort(merged.begin(), merged.end());
    kept.insert(kept.begin() + static_cast<std::ptrdiff_t>(insert_at), std::move(merged));
    out.groups = std::move(kept);
  }

  fill_projectors(out, channels, /*compute_effective=*/true);
  out.reduction_floor = 0.0;
  return out;
}

Grouping group_users(const ChannelSet& channels, const GroupingConfig& config) {
  config.validate();
  if (config.method == GroupingMethod::Sus) {
    return group_sus(channels, config.theta_tau1, config.theta_tau2);
  }
  return group_algorithm1(channels, config.theta_th);
}

Grouping single_group(const ChannelSet& channels) {
  Grouping out;
  std::vector<int> all(channels.users());
  std::iota(all.begin(), all.end(), 0);
  out.groups.push_back(std::move(all));
  fill_projectors(out, channels, /*compute_effective=*/true);
  out.reduction_floor = 1.0;
  return out;
}

NormFloorReport verify_norm_floor(const Grouping& grouping, const ChannelSet& channels,
                                  double slack) {
  NormFloorReport report;
  report.floor = grouping.reduction_floor;
  report.ratio.resize(channels.users());
  for (int u = 0; u < channels.users(); ++u) {
    const double h2 = channels.norm2(u);
    const double g2 = grouping.effective.col(u).squaredNorm();
    report.ratio[u] = h2 > 0.0 ? g2 / h2 : 1.0;
    if (report.ratio[u] < report.floor * (1.0 - slack)) {
      report.violations.push_back(u);
    }
  }
  return report;
}

}  // namespace mixsim
