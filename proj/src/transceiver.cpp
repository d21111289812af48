// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "mixsim/transceiver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mixsim/subspace.hpp"

namespace mixsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rate of message i at a receiver with gain `a` to the shared beam:
// log2(1 + d_i P a / (S P a + I + 1)), S = sum of the earlier shares.
double sic_sinr(double d_i, double s_before, double power, double a, double interference) {
  return d_i * power * a / (s_before * power * a + interference + 1.0);
}

// Decoding order: descending norm of `vecs`, ties by user index.
std::vector<int> order_members(const std::vector<int>& members, const CMatrixXd& vecs) {
  std::vector<int> out = members;
  std::sort(out.begin(), out.end());
  std::stable_sort(out.begin(), out.end(), [&](int a, int b) {
    return vecs.col(a).squaredNorm() > vecs.col(b).squaredNorm();
  });
  return out;
}

// The max-min search runs on beam coefficients y, w = V y, so only the Gram
// matrix G = V^H V enters: v_i^H w = (G y)_i and |w|^2 = y^H G y.
class CoefficientProblem {
 public:
  explicit CoefficientProblem(CMatrixXd gram) : gram_(std::move(gram)) {}

  double value(const CVectorXd& y) const {
    const CVectorXd gy = gram_ * y;
    const double n2 = std::real(y.dot(gy));
    if (!(n2 > 0.0)) {
      return 0.0;
    }
    return gy.cwiseAbs2().minCoeff() / n2;
  }

  bool normalize(CVectorXd& y) const {
    const double n2 = std::real(y.dot(gram_ * y));
    if (!(n2 > 0.0)) {
      return false;
    }
    y /= std::sqrt(n2);
    return true;
  }

  // Projected subgradient ascent on min_i |v_i^H w|^2 over the unit sphere.
  CVectorXd polish(CVectorXd y, const MaxMinOptions& options, double& best_value) const {
    if (!normalize(y)) {
      best_value = 0.0;
      return y;
    }
    CVectorXd best = y;
    best_value = value(y);
    for (int t = 1; t <= options.iterations; ++t) {
      const CVectorXd gy = gram_ * y;
      Eigen::Index worst = 0;
      gy.cwiseAbs2().minCoeff(&worst);
      // gradient of |v_i^H w|^2 w.r.t. conj(w) is v_i v_i^H w, i.e. e_i (G y)_i
      y(worst) += 2.0 * options.step / std::sqrt(static_cast<double>(t)) * gy(worst);
      if (!normalize(y)) {
        break;
      }
      const double v = value(y);
      if (v > best_value) {
        best_value = v;
        best = y;
      }
    }
    return best;
  }

 private:
  CMatrixXd gram_;
};

}  // namespace

int c_constant(int group_size) {
  if (group_size < 1) {
    throw InvalidInputError("c_constant: group size must be >= 1, got " +
                            std::to_string(group_size));
  }
  return group_size <= 3 ? group_size : 8 * group_size * group_size;
}

std::vector<double> delta_solution(int group_size, double r_th, double c_margin) {
  if (group_size < 1) {
    throw InvalidInputError("delta_solution: group size must be >= 1");
  }
  if (!(r_th >= 0.0) || !(c_margin > 0.0)) {
    throw InvalidInputError("delta_solution: need r_th >= 0 and c_margin > 0");
  }
  const double base = std::pow(2.0, r_th) + c_margin;
  std::vector<double> d(group_size);
  d[0] = std::pow(base, -(group_size - 1));
  for (int i = 2; i <= group_size; ++i) {
    d[i - 1] = (base - 1.0) * std::pow(base, -(group_size - i + 1));
  }
  return d;
}

std::vector<double> saturation_caps(const std::vector<double>& deltas) {
  std::vector<double> caps(deltas.size(), kInf);
  double before = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (i > 0 && before > 0.0) {
      caps[i] = std::log2(1.0 + deltas[i] / before);
    }
    before += deltas[i];
  }
  return caps;
}

void check_deltas(const std::vector<double>& deltas) {
  if (deltas.empty()) {
    throw InvalidInputError("power split is empty");
  }
  double sum = 0.0;
  for (double d : deltas) {
    if (!(d >= 0.0)) {
      throw InvalidInputError("power split entries must be >= 0");
    }
    sum += d;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidInputError("power split must sum to 1, got " + std::to_string(sum));
  }
}

double min_gain(const std::vector<CVectorXd>& unit_channels, const CVectorXd& w) {
  double m = kInf;
  for (const auto& v : unit_channels) {
    m = std::min(m, std::norm(v.dot(w)));
  }
  return m;
}

MaxMinBeam maxmin_beam(const std::vector<CVectorXd>& unit_channels, RngStream& rng,
                       const MaxMinOptions& options) {
  const int l = static_cast<int>(unit_channels.size());
  if (l < 1) {
    throw InvalidInputError("maxmin_beam: need at least one channel");
  }
  const Eigen::Index n = unit_channels.front().size();
  CMatrixXd v(n, l);
  for (int i = 0; i < l; ++i) {
    const auto& c = unit_channels[i];
    if (c.size() != n || std::abs(c.norm() - 1.0) > 1e-10) {
      throw InvalidInputError("maxmin_beam: channel " + std::to_string(i) +
                              " is not a unit vector of the common dimension");
    }
    v.col(i) = c;
  }

  MaxMinBeam out;
  const double floor = 1.0 / c_constant(l) - 1e-9;
  if (l == 1) {
    out.w = v.col(0);
    out.achieved = 1.0;
    out.certificate_ok = true;
    return out;
  }

  const CMatrixXd gram = v.adjoint() * v;
  const CoefficientProblem problem(gram);
  CVectorXd y_best;

  if (l == 2) {
    // y = (1, e^{-j arg rho}), rho = v1^H v2, equalises both gains at
    // (1 + |rho|) / 2, which is optimal for two channels.
    const cdouble rho = gram(0, 1);
    y_best = CVectorXd(2);
    y_best << 1.0, std::abs(rho) > 0.0 ? std::conj(rho) / std::abs(rho) : cdouble(1.0);
    problem.normalize(y_best);
  } else {
    // Roundings z ~ CN(0, I), w = V z have covariance sum_i v_i v_i^H.
    std::vector<std::pair<double, CVectorXd>> starts;
    starts.reserve(options.randomizations);
    for (int m = 0; m < options.randomizations; ++m) {
      CVectorXd z(l);
      for (int i = 0; i < l; ++i) {
        z(i) = rng.complex_normal(1.0);
      }
      starts.emplace_back(problem.value(z), std::move(z));
    }
    const auto keep = static_cast<std::size_t>(
        std::clamp(options.polished_roundings, 0, options.randomizations));
    std::partial_sort(starts.begin(), starts.begin() + static_cast<std::ptrdiff_t>(keep),
                      starts.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });

    Eigen::SelfAdjointEigenSolver<CMatrixXd> eig(gram);
    double best_value = 0.0;
    y_best = problem.polish(eig.eigenvectors().col(l - 1), options, best_value);
    for (std::size_t s = 0; s < starts.size(); ++s) {
      double value = starts[s].first;
      CVectorXd y = starts[s].second;
      if (s < keep) {
        y = problem.polish(y, options, value);
      } else if (!problem.normalize(y)) {
        continue;
      }
      if (value > best_value) {
        best_value = value;
        y_best = y;
      }
    }
  }

  out.w = v * y_best;
  out.w.normalize();
  out.achieved = min_gain(unit_channels, out.w);
  out.certificate_ok = out.achieved >= floor;
  return out;
}

std::vector<double> group_rates_exact(const std::vector<CVectorXd>& g, const CVectorXd& w,
                                      const std::vector<double>& deltas, double power) {
  if (g.size() != deltas.size() || g.empty()) {
    throw InvalidInputError("group_rates_exact: need one power share per channel");
  }
  if (w.squaredNorm() > 1.0 + 1e-12) {
    throw InvalidInputError("group_rates_exact: beam norm exceeds 1");
  }
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (g[i].squaredNorm() > g[i - 1].squaredNorm() * (1.0 + 1e-12)) {
      throw InvalidInputError("group_rates_exact: channels must be sorted by descending norm");
    }
  }
  std::vector<double> a(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    a[j] = std::norm(g[j].dot(w));
  }
  std::vector<double> rates(g.size());
  double before = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double sinr = kInf;
    for (std::size_t j = 0; j <= i; ++j) {
      sinr = std::min(sinr, sic_sinr(deltas[i], before, power, a[j], 0.0));
    }
    rates[i] = std::log2(1.0 + sinr);
    before += deltas[i];
  }
  return rates;
}

std::vector<double> prop1_lower_bounds(const std::vector<double>& norms2,
                                       const std::vector<double>& deltas, double power) {
  if (norms2.size() != deltas.size() || norms2.empty()) {
    throw InvalidInputError("prop1_lower_bounds: need one power share per channel");
  }
  for (std::size_t i = 1; i < norms2.size(); ++i) {
    if (norms2[i] > norms2[i - 1] * (1.0 + 1e-12)) {
      throw InvalidInputError("prop1_lower_bounds: norms must be sorted descending");
    }
  }
  const int l = static_cast<int>(norms2.size());
  const double c = c_constant(l);
  std::vector<double> bounds(norms2.size());
  double before = 0.0;
  for (int i = 0; i < l; ++i) {
    const double x = norms2[i] * power / c;
    bounds[i] = std::log2(1.0 + deltas[i] * x / (before * x + 1.0));
    before += deltas[i];
  }
  return bounds;
}

std::vector<double> zf_gains(const ChannelSet& channels) {
  const int k = channels.users();
  std::vector<double> gains(k, 0.0);
  for (int u = 0; u < k; ++u) {
    CMatrixXd others(channels.antennas(), k - 1);
    for (int j = 0, c = 0; j < k; ++j) {
      if (j != u) {
        others.col(c++) = channels.h.col(j);
      }
    }
    const CMatrixXd q = orthonormal_basis(others, /*strict=*/false);
    const CVectorXd r = residual_from_basis(q, channels.h.col(u));
    if (r.norm() > kRankTolerance * channels.h.col(u).norm()) {
      gains[u] = r.squaredNorm();
    }
  }
  return gains;
}

std::vector<double> zf_baseline_rates(const ChannelSet& channels, double p_t) {
  std::vector<double> rates = zf_gains(channels);
  const double per_user = p_t / channels.users();
  for (double& r : rates) {
    r = std::log2(1.0 + per_user * r);
  }
  return rates;
}

double mrt_outage_closed_form(int antennas, double r_th, double snr) {
  if (antennas < 1 || !(snr > 0.0)) {
    throw InvalidInputError("mrt_outage_closed_form: need N >= 1 and snr > 0");
  }
  const double x = (std::pow(2.0, r_th) - 1.0) / (2.0 * snr);
  return std::pow(x, antennas) / std::tgamma(antennas + 1.0);
}

std::vector<double> DeltaPolicy::for_size(int group_size) const {
  if (auto it = fixed.find(group_size); it != fixed.end()) {
    return it->second;
  }
  if (group_size == 1) {
    return {1.0};
  }
  return delta_solution(group_size, r_th, c_margin);
}

void DeltaPolicy::validate() const {
  if (!(r_th >= 0.0) || !std::isfinite(r_th)) {
    throw ConfigError("r_th must be a finite value >= 0");
  }
  if (!(c_margin > 0.0) || !std::isfinite(c_margin)) {
    throw ConfigError("c_margin must be a finite value > 0");
  }
  for (const auto& [size, d] : fixed) {
    if (static_cast<int>(d.size()) != size) {
      throw ConfigError("deltas." + std::to_string(size) + " must list " +
                        std::to_string(size) + " values");
    }
    try {
      check_deltas(d);
    } catch (const InvalidInputError& e) {
      throw ConfigError("deltas." + std::to_string(size) + ": " + e.what());
    }
  }
}

LinkDesign design_mixture(const Grouping& grouping, const DeltaPolicy& policy, RngStream& rng,
                          const MaxMinOptions& options) {
  LinkDesign design;
  design.users = static_cast<int>(grouping.group_of.size());
  const CMatrixXd& g = grouping.effective;
  for (const auto& group : grouping.groups) {
    StreamDesign s;
    s.members = order_members(group, g);
    const int l = static_cast<int>(group.size());
    s.deltas = policy.for_size(l);
    s.power_fraction = static_cast<double>(l) / design.users;

    std::vector<CVectorXd> unit;
    for (int u : s.members) {
      const double nrm = g.col(u).norm();
      if (nrm > 0.0) {
        unit.push_back(g.col(u) / nrm);
      }
    }
    if (unit.empty()) {
      s.w = CVectorXd::Zero(g.rows());
      s.achieved = 0.0;
      s.certificate_ok = false;
    } else {
      MaxMinBeam beam = maxmin_beam(unit, rng, options);
      s.w = std::move(beam.w);
      s.achieved = beam.achieved;
      s.certificate_ok = beam.certificate_ok && static_cast<int>(unit.size()) == l;
    }
    design.streams.push_back(std::move(s));
  }
  return design;
}

namespace {

LinkDesign per_user_streams(const ChannelSet& channels, const std::vector<CVectorXd>& beams) {
  LinkDesign design;
  design.users = channels.users();
  for (int u = 0; u < channels.users(); ++u) {
    StreamDesign s;
    s.members = {u};
    s.w = beams[u];
    s.deltas = {1.0};
    s.power_fraction = 1.0 / channels.users();
    design.streams.push_back(std::move(s));
  }
  return design;
}

}  // namespace

LinkDesign design_zf(const ChannelSet& channels) {
  const int k = channels.users();
  std::vector<CVectorXd> beams;
  for (int u = 0; u < k; ++u) {
    CMatrixXd others(channels.antennas(), k - 1);
    for (int j = 0, c = 0; j < k; ++j) {
      if (j != u) {
        others.col(c++) = channels.h.col(j);
      }
    }
    const CMatrixXd q = orthonormal_basis(others, /*strict=*/false);
    CVectorXd r = residual_from_basis(q, channels.h.col(u));
    if (r.norm() > kRankTolerance * channels.h.col(u).norm()) {
      r.normalize();
    } else {
      r.setZero();
    }
    beams.push_back(std::move(r));
  }
  return per_user_streams(channels, beams);
}

LinkDesign design_mrt(const ChannelSet& channels) {
  std::vector<CVectorXd> beams;
  for (int u = 0; u < channels.users(); ++u) {
    const double nrm = channels.h.col(u).norm();
    beams.push_back(nrm > 0.0 ? CVectorXd(channels.h.col(u) / nrm)
                              : CVectorXd::Zero(channels.antennas()));
  }
  return per_user_streams(channels, beams);
}

std::vector<double> evaluate_rates(const LinkDesign& design, const CMatrixXd& h, double p_t) {
  const int k = static_cast<int>(h.cols());
  if (k != design.users) {
    throw InvalidInputError("evaluate_rates: design and channel sizes differ");
  }
  const std::size_t n_streams = design.streams.size();
  // gain(s, u) = |h_u^H w_s|^2
  Eigen::MatrixXd gain(static_cast<Eigen::Index>(n_streams), k);
  Eigen::VectorXd power(static_cast<Eigen::Index>(n_streams));
  for (std::size_t s = 0; s < n_streams; ++s) {
    const auto& st = design.streams[s];
    gain.row(static_cast<Eigen::Index>(s)) = (h.adjoint() * st.w).cwiseAbs2().transpose();
    power(static_cast<Eigen::Index>(s)) = p_t * st.power_fraction;
  }

  std::vector<double> rates(k, 0.0);
  for (std::size_t s = 0; s < n_streams; ++s) {
    const auto& st = design.streams[s];
    const double p = power(static_cast<Eigen::Index>(s));
    double before = 0.0;
    for (std::size_t i = 0; i < st.members.size(); ++i) {
      double sinr = kInf;
      for (std::size_t j = 0; j <= i; ++j) {
        const int r = st.members[j];
        const double a = gain(static_cast<Eigen::Index>(s), r);
        double leak = 0.0;
        for (std::size_t o = 0; o < n_streams; ++o) {
          if (o != s) {
            leak += power(static_cast<Eigen::Index>(o)) * gain(static_cast<Eigen::Index>(o), r);
          }
        }
        sinr = std::min(sinr, sic_sinr(st.deltas[i], before, p, a, leak));
      }
      rates[st.members[i]] = std::log2(1.0 + sinr);
      before += st.deltas[i];
    }
  }
  return rates;
}

RateReport mixture_rates(const ChannelSet& channels, const Grouping& grouping, double p_t,
                         const DeltaPolicy& policy, RngStream& rng,
                         const MaxMinOptions& options) {
  const LinkDesign design = design_mixture(grouping, policy, rng, options);
  const int k = channels.users();
  RateReport report;
  report.achieved_rate.assign(k, 0.0);
  report.lower_bound.assign(k, 0.0);
  report.saturation_cap.assign(k, kInf);
  for (const auto& st : design.streams) {
    std::vector<CVectorXd> g;
    std::vector<double> norms2;
    for (int u : st.members) {
      g.push_back(grouping.effective.col(u));
      norms2.push_back(g.back().squaredNorm());
    }
    const double power = p_t * st.power_fraction;
    const auto rates = group_rates_exact(g, st.w, st.deltas, power);
    const auto bounds = prop1_lower_bounds(norms2, st.deltas, power);
    const auto caps = saturation_caps(st.deltas);
    for (std::size_t i = 0; i < st.members.size(); ++i) {
      report.achieved_rate[st.members[i]] = rates[i];
      report.lower_bound[st.members[i]] = bounds[i];
      report.saturation_cap[st.members[i]] = caps[i];
    }
    report.certificate_ok = report.certificate_ok && st.certificate_ok;
  }
  return report;
}

}  // namespace mixsim
