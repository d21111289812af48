// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mixsim/distributions.hpp"
#include "mixsim/grouping.hpp"
#include "mixsim/transceiver.hpp"
#include "support.hpp"

using namespace mixsim;
using namespace testing_support;

namespace {

// Dense search over unit vectors of C^2, w = (cos a, e^{jb} sin a), followed
// by a shrinking coordinate search around the best grid point.
double oracle_maxmin_c2(const std::vector<CVectorXd>& v) {
  auto value = [&](double a, double b) {
    CVectorXd w(2);
    w << std::cos(a), std::polar(std::sin(a), b);
    return min_gain(v, w);
  };
  const int na = 100, nb = 400;
  double best = -1.0, ba = 0.0, bb = 0.0;
  for (int i = 0; i <= na; ++i) {
    for (int j = 0; j < nb; ++j) {
      const double a = i * (std::numbers::pi / 2.0) / na;
      const double b = j * 2.0 * std::numbers::pi / nb;
      const double f = value(a, b);
      if (f > best) {
        best = f;
        ba = a;
        bb = b;
      }
    }
  }
  // Pattern search with rotating directions; the objective has ridges along
  // which axis-aligned moves alone stall.
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  for (double step = 0.01; step > 1e-10; step *= 0.7) {
    for (int k = 0; k < 32; ++k) {
      const double phi = ang(gen);
      const double da = step * std::cos(phi), db = step * std::sin(phi);
      for (int sign : {1, -1}) {
        double f;
        while ((f = value(ba + sign * da, bb + sign * db)) > best) {
          best = f;
          ba += sign * da;
          bb += sign * db;
        }
      }
    }
  }
  return best;
}

std::vector<CVectorXd> random_units(int l, int n, std::mt19937_64& gen) {
  std::vector<CVectorXd> v;
  for (int i = 0; i < l; ++i) v.push_back(random_unit(n, gen));
  return v;
}

CMatrixXd random_unitary(int n, std::mt19937_64& gen) {
  Eigen::HouseholderQR<CMatrixXd> qr(random_cmatrix(n, n, gen));
  return qr.householderQ();
}

}  // namespace

TEST_CASE("c constant") {
  CHECK(c_constant(1) == 1);
  CHECK(c_constant(2) == 2);
  CHECK(c_constant(3) == 3);
  CHECK(c_constant(4) == 128);
  for (int l = 4; l <= 64; ++l) CHECK(c_constant(l) == 8 * l * l);
  CHECK_THROWS_AS(c_constant(0), InvalidInputError);
}

TEST_CASE("power split") {
  CHECK(delta_solution(1, 1.5, 2.0) == std::vector<double>{1.0});
  const auto d2 = delta_solution(2, 1.5, 2.0);
  CHECK(std::abs(d2[0] - 0.2071) < 1e-4);
  CHECK(std::abs(d2[1] - 0.7929) < 1e-4);
  const auto d4 = delta_solution(4, 1.5, 2.0);
  const double expect4[] = {0.0089, 0.0340, 0.1642, 0.7929};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(d4[i] - expect4[i]) < 1e-4);

  for (int l = 1; l <= 8; ++l) {
    for (double r : {0.5, 1.0, 1.5, 3.0}) {
      for (double c : {0.5, 2.0, 5.0}) {
        const auto d = delta_solution(l, r, c);
        double sum = 0.0;
        for (double x : d) sum += x;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        double before = d[0];
        for (int i = 1; i < l; ++i) {
          const double margin = d[i] / before - (std::pow(2.0, r) - 1.0);
          CHECK(margin >= c / (std::pow(2.0, r) + c) - 1e-12);
          before += d[i];
        }
      }
    }
  }
  CHECK_THROWS_AS(delta_solution(0, 1.5, 2.0), InvalidInputError);
  CHECK_THROWS_AS(delta_solution(2, 1.5, 0.0), InvalidInputError);
  CHECK_THROWS_AS(check_deltas({0.5, 0.6}), InvalidInputError);
  CHECK_THROWS_AS(check_deltas({1.2, -0.2}), InvalidInputError);
  CHECK_NOTHROW(check_deltas({0.2, 0.8}));
}

TEST_CASE("saturation caps") {
  const auto c2 = saturation_caps({0.2071, 0.7929});
  CHECK(std::isinf(c2[0]));
  CHECK(std::abs(c2[1] - 2.2716) < 1e-4);
  const auto c4 = saturation_caps({0.0089, 0.0340, 0.1642, 0.7929});
  CHECK(std::isinf(c4[0]));
  CHECK(std::abs(c4[1] - 2.2691) < 1e-4);
  CHECK(std::abs(c4[2] - 2.2713) < 1e-4);
  CHECK(std::abs(c4[3] - 2.2716) < 1e-4);
  CHECK(saturation_caps({0.5, 0.5})[1] == doctest::Approx(1.0));
  // Exact splits saturate every later user at log2(2^R + C).
  for (double cap : saturation_caps(delta_solution(5, 1.5, 2.0))) {
    if (!std::isinf(cap)) CHECK(cap == doctest::Approx(std::log2(std::pow(2.0, 1.5) + 2.0)));
  }
}

TEST_CASE("max-min beam") {
  RngStream rng(301);
  std::mt19937_64 gen(302);
  SUBCASE("single channel") {
    const CVectorXd v = random_unit(3, gen);
    const MaxMinBeam b = maxmin_beam({v}, rng);
    CHECK(b.w.isApprox(v));
    CHECK(b.achieved == doctest::Approx(1.0));
    CHECK(b.certificate_ok);
  }
  SUBCASE("orthogonal pair") {
    const MaxMinBeam b = maxmin_beam({basis_vector(2, 0), basis_vector(2, 1)}, rng);
    CHECK(b.achieved == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(b.w.norm() == doctest::Approx(1.0));
    CHECK(b.certificate_ok);
  }
  SUBCASE("rejects non-unit input") {
    CHECK_THROWS_AS(maxmin_beam({2.0 * basis_vector(2, 0)}, rng), InvalidInputError);
    CHECK_THROWS_AS(maxmin_beam({}, rng), InvalidInputError);
  }
  SUBCASE("close to the dense-search optimum on C^2") {
    for (int l : {2, 3}) {
      for (int t = 0; t < 20; ++t) {
        const auto v = random_units(l, 2, gen);
        const MaxMinBeam b = maxmin_beam(v, rng);
        const double opt = oracle_maxmin_c2(v);
        CHECK(b.achieved >= 0.98 * opt);
        CHECK(b.achieved <= opt * 1.001 + 1e-9);
        CHECK(b.achieved == doctest::Approx(min_gain(v, b.w)));
      }
    }
  }
  SUBCASE("invariant under a common rotation") {
    for (int n : {2, 3, 4}) {
      for (int l : {2, 3, 4}) {
        const auto v = random_units(l, n, gen);
        const CMatrixXd u = random_unitary(n, gen);
        std::vector<CVectorXd> rotated;
        for (const auto& x : v) rotated.push_back(u * x);
        RngStream r1(303), r2(303);
        const double a = maxmin_beam(v, r1).achieved;
        const double b = maxmin_beam(rotated, r2).achieved;
        CHECK(std::abs(a - b) <= 1e-9);
      }
    }
  }
  SUBCASE("certificate on random groups") {
    int ok = 0, total = 0;
    for (int n : {2, 4}) {
      for (int l : {2, 3}) {
        for (int t = 0; t < 250; ++t) {
          ok += maxmin_beam(random_units(l, n, gen), rng).certificate_ok;
          ++total;
        }
      }
    }
    CHECK(ok >= 0.99 * total);
  }
}

TEST_CASE("exact group rates") {
  SUBCASE("hand instance") {
    const std::vector<CVectorXd> g{2.0 * basis_vector(2, 0), basis_vector(2, 0)};
    const auto r = group_rates_exact(g, basis_vector(2, 0), {0.2, 0.8}, 10.0);
    CHECK(r[0] == doctest::Approx(std::log2(1.0 + 0.2 * 10.0 * 4.0)));
    CHECK(r[1] == doctest::Approx(std::log2(1.0 + 8.0 / 3.0)));
  }
  SUBCASE("single user is MRT") {
    const CVectorXd g = cdouble(0.0, 1.5) * basis_vector(3, 1);
    const auto r = group_rates_exact({g}, g / g.norm(), {1.0}, 4.0);
    CHECK(r[0] == doctest::Approx(std::log2(1.0 + 4.0 * 2.25)));
  }
  SUBCASE("zero share") {
    const std::vector<CVectorXd> g{basis_vector(2, 0), 0.5 * basis_vector(2, 0)};
    const auto r = group_rates_exact(g, basis_vector(2, 0), {0.0, 1.0}, 10.0);
    CHECK(r[0] == 0.0);
  }
  SUBCASE("input checks") {
    const std::vector<CVectorXd> up{basis_vector(2, 0), 2.0 * basis_vector(2, 0)};
    CHECK_THROWS_AS(group_rates_exact(up, basis_vector(2, 0), {0.2, 0.8}, 1.0),
                    InvalidInputError);
    const std::vector<CVectorXd> g{basis_vector(2, 0)};
    CHECK_THROWS_AS(group_rates_exact(g, 2.0 * basis_vector(2, 0), {1.0}, 1.0),
                    InvalidInputError);
  }
  SUBCASE("saturation") {
    std::mt19937_64 gen(304);
    const std::vector<CVectorXd> g{2.0 * random_unit(3, gen), random_unit(3, gen)};
    std::vector<CVectorXd> unit{g[0] / g[0].norm(), g[1] / g[1].norm()};
    RngStream rng(305);
    const CVectorXd w = maxmin_beam(unit, rng).w;
    const std::vector<double> d{0.2071, 0.7929};
    const double cap = saturation_caps(d)[1];
    double prev = 0.0, prev1 = 0.0;
    for (double p = 1.0; p < 1e9; p *= 10.0) {
      const auto r = group_rates_exact(g, w, d, p);
      CHECK(r[1] >= prev);
      CHECK(r[1] <= cap + 1e-12);
      CHECK(r[0] > prev1);
      prev = r[1];
      prev1 = r[0];
    }
    CHECK(prev == doctest::Approx(cap).epsilon(1e-6));
  }
}

TEST_CASE("lower bounds") {
  SUBCASE("single user") {
    CHECK(prop1_lower_bounds({3.0}, {1.0}, 2.0)[0] == doctest::Approx(std::log2(7.0)));
  }
  SUBCASE("high power limit is the cap") {
    const auto b = prop1_lower_bounds({3.0, 1.0}, {0.2071, 0.7929}, 1e12);
    CHECK(std::abs(b[1] - 2.2716) < 1e-4);
  }
  SUBCASE("closed form") {
    const std::vector<double> n2{4.0, 2.0, 1.0};
    const std::vector<double> d{0.05, 0.2, 0.75};
    const double p = 7.0, c = 3.0;
    const auto b = prop1_lower_bounds(n2, d, p);
    CHECK(b[0] == doctest::Approx(std::log2(1.0 + d[0] * n2[0] * p / c)));
    for (int i = 1; i < 3; ++i) {
      double s = 0.0;
      for (int m = 0; m < i; ++m) s += d[m];
      const double expect = std::log2(1.0 + (d[i] / s) / (1.0 + 1.0 / (n2[i] * s * p / c)));
      CHECK(b[i] == doctest::Approx(expect));
    }
  }
  SUBCASE("dominated by the achieved rates") {
    std::mt19937_64 gen(306);
    RngStream rng(307);
    int certified = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
      const int n = t % 2 ? 2 : 4;
      const int l = t % 4 < 2 ? 2 : 3;
      std::vector<CVectorXd> g;
      for (int i = 0; i < l; ++i) g.push_back(random_cmatrix(n, 1, gen).col(0));
      std::sort(g.begin(), g.end(),
                [](const auto& a, const auto& b) { return a.squaredNorm() > b.squaredNorm(); });
      std::vector<CVectorXd> unit;
      std::vector<double> n2;
      for (const auto& x : g) {
        unit.push_back(x / x.norm());
        n2.push_back(x.squaredNorm());
      }
      const MaxMinBeam beam = maxmin_beam(unit, rng);
      const double p = std::pow(10.0, std::uniform_real_distribution<double>(-1.0, 4.0)(gen));
      const auto d = delta_solution(l, 1.5, 2.0);
      if (!beam.certificate_ok) continue;
      ++certified;
      const auto r = group_rates_exact(g, beam.w, d, p);
      const auto b = prop1_lower_bounds(n2, d, p);
      for (int i = 0; i < l; ++i) CHECK(r[i] >= b[i] - 1e-9);
    }
    CHECK(certified >= 0.99 * trials);
  }
}

TEST_CASE("zero-forcing baseline") {
  std::mt19937_64 gen(308);
  SUBCASE("orthogonal channels") {
    CMatrixXd h = CMatrixXd::Zero(3, 3);
    h(0, 0) = 1.0;
    h(1, 1) = cdouble(0.0, 2.0);
    h(2, 2) = 0.5;
    const auto r = zf_baseline_rates(ChannelSet::from_matrix(h), 6.0);
    CHECK(r[0] == doctest::Approx(std::log2(1.0 + 2.0 * 1.0)));
    CHECK(r[1] == doctest::Approx(std::log2(1.0 + 2.0 * 4.0)));
    CHECK(r[2] == doctest::Approx(std::log2(1.0 + 2.0 * 0.25)));
  }
  SUBCASE("single user is MRT") {
    const ChannelSet s = ChannelSet::from_matrix(random_cmatrix(4, 1, gen));
    CHECK(zf_baseline_rates(s, 3.0)[0] == doctest::Approx(std::log2(1.0 + 3.0 * s.norm2(0))));
  }
  SUBCASE("K = N gains are exponential with mean 2") {
    RngStream rng(309);
    std::vector<double> x;
    for (int t = 0; t < 25000; ++t) {
      const auto g = zf_gains(sample_channels(4, 4, rng));
      x.insert(x.end(), g.begin(), g.end());
    }
    const double d = ks_statistic(x, [](double t) { return 1.0 - std::exp(-t / 2.0); });
    CHECK(d < ks_critical_value(x.size(), 0.01));
  }
  SUBCASE("dependent channel gets no rate") {
    CMatrixXd h = random_cmatrix(3, 3, gen);
    h.col(2) = h.col(0) - 2.0 * h.col(1);
    const auto g = zf_gains(ChannelSet::from_matrix(h));
    for (double x : g) CHECK(x == 0.0);
  }
  SUBCASE("design matches the gains on perfect csi") {
    RngStream rng(310);
    const ChannelSet s = sample_channels(4, 3, rng);
    const auto r = evaluate_rates(design_zf(s), s.h, 30.0);
    const auto ref = zf_baseline_rates(s, 30.0);
    for (int u = 0; u < 3; ++u) CHECK(r[u] == doctest::Approx(ref[u]).epsilon(1e-10));
  }
}

TEST_CASE("mrt outage closed form") {
  CHECK(mrt_outage_closed_form(1, 1.0, 100.0) == doctest::Approx(5e-3));
  CHECK(mrt_outage_closed_form(2, 1.0, 100.0) == doctest::Approx(1.25e-5));
  // First-order agreement with the exact N = 1 outage.
  const double x = 1.0 / 1e4;
  CHECK(mrt_outage_closed_form(1, 1.0, 1e4) ==
        doctest::Approx(1.0 - std::exp(-x / 2.0)).epsilon(1e-4));
  CHECK_THROWS_AS(mrt_outage_closed_form(1, 1.0, 0.0), InvalidInputError);
}

TEST_CASE("mixture rates") {
  DeltaPolicy policy;
  RngStream rng(311);
  SUBCASE("orthogonal channels reduce to zero-forcing") {
    CMatrixXd h = CMatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i) h(i, i) = 1.0 + 0.3 * i;
    const ChannelSet s = ChannelSet::from_matrix(h);
    const Grouping g = group_algorithm1(s, 0.9);
    const RateReport rep = mixture_rates(s, g, 50.0, policy, rng);
    const auto zf = zf_baseline_rates(s, 50.0);
    for (int u = 0; u < 4; ++u) {
      CHECK(rep.achieved_rate[u] == doctest::Approx(zf[u]));
      CHECK(std::isinf(rep.saturation_cap[u]));
    }
  }
  SUBCASE("single user") {
    CMatrixXd h(2, 1);
    h << cdouble(1.0, 1.0), cdouble(0.5, 0.0);
    const ChannelSet s = ChannelSet::from_matrix(h);
    const RateReport rep = mixture_rates(s, group_algorithm1(s, 0.9), 8.0, policy, rng);
    CHECK(rep.achieved_rate[0] == doctest::Approx(std::log2(1.0 + 8.0 * 2.25)));
  }
  SUBCASE("collinear pair") {
    CMatrixXd h = CMatrixXd::Zero(3, 3);
    h.col(0) = basis_vector(3, 0);
    h.col(1) = 2.0 * basis_vector(3, 0);
    h.col(2) = basis_vector(3, 1);
    const ChannelSet s = ChannelSet::from_matrix(h);
    const Grouping g = group_algorithm1(s, 0.9);
    const double pt = 30.0;
    const RateReport rep = mixture_rates(s, g, pt, policy, rng);
    const double b = std::pow(2.0, 1.5) + 2.0;
    const double d1 = 1.0 / b, d2 = (b - 1.0) / b;
    const double p = 2.0 * pt / 3.0;
    CHECK(rep.achieved_rate[1] == doctest::Approx(std::log2(1.0 + d1 * p * 4.0)));
    CHECK(rep.achieved_rate[0] == doctest::Approx(std::log2(1.0 + d2 * p / (d1 * p + 1.0))));
    CHECK(rep.achieved_rate[2] == doctest::Approx(std::log2(1.0 + pt / 3.0)));
    CHECK(rep.saturation_cap[0] == doctest::Approx(std::log2(b)));
    // The link-level evaluation on the true channels agrees.
    RngStream again(311);
    const auto r = evaluate_rates(design_mixture(g, policy, again), s.h, pt);
    for (int u = 0; u < 3; ++u) CHECK(r[u] == doctest::Approx(rep.achieved_rate[u]));
  }
  SUBCASE("bounds hold on random groupings") {
    RngStream ch(312);
    for (int t = 0; t < 300; ++t) {
      const ChannelSet s = sample_channels(4, 4, ch);
      const Grouping g = group_algorithm1(s, 0.9);
      const RateReport rep = mixture_rates(s, g, 100.0, policy, rng);
      if (!rep.certificate_ok) continue;
      for (int u = 0; u < 4; ++u) CHECK(rep.achieved_rate[u] >= rep.lower_bound[u] - 1e-9);
      // Inter-group zero-forcing leaves no leakage on perfect csi.
      RngStream a(400 + t), b(400 + t);
      const auto r = evaluate_rates(design_mixture(g, policy, a), s.h, 100.0);
      const RateReport same = mixture_rates(s, g, 100.0, policy, b);
      for (int u = 0; u < 4; ++u)
        CHECK(r[u] == doctest::Approx(same.achieved_rate[u]).epsilon(1e-8));
    }
  }
}

TEST_CASE("delta policy") {
  DeltaPolicy p;
  p.fixed[2] = {0.2, 0.8};
  CHECK(p.for_size(2) == std::vector<double>{0.2, 0.8});
  CHECK(p.for_size(1) == std::vector<double>{1.0});
  CHECK(p.for_size(3) == delta_solution(3, 1.5, 2.0));
  CHECK_NOTHROW(p.validate());
  p.fixed[3] = {0.5, 0.5};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.fixed.erase(3);
  p.fixed[2] = {0.3, 0.8};
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
