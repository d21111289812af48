// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "mixsim/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mixsim {

namespace {

// Series for P(a, y), valid for y < a + 1.
double gamma_p_series(int a, double y) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= y / (a + n);
    sum += term;
    if (term < sum * 1e-17) {
      break;
    }
  }
  return sum * std::exp(-y + a * std::log(y) - std::lgamma(static_cast<double>(a)));
}

// Q(a, y) = e^{-y} sum_{j<a} y^j / j! for integer a.
double gamma_q_finite(int a, double y) {
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < a; ++j) {
    term *= y / j;
    sum += term;
  }
  return std::exp(-y) * sum;
}

void require_dof(int dof) {
  if (dof < 2 || dof % 2 != 0) {
    throw InvalidInputError("chi-square: degrees of freedom must be even and >= 2, got " +
                            std::to_string(dof));
  }
}

}  // namespace

double regularized_gamma_p(int a, double y) {
  if (a < 1) {
    throw InvalidInputError("regularized_gamma_p: a must be >= 1");
  }
  if (y <= 0.0) {
    return 0.0;
  }
  if (y < a + 1.0) {
    return std::min(1.0, gamma_p_series(a, y));
  }
  return 1.0 - gamma_q_finite(a, y);
}

Chi2Value chi2_pdf_cdf(double x, int dof) {
  require_dof(dof);
  if (!(x >= 0.0)) {
    throw InvalidInputError("chi2_pdf_cdf: x must be >= 0");
  }
  const int n = dof / 2;
  Chi2Value v;
  if (x == 0.0) {
    v.pdf = n == 1 ? 0.5 : 0.0;
    v.cdf = 0.0;
    v.sf = 1.0;
    return v;
  }
  const double y = x / 2.0;
  v.pdf = std::exp((n - 1) * std::log(x) - y - n * std::log(2.0) -
                   std::lgamma(static_cast<double>(n)));
  if (y < n + 1.0) {
    v.cdf = std::min(1.0, gamma_p_series(n, y));
    v.sf = 1.0 - v.cdf;
  } else {
    v.sf = gamma_q_finite(n, y);
    v.cdf = 1.0 - v.sf;
  }
  return v;
}

double order_stat_pdf(double x, int k, int users, int antennas) {
  if (users < 1 || k < 1 || k > users) {
    throw InvalidInputError("order_stat_pdf: need 1 <= k <= K");
  }
  if (!(x >= 0.0)) {
    throw InvalidInputError("order_stat_pdf: x must be >= 0");
  }
  const Chi2Value c = chi2_pdf_cdf(x, 2 * antennas);
  if (c.pdf == 0.0) {
    return 0.0;
  }
  const double log_coeff = std::lgamma(users + 1.0) - std::lgamma(static_cast<double>(k)) -
                           std::lgamma(users - k + 1.0);
  double value = std::exp(log_coeff) * c.pdf;
  value *= std::pow(c.cdf, users - k);
  value *= std::pow(c.sf, k - 1);
  return value;
}

double order_stat_cdf(double x, int k, int users, int antennas) {
  if (users < 1 || k < 1 || k > users) {
    throw InvalidInputError("order_stat_cdf: need 1 <= k <= K");
  }
  const Chi2Value c = chi2_pdf_cdf(std::max(x, 0.0), 2 * antennas);
  // k-th largest <= x  <=>  at least K - k + 1 samples <= x.
  double total = 0.0;
  for (int j = users - k + 1; j <= users; ++j) {
    const double log_binom =
        std::lgamma(users + 1.0) - std::lgamma(j + 1.0) - std::lgamma(users - j + 1.0);
    total += std::exp(log_binom) * std::pow(c.cdf, j) * std::pow(c.sf, users - j);
  }
  return std::min(total, 1.0);
}

TailWindow default_tail_window(std::span<const double> samples) {
  if (samples.empty()) {
    throw InsufficientDataError("default_tail_window: no samples");
  }
  std::vector<double> s(samples.begin(), samples.end());
  auto mid = s.begin() + static_cast<std::ptrdiff_t>(s.size() / 2);
  std::nth_element(s.begin(), mid, s.end());
  return {0.02 * *mid, 0.2 * *mid};
}

double tail_exponent(std::span<const double> samples, std::optional<TailWindow> window) {
  const TailWindow w = window ? *window : default_tail_window(samples);
  if (!(w.lo > 0.0) || !(w.hi > w.lo)) {
    throw InvalidInputError("tail_exponent: window must satisfy 0 < lo < hi");
  }
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const auto below = [&](double x) {
    return static_cast<double>(std::upper_bound(s.begin(), s.end(), x) - s.begin());
  };
  const double in_window = below(w.hi) - below(w.lo);
  if (in_window < 50.0) {
    throw InsufficientDataError("tail_exponent: only " + std::to_string(in_window) +
                                " samples inside the window (need 50)");
  }

  constexpr int kGrid = 24;
  const double n = static_cast<double>(s.size());
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (int i = 0; i < kGrid; ++i) {
    const double lx = std::log(w.lo) + (std::log(w.hi) - std::log(w.lo)) * i / (kGrid - 1);
    const double count = below(std::exp(lx));
    if (count <= 0.0) {
      continue;
    }
    // var(log ECDF) ~ 1 / count, so weight by the count itself.
    const double ly = std::log(count / n);
    sw += count;
    sx += count * lx;
    sy += count * ly;
    sxx += count * lx * lx;
    sxy += count * lx * ly;
    ++used;
  }
  const double denom = sw * sxx - sx * sx;
  if (used < 2 || !(denom > 0.0)) {
    throw InsufficientDataError("tail_exponent: fewer than two populated grid points");
  }
  return (sw * sxy - sx * sy) / denom;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) {
    throw InvalidInputError("ks_statistic: no samples");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  double c = 0.0;
  if (std::abs(alpha - 0.01) < 1e-12) {
    c = 1.628;
  } else if (std::abs(alpha - 0.05) < 1e-12) {
    c = 1.358;
  } else if (std::abs(alpha - 0.10) < 1e-12) {
    c = 1.224;
  } else {
    c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  }
  return c / std::sqrt(static_cast<double>(n));
}

}  // namespace mixsim
