// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------
//
// Reference distributions for Rayleigh channel gains: chi-square with 2N
// degrees of freedom, order statistics of K such gains, and empirical
// lower-tail exponents (degrees of freedom of a fading channel).

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mixsim/types.hpp"

namespace mixsim {

struct Chi2Value {
  double pdf = 0.0;
  double cdf = 0.0;
  double sf = 1.0;  // 1 - cdf, evaluated without cancellation
};

/// Chi-square density and distribution with `dof` = 2N degrees of freedom
/// (the law of |h|^2 for h ~ CN(0, 2 I_N)).
Chi2Value chi2_pdf_cdf(double x, int dof);

/// Density of the k-th largest (k = 1 strongest) of K i.i.d. chi-square(2N)
/// variables.
double order_stat_pdf(double x, int k, int users, int antennas);

/// Pr(k-th largest of K chi-square(2N) variables <= x).
double order_stat_cdf(double x, int k, int users, int antennas);

/// Regularised lower incomplete gamma P(a, y) for integer a >= 1.
double regularized_gamma_p(int a, double y);

struct TailWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// [0.02, 0.2] times the sample median.
TailWindow default_tail_window(std::span<const double> samples);

/// Least-squares slope of log(empirical CDF) against log(x) over `window`:
/// an estimate of the lower-tail exponent d in Pr(X <= x) ~ x^d.
///
/// The ECDF is evaluated on a log-spaced grid inside the window and the fit
/// is weighted by the sample count below each grid point. Throws
/// InsufficientDataError when fewer than 50 samples fall in the window.
double tail_exponent(std::span<const double> samples,
                     std::optional<TailWindow> window = std::nullopt);

/// Kolmogorov-Smirnov distance between the samples and a reference CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic one-sample KS critical value at level alpha (0.01 or 0.05 or 0.10).
double ks_critical_value(std::size_t n, double alpha);

}  // namespace mixsim
