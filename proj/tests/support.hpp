// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------
//
// Shared helpers for the test binaries: random complex data and reference
// computations that avoid the library code paths they check.

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "mixsim/types.hpp"

namespace testing_support {

using mixsim::CMatrixXd;
using mixsim::CVectorXd;
using mixsim::cdouble;

inline CMatrixXd random_cmatrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      m(i, j) = cdouble(n(gen), n(gen));
    }
  }
  return m;
}

inline CVectorXd random_unit(Eigen::Index n, std::mt19937_64& gen) {
  CVectorXd v = random_cmatrix(n, 1, gen);
  return v / v.norm();
}

inline CVectorXd basis_vector(Eigen::Index n, Eigen::Index i) {
  CVectorXd e = CVectorXd::Zero(n);
  e(i) = 1.0;
  return e;
}

/// I - A (A^H A)^{-1} A^H through a normal-equations solve.
inline CMatrixXd reference_orth_projector(const CMatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (a.cols() == 0) {
    return CMatrixXd::Identity(n, n);
  }
  const CMatrixXd gram = a.adjoint() * a;
  const CMatrixXd coeff = gram.ldlt().solve(a.adjoint());
  return CMatrixXd::Identity(n, n) - a * coeff;
}

inline CMatrixXd hcat(const CMatrixXd& a, const CMatrixXd& b) {
  CMatrixXd out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace testing_support
