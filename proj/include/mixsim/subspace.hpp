// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------
//
// Orthogonal projectors, sequential projection and the two alignment metrics
// (vector-to-subspace phi and subspace-to-subspace theta) used by the user
// grouping stage. Everything is templated on the real scalar type and takes
// Eigen expressions; nothing here allocates state beyond the result.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mixsim/types.hpp"

namespace mixsim {

/// Relative residual below which a column counts as linearly dependent.
inline constexpr double kRankTolerance = 1e-9;

enum class ProjectorKind { Onto, OrthogonalComplement };

template <typename Real>
struct Projector {
  CMatrix<Real> matrix;
  ProjectorKind kind = ProjectorKind::OrthogonalComplement;

  template <typename Derived>
  CVector<Real> operator()(const Eigen::MatrixBase<Derived>& x) const {
    return matrix * x;
  }
};

using ProjectorXd = Projector<double>;

/// Orthonormal basis of the column span of `a`, built by modified
/// Gram-Schmidt with one re-orthogonalisation pass.
///
/// A column whose residual after projection falls below
/// `tol * (original column norm)` is dependent. With `strict` set a dependent
/// column raises DegenerateBasisError, otherwise it is dropped; zero columns
/// count as dependent.
template <typename Derived>
CMatrix<typename Derived::RealScalar> orthonormal_basis(const Eigen::MatrixBase<Derived>& a,
                                                       bool strict,
                                                       double tol = kRankTolerance) {
  using Real = typename Derived::RealScalar;
  const Eigen::Index n = a.rows();
  CMatrix<Real> q(n, a.cols());
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    CVector<Real> v = a.col(j);
    const Real original = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < rank; ++k) {
        v -= q.col(k) * q.col(k).dot(v);
      }
    }
    const Real residual = v.norm();
    if (!(original > Real(0)) || residual < Real(tol) * original || rank >= n) {
      if (strict) {
        throw DegenerateBasisError("orthonormal_basis: column " + std::to_string(j) +
                                   " is linearly dependent on earlier columns");
      }
      continue;
    }
    q.col(rank++) = v / residual;
  }
  return q.leftCols(rank);
}

/// Component of `x` orthogonal to the span of the orthonormal columns `q`.
template <typename DerivedQ, typename DerivedX>
CVector<typename DerivedQ::RealScalar> residual_from_basis(const Eigen::MatrixBase<DerivedQ>& q,
                                                          const Eigen::MatrixBase<DerivedX>& x) {
  CVector<typename DerivedQ::RealScalar> r = x;
  if (q.cols() > 0) {
    r -= q * (q.adjoint() * x);
  }
  return r;
}

/// Pi_A^perp = I - A (A^H A)^{-1} A^H. Identity for an empty A.
template <typename Derived>
Projector<typename Derived::RealScalar> projector_orth(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  const CMatrix<Real> q = orthonormal_basis(a, /*strict=*/true);
  Projector<Real> p;
  p.kind = ProjectorKind::OrthogonalComplement;
  p.matrix = CMatrix<Real>::Identity(a.rows(), a.rows());
  if (q.cols() > 0) {
    p.matrix.noalias() -= q * q.adjoint();
  }
  return p;
}

/// Pi_A = A (A^H A)^{-1} A^H. Zero matrix for an empty A.
template <typename Derived>
Projector<typename Derived::RealScalar> projector_onto(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  const CMatrix<Real> q = orthonormal_basis(a, /*strict=*/true);
  Projector<Real> p;
  p.kind = ProjectorKind::Onto;
  p.matrix = q * q.adjoint();
  if (q.cols() == 0) {
    p.matrix = CMatrix<Real>::Zero(a.rows(), a.rows());
  }
  return p;
}

/// Projection of `x` onto the orthogonal complement of span(A), dropping
/// dependent columns of A instead of failing.
template <typename DerivedA, typename DerivedX>
CVector<typename DerivedA::RealScalar> project_out_span(const Eigen::MatrixBase<DerivedA>& a,
                                                       const Eigen::MatrixBase<DerivedX>& x) {
  return residual_from_basis(orthonormal_basis(a, /*strict=*/false), x);
}

/// Pi^perp_[A1,...,An] x computed stage by stage: project x and every later
/// stage onto the complement of the current (already projected) stage.
///
/// Stages that are empty, or become empty after earlier projections, are
/// skipped. A stage that turns rank deficient raises DegenerateBasisError.
template <typename Real>
CVector<Real> sequential_project(CVector<Real> x, std::vector<CMatrix<Real>> stages) {
  std::vector<Eigen::Matrix<Real, Eigen::Dynamic, 1>> original;
  for (const auto& st : stages) {
    original.push_back(st.colwise().norm().transpose());
  }
  for (std::size_t s = 0; s < stages.size(); ++s) {
    if (stages[s].cols() == 0) {
      continue;
    }
    // Dependence is judged against the norms before any projection.
    for (Eigen::Index j = 0; j < stages[s].cols(); ++j) {
      if (!(stages[s].col(j).norm() >= Real(kRankTolerance) * original[s](j)) ||
          !(original[s](j) > Real(0))) {
        throw DegenerateBasisError("sequential_project: stage " + std::to_string(s) +
                                   " is rank deficient after projection");
      }
    }
    const CMatrix<Real> q = orthonormal_basis(stages[s], /*strict=*/true);
    x -= q * (q.adjoint() * x);
    for (std::size_t t = s + 1; t < stages.size(); ++t) {
      if (stages[t].cols() > 0) {
        stages[t] -= q * (q.adjoint() * stages[t]);
      }
    }
  }
  return x;
}

/// Squared projection length of b onto span(A) relative to |b|^2:
/// |A (A^H A)^{-1} A^H b|^2 / |b|^2, in [0, 1].
template <typename DerivedA, typename DerivedB>
typename DerivedA::RealScalar phi(const Eigen::MatrixBase<DerivedA>& a,
                                  const Eigen::MatrixBase<DerivedB>& b) {
  using Real = typename DerivedA::RealScalar;
  const Real bn2 = b.squaredNorm();
  if (!(bn2 > Real(0))) {
    throw InvalidInputError("phi: b must be nonzero");
  }
  if (a.cols() == 0) {
    return Real(0);
  }
  const CMatrix<Real> q = orthonormal_basis(a, /*strict=*/false);
  return std::clamp((q.adjoint() * b).squaredNorm() / bn2, Real(0), Real(1));
}

namespace detail {

// Largest phi(span(q), c) over the nonzero columns c of `cols`.
template <typename Real>
Real max_phi_against(const CMatrix<Real>& q, const CMatrix<Real>& cols) {
  Real best = Real(0);
  if (q.cols() == 0) {
    return best;
  }
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    const Real n2 = cols.col(j).squaredNorm();
    if (!(n2 > Real(0))) {
      continue;
    }
    best = std::max(best, (q.adjoint() * cols.col(j)).squaredNorm() / n2);
  }
  return std::min(best, Real(1));
}

}  // namespace detail

/// Subspace alignment: max over phi(A, b_i) and phi(B, a_j); zero when either
/// side is empty.
template <typename DerivedA, typename DerivedB>
typename DerivedA::RealScalar theta(const Eigen::MatrixBase<DerivedA>& a,
                                    const Eigen::MatrixBase<DerivedB>& b) {
  using Real = typename DerivedA::RealScalar;
  if (a.cols() == 0 || b.cols() == 0) {
    return Real(0);
  }
  const CMatrix<Real> ac = a;
  const CMatrix<Real> bc = b;
  const CMatrix<Real> qa = orthonormal_basis(ac, /*strict=*/false);
  const CMatrix<Real> qb = orthonormal_basis(bc, /*strict=*/false);
  return std::max(detail::max_phi_against(qa, bc), detail::max_phi_against(qb, ac));
}

}  // namespace mixsim
