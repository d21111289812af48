// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include <doctest.h>

#include "mixsim/subspace.hpp"
#include "support.hpp"

using namespace mixsim;
using namespace testing_support;

TEST_CASE("projector_orth of an empty matrix is the identity") {
  const CMatrixXd a(3, 0);
  const ProjectorXd p = projector_orth(a);
  CHECK(p.matrix.isApprox(CMatrixXd::Identity(3, 3)));
  CHECK(p.kind == ProjectorKind::OrthogonalComplement);
}

TEST_CASE("projector_orth annihilates the spanning vector") {
  const CMatrixXd a = basis_vector(4, 0);
  const CVectorXd y = projector_orth(a)(basis_vector(4, 0));
  CHECK(y.norm() < 1e-15);
}

TEST_CASE("projectors are Hermitian, idempotent and split the norm") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 7;
    const int m = 1 + trial % n;
    const CMatrixXd a = random_cmatrix(n, m, gen);
    const CVectorXd x = random_cmatrix(n, 1, gen);
    const ProjectorXd perp = projector_orth(a);
    const ProjectorXd onto = projector_onto(a);
    const CMatrixXd& p = perp.matrix;
    REQUIRE((p * p - p).norm() < 1e-10);
    REQUIRE((p - p.adjoint()).norm() < 1e-10);
    Eigen::SelfAdjointEigenSolver<CMatrixXd> eig(p);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ev = eig.eigenvalues()(i);
      REQUIRE(std::min(std::abs(ev), std::abs(ev - 1.0)) < 1e-8);
    }
    REQUIRE((p - reference_orth_projector(a)).norm() < 1e-9);
    const double total = perp(x).squaredNorm() + onto(x).squaredNorm();
    REQUIRE(std::abs(total - x.squaredNorm()) < 1e-10 * x.squaredNorm());
  }
}

TEST_CASE("strict projection rejects dependent columns, tolerant projection drops them") {
  std::mt19937_64 gen(12);
  CMatrixXd a = random_cmatrix(4, 3, gen);
  a.col(2) = a.col(0) * cdouble(2.0, -1.0) + a.col(1);
  CHECK_THROWS_AS(projector_orth(a), DegenerateBasisError);
  const CVectorXd x = random_cmatrix(4, 1, gen);
  const CVectorXd tolerant = project_out_span(a, x);
  const CVectorXd reference = reference_orth_projector(a.leftCols(2)) * x;
  CHECK((tolerant - reference).norm() < 1e-10 * x.norm());
  CHECK(orthonormal_basis(a, false).cols() == 2);
}

TEST_CASE("sequential projection matches the direct projector") {
  std::mt19937_64 gen(13);
  SUBCASE("single stage") {
    const CMatrixXd a = random_cmatrix(5, 2, gen);
    const CVectorXd x = random_cmatrix(5, 1, gen);
    const CVectorXd s = sequential_project<double>(x, {a});
    CHECK((s - projector_orth(a)(x)).norm() < 1e-12);
  }
  SUBCASE("two stages, N = 6") {
    const CMatrixXd a = random_cmatrix(6, 2, gen);
    const CMatrixXd b = random_cmatrix(6, 3, gen);
    const CVectorXd x = random_cmatrix(6, 1, gen);
    const CVectorXd s = sequential_project<double>(x, {a, b});
    const CVectorXd d = reference_orth_projector(hcat(a, b)) * x;
    CHECK((s - d).norm() <= 1e-10 * d.norm());
  }
  SUBCASE("fixed point in the complement") {
    CMatrixXd a = CMatrixXd::Zero(4, 1);
    CMatrixXd b = CMatrixXd::Zero(4, 1);
    a(0, 0) = 1.0;
    b(1, 0) = cdouble(0.0, 2.0);
    CVectorXd x = CVectorXd::Zero(4);
    x(2) = cdouble(0.5, -1.5);
    x(3) = 3.0;
    const CVectorXd s = sequential_project<double>(x, {a, b});
    CHECK(s == x);
  }
  SUBCASE("empty stage is skipped") {
    const CMatrixXd a = random_cmatrix(4, 1, gen);
    const CVectorXd x = random_cmatrix(4, 1, gen);
    const CVectorXd s = sequential_project<double>(x, {CMatrixXd(4, 0), a});
    CHECK((s - projector_orth(a)(x)).norm() < 1e-12);
  }
  SUBCASE("stage that collapses after projection is degenerate") {
    const CMatrixXd a = random_cmatrix(4, 2, gen);
    const CMatrixXd b = a.col(0) * cdouble(0.3, 0.1);
    CHECK_THROWS_AS(sequential_project<double>(random_cmatrix(4, 1, gen), {a, b}),
                    DegenerateBasisError);
  }
}

TEST_CASE("phi examples") {
  const CVectorXd e1 = basis_vector(3, 0);
  const CVectorXd e2 = basis_vector(3, 1);
  std::mt19937_64 gen(14);
  const CVectorXd a = random_cmatrix(3, 1, gen);
  CHECK(phi(a, a) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(phi(e1, e2) == doctest::Approx(0.0));
  CHECK(phi(e1, CVectorXd((e1 + e2) / std::sqrt(2.0))) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(phi(e1, CVectorXd::Zero(3)), InvalidInputError);
}

TEST_CASE("phi is a squared cosine, complements the residual and grows with columns") {
  std::mt19937_64 gen(15);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + trial % 5;
    const CMatrixXd a = random_cmatrix(n, 1 + trial % (n - 1), gen);
    const CVectorXd b = random_cmatrix(n, 1, gen);
    const double p = phi(a, b);
    const double residual = (reference_orth_projector(a) * b).squaredNorm() / b.squaredNorm();
    REQUIRE(std::abs(p + residual - 1.0) < 1e-10);
    const CMatrixXd wider = hcat(a, random_cmatrix(n, 1, gen));
    REQUIRE(phi(wider, b) >= p - 1e-12);
    const CVectorXd a1 = a.col(0);
    const double cos2 = std::norm(a1.dot(b)) / (a1.squaredNorm() * b.squaredNorm());
    REQUIRE(std::abs(phi(a1, b) - cos2) < 1e-12);
  }
}

TEST_CASE("theta examples") {
  const Eigen::Index n = 3;
  const CVectorXd e1 = basis_vector(n, 0);
  const CVectorXd e2 = basis_vector(n, 1);
  const CVectorXd e3 = basis_vector(n, 2);
  CHECK(theta(e1, CMatrixXd(n, 0)) == 0.0);
  CHECK(theta(CMatrixXd(n, 0), e1) == 0.0);
  CHECK(theta(e1, e1) == doctest::Approx(1.0));
  CMatrixXd a(n, 2), b(n, 2);
  a << e1, e2;
  b << e3, (e1 + e3) / std::sqrt(2.0);
  // Column-wise: phi(A, b1) = 0, phi(A, b2) = 1/2, phi(B, a2) = 0, but a1 = e1
  // lies in span(B) = span(e1, e3), so phi(B, a1) = 1 and the maximum is 1.
  CHECK(phi(a, CVectorXd(b.col(0))) == doctest::Approx(0.0));
  CHECK(phi(a, CVectorXd(b.col(1))) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(phi(b, e1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(phi(b, e2) == doctest::Approx(0.0));
  CHECK(theta(a, b) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(theta(b, a) == doctest::Approx(1.0).epsilon(1e-14));
  // Dropping the shared direction leaves only the 45-degree column.
  const CVectorXd b2 = (e2 + e3) / std::sqrt(2.0);
  CHECK(theta(e2, b2) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("theta against a single vector reduces to phi") {
  std::mt19937_64 gen(16);
  for (int trial = 0; trial < 200; ++trial) {
    const CMatrixXd a = random_cmatrix(5, 3, gen);
    const CVectorXd b = random_cmatrix(5, 1, gen);
    REQUIRE(std::abs(theta(a, b) - phi(a, b)) < 1e-12);
  }
}
