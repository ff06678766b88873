#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace jinet;
using namespace jinet::testing;

TEST(OrthonormalBasis, RejectsNonOrthonormalColumns) {
  Matrix m = Matrix::Identity(3, 2);
  m(0, 0) = 0.5;
  try {
    OrthonormalBasis b(m);
    FAIL() << "expected NotOrthonormal";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotOrthonormal);
  }
}

TEST(OrthonormalBasis, RejectsMoreColumnsThanRows) {
  try {
    OrthonormalBasis b(Matrix::Identity(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RankOutOfBounds);
  }
}

TEST(EigOrdered, DiagonalOrdersByMagnitudeKeepingSign) {
  Matrix s = Eigen::Vector3d(3, -5, 1).asDiagonal();
  const SpectralPair sp = eig_ordered(s, 2);
  EXPECT_DOUBLE_EQ(sp.values(0), -5.0);
  EXPECT_DOUBLE_EQ(sp.values(1), 3.0);
  EXPECT_LT((sp.basis.columns().col(0) - unit(3, 1)).norm(), 1e-14);
  EXPECT_LT((sp.basis.columns().col(1) - unit(3, 0)).norm(), 1e-14);
}

TEST(EigOrdered, TwoByTwoDiagonal) {
  const SpectralPair sp = eig_ordered(Matrix(Eigen::Vector2d(2, 1).asDiagonal()), 1);
  EXPECT_DOUBLE_EQ(sp.values(0), 2.0);
  EXPECT_LT((sp.basis.columns() - unit(2, 0)).norm(), 1e-14);
}

TEST(EigOrdered, RandomSymmetricResidualsAndOrthonormality) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix s = random_symmetric(6, seed);
    const SpectralPair sp = eig_ordered(s, 3);
    const double scale = std::max(1.0, s.norm());
    for (Index j = 0; j < 3; ++j) {
      const Vector v = sp.basis.columns().col(j);
      EXPECT_LE((s * v - sp.values(j) * v).norm(), 1e-8 * scale);
    }
    EXPECT_LE(sp.basis.orthonormality_error(), 1e-10);
    for (Index j = 0; j + 1 < 3; ++j) EXPECT_GE(std::abs(sp.values(j)), std::abs(sp.values(j + 1)));
  }
}

TEST(EigOrdered, LargestEntryOfEachVectorIsPositive) {
  const SpectralPair sp = eig_ordered(random_symmetric(7, 42), 4);
  for (Index j = 0; j < 4; ++j) {
    Index arg = 0;
    sp.basis.columns().col(j).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(sp.basis.columns()(arg, j), 0.0);
  }
}

TEST(EigOrdered, RejectsAsymmetricInput) {
  Matrix s = Matrix::Identity(3, 3);
  s(0, 1) = 1e-6;
  try {
    eig_ordered(s, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotSymmetric);
  }
}

TEST(EigOrdered, RejectsBadK) {
  for (Index k : {Index{0}, Index{4}}) {
    try {
      eig_ordered(Matrix::Identity(3, 3), k);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::RankOutOfBounds);
    }
  }
}

TEST(SvLeft, DiagonalAndRankOne) {
  const SpectralPair sp = sv_left(Matrix(Eigen::Vector2d(4, 2).asDiagonal()), 1);
  EXPECT_DOUBLE_EQ(sp.values(0), 4.0);
  EXPECT_LT((sp.basis.columns() - unit(2, 0)).norm(), 1e-14);

  const Vector u = random_orthonormal(5, 1, 3).col(0);
  const Vector v = random_orthonormal(4, 1, 4).col(0);
  const SpectralPair r1 = sv_left(u * v.transpose(), 1);
  EXPECT_NEAR(r1.values(0), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(r1.basis.columns().col(0).dot(u)), 1.0, 1e-12);
}

TEST(SvLeft, RandomResidualCheck) {
  const Matrix x = gaussian(8, 3, 11);
  const SpectralPair sp = sv_left(x, 3);
  for (Index j = 0; j < 3; ++j) {
    const Vector u = sp.basis.columns().col(j);
    EXPECT_LT((x * x.transpose() * u - sp.values(j) * sp.values(j) * u).norm(), 1e-8);
  }
  EXPECT_GE(sp.values(0), sp.values(1));
  EXPECT_GE(sp.values(1), sp.values(2));
}

TEST(SvLeft, MatchesEigOnPsdMatrices) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix g = gaussian(6, 6, seed);
    const Matrix s = g * g.transpose();
    EXPECT_LT((eig_ordered(s, 4).values - sv_left(s, 4).values).norm(), 1e-8);
  }
}

TEST(SvLeft, RejectsKBeyondMinDimension) {
  try {
    sv_left(gaussian(5, 2, 1), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RankOutOfBounds);
  }
}

TEST(Projectors, SmallExamples) {
  const OrthonormalBasis e1(unit(2, 0));
  const Matrix y = Eigen::Vector2d(3, 4);
  EXPECT_LT((projector_apply(e1, y) - Matrix(Eigen::Vector2d(3, 0))).norm(), 1e-15);
  EXPECT_LT((residual_apply(e1, y) - Matrix(Eigen::Vector2d(0, 4))).norm(), 1e-15);

  const OrthonormalBasis full(random_orthogonal(4, 9));
  const Matrix z = gaussian(4, 3, 10);
  EXPECT_LT((projector_apply(full, z) - z).norm(), 1e-12);
}

TEST(Projectors, IdempotenceOrthogonalityAndSplit) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const OrthonormalBasis b(random_orthonormal(9, 3, seed));
    const Matrix y = gaussian(9, 4, seed + 100);
    const Matrix py = projector_apply(b, y);
    EXPECT_LT((projector_apply(b, py) - py).norm(), 1e-12);
    EXPECT_LT((b.columns().transpose() * residual_apply(b, y)).norm(), 1e-10);
    EXPECT_LT((residual_apply(b, y) + py - y).norm(), 1e-12);
    EXPECT_LT((py - projector_matrix(b.columns()) * y).norm(), 1e-12);
  }
}

TEST(Projectors, ResidualOfMemberIsZero) {
  const OrthonormalBasis b(random_orthonormal(6, 2, 5));
  const Matrix y = b.columns() * gaussian(2, 3, 6);
  EXPECT_LT(residual_apply(b, y).norm(), 1e-12);
}

TEST(Projectors, DimensionMismatch) {
  try {
    projector_apply(OrthonormalBasis(unit(3, 0)), Matrix::Ones(4, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
}

TEST(Procrustes, IdentityAndOrthogonalExtremes) {
  const OrthonormalBasis u(random_orthonormal(6, 2, 1));
  EXPECT_LT(procrustes_distance(u, u), 1e-12);
  EXPECT_NEAR(procrustes_distance(OrthonormalBasis(unit(2, 0)), OrthonormalBasis(unit(2, 1))), std::sqrt(2.0), 1e-15);
}

TEST(Procrustes, RankOneMatchesSignBruteForce) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Matrix u = random_orthonormal(6, 1, seed);
    const Matrix v = random_orthonormal(6, 1, seed + 5000);
    const double brute = std::min((u - v).norm(), (u + v).norm());
    EXPECT_NEAR(procrustes_distance(OrthonormalBasis(u), OrthonormalBasis(v)), brute, 1e-12);
  }
}

TEST(Procrustes, MatchesClosedFormOnRandomPairs) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Matrix u = random_orthonormal(10, 3, seed);
    const Matrix v = random_orthonormal(10, 3, seed + 77);
    Eigen::JacobiSVD<Matrix> svd(v.transpose() * u);
    const double closed = std::sqrt(std::max(0.0, 6.0 - 2.0 * svd.singularValues().sum()));
    EXPECT_NEAR(procrustes_distance(OrthonormalBasis(u), OrthonormalBasis(v)), closed, 1e-10);
  }
}

TEST(Procrustes, SymmetricAndRotationInvariant) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const OrthonormalBasis u(random_orthonormal(8, 3, seed));
    const OrthonormalBasis v(random_orthonormal(8, 3, seed + 1000));
    const OrthonormalBasis vq(v.columns() * random_orthogonal(3, seed + 2000));
    const double d = procrustes_distance(u, v);
    EXPECT_NEAR(d, procrustes_distance(v, u), 1e-10);
    EXPECT_NEAR(d, procrustes_distance(u, vq), 1e-10);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, std::sqrt(6.0) + 1e-12);
  }
}

TEST(Procrustes, RejectsMismatchedShapes) {
  try {
    procrustes_distance(OrthonormalBasis(random_orthonormal(5, 2, 1)), OrthonormalBasis(random_orthonormal(5, 1, 2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
}

TEST(DeltaSeparation, AnalyticCases) {
  const Matrix q = random_orthonormal(5, 2, 3);
  const OrthonormalBasis r1(q.col(0));
  EXPECT_NEAR(delta_separation(r1, r1), 0.0, 1e-12);
  EXPECT_NEAR(delta_separation(r1, OrthonormalBasis(q.col(1))), 1.0, 1e-12);
  const double theta = std::numbers::pi / 3.0;
  const OrthonormalBasis r2(Matrix(std::cos(theta) * q.col(0) + std::sin(theta) * q.col(1)));
  EXPECT_NEAR(delta_separation(r1, r2), 0.5, 1e-12);
}

TEST(DeltaSeparation, InvariantToRotations) {
  const OrthonormalBasis a(random_orthonormal(9, 2, 1));
  const OrthonormalBasis b(random_orthonormal(9, 3, 2));
  const double d = delta_separation(a, b);
  EXPECT_NEAR(d, delta_separation(OrthonormalBasis(a.columns() * random_orthogonal(2, 3)), b), 1e-10);
  EXPECT_NEAR(d, delta_separation(a, OrthonormalBasis(b.columns() * random_orthogonal(3, 4))), 1e-10);
}

TEST(OrthonormalSpan, RecoversColumnSpaceAndRejectsZero) {
  const Matrix b = random_orthonormal(7, 2, 8);
  const Matrix x = b * gaussian(2, 5, 9);
  const OrthonormalBasis span = orthonormal_span(x);
  EXPECT_EQ(span.r(), 2);
  EXPECT_LT(procrustes_distance(span, OrthonormalBasis(b)), 1e-10);
  try {
    orthonormal_span(Matrix::Zero(4, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RankDeficient);
  }
}
