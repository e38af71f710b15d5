#include <random>

#include <gtest/gtest.h>

#include "ecan/geometry.hpp"

using namespace ecan;

namespace {

Ellipsoid<2> unit_disk() { return Ellipsoid<2>{}; }

// Gaussian elimination with partial pivoting; kept separate from Eigen on purpose.
template <int Dim>
Vec<Dim> dense_lu_solve(Mat<Dim> A, Vec<Dim> b) {
  for (int k = 0; k < Dim; ++k) {
    int piv = k;
    for (int i = k + 1; i < Dim; ++i) {
      if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
    }
    A.row(k).swap(A.row(piv));
    std::swap(b[k], b[piv]);
    for (int i = k + 1; i < Dim; ++i) {
      const double f = A(i, k) / A(k, k);
      A.row(i) -= f * A.row(k);
      b[i] -= f * b[k];
    }
  }
  Vec<Dim> x;
  for (int i = Dim - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < Dim; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

template <int Dim>
Mat<Dim> random_spd(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat<Dim> M;
  for (int i = 0; i < Dim; ++i)
    for (int j = 0; j < Dim; ++j) M(i, j) = u(rng);
  return M * M.transpose() + 0.2 * Mat<Dim>::Identity();
}

}  // namespace

TEST(EvaluateQuadric, UnitDiskValues) {
  EXPECT_DOUBLE_EQ(evaluate_quadric(unit_disk(), Vec<2>(0, 0)), -1.0);
  EXPECT_DOUBLE_EQ(evaluate_quadric(unit_disk(), Vec<2>(1, 0)), 0.0);
  EXPECT_DOUBLE_EQ(evaluate_quadric(unit_disk(), Vec<2>(2, 0)), 3.0);
}

TEST(EvaluateQuadric, DimensionMismatchThrows) {
  const std::vector<double> z{1.0, 2.0, 3.0};
  EXPECT_THROW(evaluate_quadric(unit_disk(), std::span<const double>(z)), ContractViolation);
  const std::vector<double> ok{1.0, 0.0};
  EXPECT_DOUBLE_EQ(evaluate_quadric(unit_disk(), std::span<const double>(ok)), 0.0);
}

TEST(EllipsoidCenter, CompleteTheSquare) {
  Ellipsoid<2> e;
  e.q = Vec<2>(-2, 0);
  e.r = 0;
  const Vec<2> c = ellipsoid_center(e);
  EXPECT_NEAR(c.x(), 1.0, 1e-15);
  EXPECT_NEAR(c.y(), 0.0, 1e-15);
  EXPECT_NEAR(ellipsoid_center(unit_disk()).norm(), 0.0, 1e-15);
}

TEST(EllipsoidCenter, SingularThrows) {
  Ellipsoid<2> e;
  e.P = Mat<2>::Zero();
  e.P(0, 0) = 1.0;
  EXPECT_THROW(ellipsoid_center(e), DegenerateQuadric);
}

TEST(EllipsoidCenter, MatchesIndependentLinearSolve) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    Ellipsoid<3> e;
    e.P = random_spd<3>(rng);
    e.q = Vec<3>(u(rng), u(rng), u(rng));
    const Vec<3> c = ellipsoid_center(e);
    EXPECT_LE((2.0 * e.P * c + e.q).norm(), 1e-10);
    const Vec<3> oracle = dense_lu_solve<3>(2.0 * e.P, -e.q);
    EXPECT_LE((c - oracle).norm(), 1e-9);
  }
}

TEST(EllipsoidCenter, IsGlobalMinimumOnGrid) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Ellipsoid<2> e;
    e.P = random_spd<2>(rng);
    e.q = Vec<2>(u(rng), u(rng));
    e.r = u(rng);
    const Vec<2> c = ellipsoid_center(e);
    const double vc = e(c);
    for (int i = -50; i <= 50; ++i)
      for (int j = -50; j <= 50; ++j) {
        const Vec<2> z = c + Vec<2>(0.04 * i, 0.04 * j);
        EXPECT_GE(e(z), vc - 1e-12);
      }
  }
}

TEST(EigenSymmetric, Diagonal) {
  Mat<2> P;
  P << 1, 0, 0, 4;
  const auto s = eigen_symmetric<2>(P);
  EXPECT_NEAR(s.eigenvalues[0], 1.0, 1e-15);
  EXPECT_NEAR(s.eigenvalues[1], 4.0, 1e-15);
  EXPECT_NEAR((s.vector(0) - Vec<2>(1, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((s.vector(1) - Vec<2>(0, 1)).norm(), 0.0, 1e-15);
}

TEST(EigenSymmetric, Analytic2x2) {
  Mat<2> P;
  P << 2, 1, 1, 2;
  const auto s = eigen_symmetric<2>(P);
  EXPECT_NEAR(s.eigenvalues[0], 1.0, 1e-14);
  EXPECT_NEAR(s.eigenvalues[1], 3.0, 1e-14);
  EXPECT_NEAR((s.vector(0) - Vec<2>(1, -1) / std::sqrt(2.0)).norm(), 0.0, 1e-14);
  EXPECT_NEAR((s.vector(1) - Vec<2>(1, 1) / std::sqrt(2.0)).norm(), 0.0, 1e-14);
}

TEST(EigenSymmetric, IdentityGivesCanonicalAxes) {
  const auto s = eigen_symmetric<3>(Mat<3>::Identity());
  EXPECT_EQ(s.eigenvalues, Vec<3>(1, 1, 1));
  EXPECT_EQ(s.eigenvectors, Mat<3>::Identity());
  const auto s2 = eigen_symmetric<2>(Mat<2>::Identity() * 5.0);
  EXPECT_EQ(s2.eigenvectors, Mat<2>::Identity());
}

TEST(EigenSymmetric, RepeatedPairIsDeterministicAndOrthonormal) {
  Mat<3> P = Mat<3>::Identity();
  P(2, 2) = 4.0;
  const auto s = eigen_symmetric<3>(P);
  EXPECT_NEAR(s.eigenvalues[2], 4.0, 1e-14);
  EXPECT_LE((s.eigenvectors.transpose() * s.eigenvectors - Mat<3>::Identity()).norm(), 1e-12);
  EXPECT_EQ(s.vector(0), Vec<3>(1, 0, 0));
  EXPECT_EQ(s.vector(1), Vec<3>(0, 1, 0));
}

TEST(EigenSymmetric, ReconstructsRandomMatrices) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    Mat<3> A;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j <= i; ++j) A(i, j) = A(j, i) = u(rng);
    const auto s = eigen_symmetric<3>(A);
    const Mat<3> R = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
    EXPECT_LE((R - A).norm(), 1e-8);
    EXPECT_LE(s.eigenvalues[0], s.eigenvalues[1]);
    EXPECT_LE(s.eigenvalues[1], s.eigenvalues[2]);
    for (int i = 0; i < 3; ++i) {
      const double lam = s.eigenvalues[i];
      EXPECT_LE((A * s.vector(i) - lam * s.vector(i)).norm(), 1e-9 * (1 + std::abs(lam)));
    }
    Mat<2> B;
    B << A(0, 0), A(0, 1), A(0, 1), A(1, 1);
    const auto s2 = eigen_symmetric<2>(B);
    EXPECT_LE((s2.eigenvectors * s2.eigenvalues.asDiagonal() * s2.eigenvectors.transpose() - B).norm(), 1e-8);
  }
}

TEST(Frames, LocalToGlobal) {
  Pose<2> p;
  p.frame = frame_from_heading(Vec<2>(0, 1));
  const Vec<2> g = local_to_global(p, Vec<2>(1, 0));
  EXPECT_NEAR((g - Vec<2>(0, 1)).norm(), 0.0, 1e-15);

  Pose<2> t;
  t.position = Vec<2>(3, 4);
  EXPECT_NEAR((local_to_global(t, Vec<2>(1, -1)) - Vec<2>(4, 3)).norm(), 0.0, 1e-15);
}

TEST(Frames, RoundTripAndIsometry) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    Pose<3> p;
    p.position = Vec<3>(u(rng), u(rng), u(rng));
    p.frame = frame_from_heading(Vec<3>(u(rng), u(rng), u(rng)));
    ASSERT_TRUE(is_valid_frame<3>(p.frame));
    const Vec<3> a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng));
    EXPECT_LE((global_to_local(p, local_to_global(p, a)) - a).norm(), 1e-12);
    EXPECT_NEAR((local_to_global(p, a) - local_to_global(p, b)).norm(), (a - b).norm(), 1e-10);
  }
}

TEST(Frames, HandednessChecked) {
  Mat<3> f = Mat<3>::Identity();
  f(2, 2) = -1.0;
  EXPECT_FALSE(is_valid_frame<3>(f));
  EXPECT_TRUE(is_valid_frame<3>(Mat<3>::Identity()));
}
