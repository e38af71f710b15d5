#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ecan/navigator.hpp"

using namespace ecan;

namespace {

double circle_min(const BallProgram& b, int samples) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double a = 2.0 * std::numbers::pi * i / samples;
    VectorXd z(2);
    z << std::cos(a), std::sin(a);
    if (b.in_domain(z)) best = std::min(best, b.value(z));
  }
  return best;
}

double fibonacci_min(const BallProgram& b, int samples) {
  double best = std::numeric_limits<double>::infinity();
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < samples; ++i) {
    const double y = 1.0 - 2.0 * (i + 0.5) / samples;
    const double rad = std::sqrt(1.0 - y * y);
    VectorXd z(3);
    z << rad * std::cos(golden * i), y, rad * std::sin(golden * i);
    if (b.in_domain(z)) best = std::min(best, b.value(z));
  }
  return best;
}

template <int Dim>
Ellipsoid<Dim> random_ellipsoid(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat<Dim> M;
  for (int i = 0; i < Dim; ++i)
    for (int j = 0; j < Dim; ++j) M(i, j) = u(rng);
  Ellipsoid<Dim> e;
  e.P = M * M.transpose() + Mat<Dim>::Identity();
  Vec<Dim> c;
  for (int i = 0; i < Dim; ++i) c[i] = 5.0 * u(rng);
  e.q = -2.0 * e.P * c;
  e.r = c.dot(e.P * c) - (2.0 + 20.0 * std::abs(u(rng)));
  return e;
}

template <int Dim>
Vec<Dim> random_unit(std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec<Dim> v;
  for (int i = 0; i < Dim; ++i) v[i] = g(rng);
  return v.normalized();
}

template <int Dim>
double bisect_boundary(const Ellipsoid<Dim>& e, const Vec<Dim>& z_e) {
  const Vec<Dim> c = ellipsoid_center(e);
  double lo = 0.0, hi = 1.0;
  while (e(c + hi * z_e) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (e(c + mid * z_e) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// The max of convex quadratics along a ray is convex, so its sublevel set is an
// interval and a coarse bracket followed by a 1e-5 scan finds the first exit.
template <int Dim>
double line_search_step(const Ellipsoid<Dim>& e, const std::vector<Vec<Dim>>& pts, const Vec<Dim>& z) {
  auto ok = [&](double d) {
    for (const auto& p : pts)
      if (e(p + d * z) > -1.0) return false;
    return true;
  };
  double d = 0.0;
  while (ok(d + 1e-2)) d += 1e-2;
  while (ok(d + 1e-5)) d += 1e-5;
  return d;
}

std::vector<Vec<2>> box_body(const Vec<2>& c) {
  return {c + Vec<2>(0.5, 0.25), c + Vec<2>(-0.5, 0.25), c + Vec<2>(-0.5, -0.25), c + Vec<2>(0.5, -0.25)};
}

Ellipsoid<2> diag2(double a, double b, double r = -1.0) {
  Ellipsoid<2> e;
  e.P = Vec<2>(a, b).asDiagonal();
  e.r = r;
  return e;
}

}  // namespace

TEST(BuildFrame2D, MoreObstaclesAboveTurnsClockwise) {
  Pose<2> pose;
  const auto f = build_frame_2d(diag2(1, 4), pose, {Vec<2>(1, 1), Vec<2>(2, 2), Vec<2>(1, -1)}, Vec<2>(5, 0));
  EXPECT_NEAR((f.z_pu - Vec<2>(1, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((f.z_ou - Vec<2>(0, -1)).norm(), 0.0, 1e-12);
  EXPECT_EQ(f.above, 2);
  EXPECT_EQ(f.below, 1);
}

TEST(BuildFrame2D, TieTakesAnticlockwise) {
  const auto f = build_frame_2d(diag2(1, 4), Pose<2>{}, {}, Vec<2>(5, 0));
  EXPECT_NEAR((f.z_ou - Vec<2>(0, 1)).norm(), 0.0, 1e-12);
}

TEST(BuildFrame2D, PrincipalAxisPointsAtGoal) {
  const auto f = build_frame_2d(diag2(1, 4), Pose<2>{}, {}, Vec<2>(-5, 1));
  EXPECT_GE(f.z_pu.dot(Vec<2>(-5, 1)), 0.0);
  EXPECT_NEAR((f.z_pu - Vec<2>(-1, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(f.z_pu.dot(f.z_ou), 0.0, 1e-12);
}

TEST(BuildFrame2D, SidesUseAgentFrame) {
  Pose<2> pose;
  pose.frame = frame_from_heading(Vec<2>(0, 1));  // local +y is world -x
  const auto f = build_frame_2d(diag2(1, 4), pose, {Vec<2>(-1, 1), Vec<2>(-2, 1)}, Vec<2>(5, 0));
  EXPECT_EQ(f.above, 2);
}

TEST(BuildFrame2D, RoundDiskUsesGoalBearing) {
  const auto f = build_frame_2d(diag2(2, 2), Pose<2>{}, {}, Vec<2>(3, 4));
  EXPECT_NEAR((f.z_pu - Vec<2>(0.6, 0.8)).norm(), 0.0, 1e-12);
}

TEST(BuildFrame3D, SingleObstacleOnPositiveSide) {
  Ellipsoid<3> e;
  e.P = Vec<3>(1, 2, 3).asDiagonal();
  const auto f = build_frame_3d(e, {Vec<3>(0, 2, 0)}, Vec<3>(5, 0, 0));
  EXPECT_EQ(f.s1, -1);
  EXPECT_LT(f.z1_ou.dot(Vec<3>(0, 2, 0)), 0.0);
  EXPECT_DOUBLE_EQ(f.lambda_min, 1.0);
  EXPECT_DOUBLE_EQ(f.lambda1, 2.0);
  EXPECT_DOUBLE_EQ(f.lambda2, 3.0);
}

TEST(BuildFrame3D, NoObstaclesTakeOtherwiseBranch) {
  Ellipsoid<3> e;
  e.P = Vec<3>(1, 2, 3).asDiagonal();
  const auto f = build_frame_3d(e, {}, Vec<3>(5, 0, 0));
  EXPECT_EQ(f.s1, -1);
  EXPECT_EQ(f.s2, -1);
}

TEST(BuildFrame3D, MirroredCloudFlipsSign) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Ellipsoid<3> e;
  e.P = Vec<3>(1, 2, 3).asDiagonal();
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec<3>> cloud, mirror;
    const int k = 1 + 2 * (trial % 5);
    for (int i = 0; i < k; ++i) {
      Vec<3> p(u(rng), u(rng), u(rng));
      if (std::abs(p.y()) < 1e-3) p.y() = 0.5;
      cloud.push_back(p);
      mirror.push_back(Vec<3>(p.x(), -p.y(), p.z()));
    }
    const auto a = build_frame_3d(e, cloud, Vec<3>(5, 0, 0));
    const auto b = build_frame_3d(e, mirror, Vec<3>(5, 0, 0));
    int pos = 0, neg = 0;
    const Vec<3> axis = a.s1 * a.z1_ou;
    for (const auto& p : cloud) (p.dot(axis) > 0 ? pos : neg)++;
    EXPECT_EQ(a.s1, neg > pos ? 1 : -1);
    EXPECT_EQ(a.s1, -b.s1);
  }
}

TEST(BuildFrame3D, BasisIsRightHanded) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto e = random_ellipsoid<3>(rng);
    const auto f = build_frame_3d(e, {Vec<3>(1, 2, 3), Vec<3>(-1, 0, 2)}, Vec<3>(20, 0, 0));
    Mat<3> B;
    B << f.z_pu, f.s1 * f.z1_ou, f.s2 * f.z2_ou;
    EXPECT_TRUE(is_valid_frame<3>(B, 1e-9));
    EXPECT_GE(f.z_pu.dot(Vec<3>(20, 0, 0) - ellipsoid_center(e)), 0.0);
  }
}

TEST(SolveDirection2D, WorkedConstant) {
  DirectionFrame2D f;
  const Vec<2> z = solve_direction_2d(f, 1.0);
  EXPECT_NEAR(z.x(), 0.6180, 1e-3);
  EXPECT_NEAR(z.y(), 0.7862, 1e-3);
  EXPECT_NEAR(z.x(), (std::sqrt(5.0) - 1.0) / 2.0, 1e-6);
}

TEST(SolveDirection2D, VanishingLogWeight) {
  DirectionFrame2D f;
  const Vec<2> z = solve_direction_2d(f, 1e-6);
  EXPECT_LE(std::acos(std::min(1.0, z.dot(f.z_pu))), 1e-2);
}

TEST(SolveDirection2D, MirrorSymmetry) {
  DirectionFrame2D f;
  f.z_pu = Vec<2>(std::cos(0.3), std::sin(0.3));
  f.z_ou = rotate_plus90(f.z_pu);
  DirectionFrame2D g = f;
  g.z_ou = -f.z_ou;
  const Vec<2> a = solve_direction_2d(f, 0.5), b = solve_direction_2d(g, 0.5);
  EXPECT_NEAR(a.dot(f.z_pu), b.dot(f.z_pu), 1e-7);
  EXPECT_NEAR(a.dot(f.z_ou), -b.dot(f.z_ou), 1e-7);
}

TEST(SolveDirection2D, RejectsBetaOutOfRange) {
  EXPECT_THROW(solve_direction_2d(DirectionFrame2D{}, 0.0), ContractViolation);
  EXPECT_THROW(solve_direction_2d(DirectionFrame2D{}, 1.5), ContractViolation);
}

TEST(SolveDirection2D, RandomFramesBeatGrid) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi), beta(0.05, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    DirectionFrame2D f;
    const double a = ang(rng);
    f.z_pu = Vec<2>(std::cos(a), std::sin(a));
    f.z_ou = trial % 2 ? rotate_plus90(f.z_pu) : rotate_minus90(f.z_pu);
    const double b = beta(rng);
    Solution info;
    const Vec<2> z = solve_direction_2d(f, b, &info);
    EXPECT_GE(z.norm(), 1.0 - 1e-7);
    EXPECT_LE(z.norm(), 1.0 + 1e-12);
    EXPECT_GT(z.dot(f.z_ou), 0.0);
    EXPECT_LE(info.objective_value, circle_min(direction_program_2d(f, b), 100000) + 1e-4);
  }
}

TEST(SolveDirection3D, WorkedConstant) {
  DirectionFrame3D f;
  const Vec<3> z = solve_direction_3d(f);
  EXPECT_NEAR(z.x(), 0.41421, 1e-3);
  EXPECT_NEAR(z.y(), 0.64359, 1e-3);
  EXPECT_NEAR(z.z(), 0.64359, 1e-3);
}

TEST(SolveDirection3D, HeavyEigenvalueShrinksComponent) {
  DirectionFrame3D balanced, heavy;
  heavy.lambda1 = 1e3;
  const Vec<3> a = solve_direction_3d(balanced), b = solve_direction_3d(heavy);
  EXPECT_LT(b.dot(heavy.z1_ou), a.dot(balanced.z1_ou));
  EXPECT_GT(b.dot(heavy.z1_ou), 0.0);
}

TEST(SolveDirection3D, PermutationSymmetry) {
  DirectionFrame3D f;
  f.lambda1 = 2.0;
  f.lambda2 = 5.0;
  DirectionFrame3D g = f;
  std::swap(g.z1_ou, g.z2_ou);
  std::swap(g.lambda1, g.lambda2);
  const Vec<3> a = solve_direction_3d(f), b = solve_direction_3d(g);
  EXPECT_NEAR(a.dot(f.z1_ou), b.dot(g.z2_ou), 1e-7);
  EXPECT_NEAR(a.dot(f.z2_ou), b.dot(g.z1_ou), 1e-7);
}

TEST(SolveDirection3D, RandomFramesBeatFibonacciGrid) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> lam(1.0, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Mat<3> B = frame_from_heading(random_unit<3>(rng));
    DirectionFrame3D f;
    f.z_pu = B.col(0);
    f.z1_ou = B.col(1);
    f.z2_ou = B.col(2);
    f.lambda_min = 1.0;
    f.lambda1 = lam(rng);
    f.lambda2 = lam(rng);
    Solution info;
    const Vec<3> z = solve_direction_3d(f, &info);
    EXPECT_GE(z.norm(), 1.0 - 1e-7);
    EXPECT_LE(z.norm(), 1.0 + 1e-12);
    EXPECT_LE(info.objective_value, fibonacci_min(direction_program_3d(f), 100000) + 1e-4);
  }
}

TEST(BoundaryReach, Examples) {
  EXPECT_NEAR(boundary_reach(Ellipsoid<2>{}, Vec<2>(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(boundary_reach(diag2(1, 4), Vec<2>(0, 1)), 0.5, 1e-15);
  Ellipsoid<2> bad;
  bad.r = 1.0;
  EXPECT_THROW(boundary_reach(bad, Vec<2>(1, 0)), DegenerateQuadric);
}

TEST(BoundaryReach, AgreesWithBisection) {
  std::mt19937 rng(51);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto e = random_ellipsoid<3>(rng);
    const Vec<3> z = random_unit<3>(rng);
    const double l = boundary_reach(e, z);
    EXPECT_LE(std::abs(e(ellipsoid_center(e) + l * z)), 1e-8);
    const double oracle = bisect_boundary(e, z);
    EXPECT_LE(std::abs(l - oracle), 1e-8 * oracle);
  }
}

TEST(MotionDirection, Examples) {
  const Ellipsoid<2> disk;
  EXPECT_NEAR((motion_direction<2>(Vec<2>(0, 0), disk, Vec<2>(1, 0), 1.0) - Vec<2>(1, 0)).norm(), 0.0, 1e-15);
  const Vec<2> z = motion_direction<2>(Vec<2>(0.5, 0), disk, Vec<2>(0, 1), 1.0);
  EXPECT_NEAR(z.x(), -0.4472, 1e-4);
  EXPECT_NEAR(z.y(), 0.8944, 1e-4);
  EXPECT_NEAR(z.norm(), 1.0, 1e-12);
  EXPECT_THROW(motion_direction<2>(Vec<2>(3, 0), disk, Vec<2>(0, 1), 1.0), ContractViolation);
}

TEST(StepLength, Examples) {
  const auto e = diag2(1, 1, -4);
  EXPECT_NEAR(max_step_inside<2>(e, {Vec<2>(0, 0)}, Vec<2>(0.6, 0.8)), std::sqrt(3.0), 1e-12);
  const double d = max_step_inside<2>(e, box_body(Vec<2>::Zero()), Vec<2>(1, 0));
  EXPECT_NEAR(d, std::sqrt(3.0 - 0.0625) - 0.5, 1e-12);
  EXPECT_NEAR(d, line_search_step<2>(e, box_body(Vec<2>::Zero()), Vec<2>(1, 0)), 1e-4);
  EXPECT_NEAR(d, 1.2139, 1e-4);
  EXPECT_DOUBLE_EQ(step_length<2>(e, box_body(Vec<2>::Zero()), Vec<2>(1, 0), 0.1), 0.1);
}

TEST(StepLength, PointAlreadyOutsideMarginStalls) {
  const auto e = diag2(1, 1, -1);
  EXPECT_EQ(max_step_inside<2>(e, {Vec<2>(0.5, 0)}, Vec<2>(1, 0)), 0.0);
}

TEST(StepLength, AgreesWithLineSearchAndConeProgram) {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto e = random_ellipsoid<2>(rng);
    const Vec<2> c = ellipsoid_center(e);
    e.r -= 10.0;  // room for the body
    const Vec<2> offset(0.3 * u(rng), 0.3 * u(rng));
    const auto body = box_body(c + offset);
    bool inside = true;
    for (const auto& p : body) inside = inside && e(p) <= -1.0;
    if (!inside) continue;
    ++checked;
    const Vec<2> z = random_unit<2>(rng);
    const double d = max_step_inside(e, body, z);
    EXPECT_NEAR(d, line_search_step(e, body, z), 1e-4);
    for (const auto& p : body) EXPECT_LE(e(p + d * z), -1.0 + 1e-6);
    if (trial % 10 == 0) {
      const auto sol = solve_cone(step_length_program(e, body, z, 1e3));
      EXPECT_NEAR(sol.x[0], d, 1e-6);
    }
  }
  EXPECT_GT(checked, 150);
}
