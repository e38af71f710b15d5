#include <cmath>

#include <gtest/gtest.h>

#include "ecan/planner.hpp"

using namespace ecan;

namespace {

Environment<2> two_obstacles() {
  Environment<2> env;
  env.points = {Vec<2>(6, 0), Vec<2>(7, 1)};
  return env;
}

PlanTrace<2> run_two_obstacles(const AgentModel<2>& agent = AgentModel<2>::point()) {
  return plan(two_obstacles(), agent, Pose<2>{}, Vec<2>(9, 0), PlannerParams::defaults(2, false));
}

// box of point obstacles tighter than the agent; goal outside
Environment<2> enclosure() {
  Environment<2> env;
  for (int i = 0; i <= 24; ++i) {
    const double x = -0.6 + 0.05 * i;
    env.points.push_back(Vec<2>(x, 0.35));
    env.points.push_back(Vec<2>(x, -0.35));
  }
  for (int i = 1; i < 14; ++i) {
    const double y = -0.35 + 0.05 * i;
    env.points.push_back(Vec<2>(0.6, y));
    env.points.push_back(Vec<2>(-0.6, y));
  }
  return env;
}

double seg_dist(const Vec<2>& p, const Vec<2>& a, const Vec<2>& b) {
  const Vec<2> ab = b - a;
  const double s = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - a - s * ab).norm();
}

}  // namespace

TEST(Plan, TwoObstaclesReachGoal) {
  const auto tr = run_two_obstacles();
  ASSERT_EQ(tr.outcome, Outcome::GoalReached);
  EXPECT_LE(tr.final_distance, 1e-2);

  bool boundary_after_sighting = false;
  for (const auto& s : tr.steps) {
    const bool sees = std::any_of(s.cloud.begin(), s.cloud.end(), [](const Vec<2>& p) { return p == Vec<2>(6, 0); });
    boundary_after_sighting = boundary_after_sighting || (sees && s.branch == Branch::Boundary);
    // predicate evaluated directly on the stored quadric
    const auto& e = s.ellipsoid;
    EXPECT_LE(e(s.pose.position), -1.0 + 1e-6);
    EXPECT_GE(e(Vec<2>(9, 0)), -1e-6);
    for (const auto& o : s.cloud) EXPECT_GE(e(o), 1.0 - 1e-6);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat<2>>(e.P).eigenvalues().minCoeff(), 1.0 - 1e-6);
  }
  EXPECT_TRUE(boundary_after_sighting);

  double clearance = 1e9;
  for (const auto& s : tr.steps)
    for (const auto& o : two_obstacles().points)
      clearance = std::min(clearance, seg_dist(o, s.pose.position, s.pose.position + s.l_n * s.z_n));
  EXPECT_GT(clearance, 0.0);
  EXPECT_DOUBLE_EQ(clearance, path_clearance(two_obstacles(), tr));
  EXPECT_TRUE(validate_trace(two_obstacles(), AgentModel<2>::point(), tr).ok());
}

TEST(Plan, SemiAxesStayBounded) {
  for (const auto& s : run_two_obstacles().steps) {
    const auto& e = s.ellipsoid;
    const Vec<2> c = ellipsoid_center(e);
    const double k = -e(c);
    const double lmin = Eigen::SelfAdjointEigenSolver<Mat<2>>(e.P).eigenvalues().minCoeff();
    EXPECT_LT(std::sqrt(k / lmin), 100.0);
  }
}

TEST(Plan, StepsChainExactly) {
  const auto tr = run_two_obstacles();
  for (std::size_t i = 0; i + 1 < tr.steps.size(); ++i) {
    const auto& s = tr.steps[i];
    EXPECT_LE((tr.steps[i + 1].pose.position - (s.pose.position + s.l_n * s.z_n)).norm(), 1e-12);
  }
}

TEST(Plan, PointAgentHasOneAgentConstraint) {
  for (const auto& s : run_two_obstacles().steps) {
    EXPECT_EQ(s.agent_constraints, 1);
    EXPECT_EQ(s.constraints, 1 + 1 + static_cast<int>(s.cloud.size()));
  }
}

TEST(Plan, EmptyWorldIsNearlyStraight) {
  const Vec<2> goal(3, 4);
  const auto p = PlannerParams::defaults(2, false);
  const auto tr = plan(Environment<2>{}, AgentModel<2>::point(), Pose<2>{}, goal, p);
  ASSERT_EQ(tr.outcome, Outcome::GoalReached);
  EXPECT_LE(tr.steps.size(), static_cast<std::size_t>(std::ceil(goal.norm() / p.delta1)) + 2);
  int checked = 0;
  for (const auto& s : tr.steps) {
    if (std::abs(s.ellipsoid(goal)) > p.epsilon) continue;
    const Vec<2> bearing = (goal - s.pose.position).normalized();
    EXPECT_LE(std::acos(std::clamp(bearing.dot(s.z_n), -1.0, 1.0)), 1e-3);
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(Plan, EnclosedAgentHasNoEllipsoid) {
  const auto tr = plan(enclosure(), AgentModel<2>::box(1.0, 0.5), Pose<2>{}, Vec<2>(5, 0),
                       PlannerParams::defaults(2, false));
  EXPECT_EQ(tr.outcome, Outcome::NoFeasibleEllipsoid);
  EXPECT_GT(tr.phase1_slack, 1e-6);
  EXPECT_TRUE(tr.steps.empty());
}

TEST(Plan, WalkthroughUsesTwoEllipses) {
  auto p = PlannerParams::defaults(2, false);
  p.delta1 = 10.0;
  p.point_step = PointStepRule::BoundaryDistance;
  Pose<2> start;
  start.position = Vec<2>(2, 0);
  const auto tr = plan(two_obstacles(), AgentModel<2>::point(), start, Vec<2>(9, 0), p);
  ASSERT_EQ(tr.outcome, Outcome::GoalReached);
  ASSERT_EQ(tr.steps.size(), 2u);
  EXPECT_EQ(tr.steps[0].branch, Branch::Boundary);
  EXPECT_EQ(tr.steps[1].branch, Branch::Goal);
  // first step lands on the boundary target
  const auto& s0 = tr.steps[0];
  EXPECT_NEAR(s0.ellipsoid(tr.steps[1].pose.position), 0.0, 1e-6);
  EXPECT_TRUE(validate_trace(two_obstacles(), AgentModel<2>::point(), tr).ok());
}

TEST(Plan, BoxAgentStaysInsideTunnel) {
  const auto agent = AgentModel<2>::box(0.6, 0.3);
  const auto tr = run_two_obstacles(agent);
  ASSERT_EQ(tr.outcome, Outcome::GoalReached);
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    const auto& s = tr.steps[i];
    EXPECT_EQ(s.agent_constraints, 4);
    EXPECT_EQ(s.constraints, 4 + 1 + static_cast<int>(s.cloud.size()));
    const Pose<2>& next = i + 1 < tr.steps.size() ? tr.steps[i + 1].pose : tr.final_pose;
    for (const auto& b : extremum_points(agent, next)) EXPECT_LE(s.ellipsoid(b), -1.0 + 1e-6);
  }
  EXPECT_TRUE(validate_trace(two_obstacles(), agent, tr).ok());
}

TEST(Plan, PlaneAgentInEmptySpace) {
  const auto agent = AgentModel<3>::plane3d();
  auto p = PlannerParams::defaults(3, false);
  const auto tr = plan(Environment<3>{}, agent, Pose<3>{}, Vec<3>(6, 3, 2), p);
  ASSERT_EQ(tr.outcome, Outcome::GoalReached);
  for (const auto& s : tr.steps) EXPECT_EQ(s.agent_constraints, 33);
  EXPECT_TRUE(validate_trace(Environment<3>{}, agent, tr).ok());
}

TEST(Plan, MaxStepsOutcome) {
  auto p = PlannerParams::defaults(2, false);
  p.max_steps = 3;
  const auto tr = plan(two_obstacles(), AgentModel<2>::point(), Pose<2>{}, Vec<2>(9, 0), p);
  EXPECT_EQ(tr.outcome, Outcome::MaxSteps);
  EXPECT_EQ(tr.steps.size(), 3u);
  EXPECT_TRUE(validate_trace(two_obstacles(), AgentModel<2>::point(), tr).ok());
}

TEST(Plan, StartInsideObstacleThrows) {
  Environment<2> env;
  env.shapes.push_back(ConvexShape<2>::box(Vec<2>(-1, -1), Vec<2>(1, 1)));
  EXPECT_THROW(plan(env, AgentModel<2>::point(), Pose<2>{}, Vec<2>(5, 0), PlannerParams::defaults(2, true)),
               ContractViolation);
}

TEST(Plan, Deterministic) {
  const auto a = run_two_obstacles(), b = run_two_obstacles();
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) EXPECT_EQ(a.steps[i].pose.position, b.steps[i].pose.position);
}

TEST(Audit, ObstacleInsideEllipsoidIsFlagged) {
  auto tr = run_two_obstacles();
  auto& s = tr.steps[2];
  s.cloud.push_back(ellipsoid_center(s.ellipsoid));
  s.constraints += 1;
  const auto rep = validate_trace(two_obstacles(), AgentModel<2>::point(), tr);
  EXPECT_GE(rep.count(AuditKind::FitPredicate), 1u);
}

TEST(Audit, TeleportIsFlagged) {
  auto tr = run_two_obstacles();
  tr.steps[3].pose.position += Vec<2>(0.0, 0.5);
  const auto rep = validate_trace(two_obstacles(), AgentModel<2>::point(), tr);
  EXPECT_GE(rep.count(AuditKind::PoseConsistency), 1u);
}

TEST(Audit, WrongOutcomeIsFlagged) {
  auto tr = run_two_obstacles();
  tr.final_pose.position = Vec<2>(0, 0);
  EXPECT_GE(validate_trace(two_obstacles(), AgentModel<2>::point(), tr).count(AuditKind::Outcome), 1u);
}

TEST(Audit, CollisionIsFlagged) {
  auto tr = run_two_obstacles();
  Environment<2> env = two_obstacles();
  env.shapes.push_back(ConvexShape<2>::box(Vec<2>(2.2, -0.5), Vec<2>(2.4, 0.5)));  // across the path
  EXPECT_GE(validate_trace(env, AgentModel<2>::point(), tr).count(AuditKind::Collision), 1u);
}

TEST(Audit, BodyOutsideEllipsoidIsFlagged) {
  const auto agent = AgentModel<2>::box(0.6, 0.3);
  auto tr = run_two_obstacles(agent);
  tr.steps[1].ellipsoid.r += 50.0;  // shrink to nothing
  const auto rep = validate_trace(two_obstacles(), agent, tr);
  EXPECT_GE(rep.count(AuditKind::TunnelOverlap), 1u);
}
