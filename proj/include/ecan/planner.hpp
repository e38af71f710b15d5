#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "ecan/agent.hpp"
#include "ecan/config.hpp"
#include "ecan/geometry.hpp"
#include "ecan/navigator.hpp"
#include "ecan/tunneler.hpp"
#include "ecan/world.hpp"

namespace ecan {

/// How far a point agent moves per step: toward the goal distance (the loop's
/// own rule) or up to the boundary target.
enum class PointStepRule { GoalDistance, BoundaryDistance };

enum class Outcome { GoalReached, NoFeasibleEllipsoid, Stalled, MaxSteps };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::GoalReached: return "GoalReached";
    case Outcome::NoFeasibleEllipsoid: return "NoFeasibleEllipsoid";
    case Outcome::Stalled: return "Stalled";
    case Outcome::MaxSteps: return "MaxSteps";
  }
  return "?";
}

inline const char* to_string(PointStepRule r) {
  return r == PointStepRule::GoalDistance ? "goal_distance" : "boundary_distance";
}

enum class Branch { Boundary, Goal };

inline const char* to_string(Branch b) { return b == Branch::Boundary ? "boundary" : "goal"; }

struct PlannerParams {
  double delta1 = 1.0;
  double alpha = 0.1;
  double beta = 1.0;
  double gamma = 5e-5;
  double epsilon = 1e-2;
  FovSpec fov;
  int max_steps = 500;
  PointStepRule point_step = PointStepRule::GoalDistance;
  int stall_steps = 3;
  double stall_length = 1e-9;

  bool operator==(const PlannerParams&) const = default;

  static PlannerParams defaults(int dim, bool finite_obstacles) {
    PlannerParams p;
    p.gamma = finite_obstacles ? 5e-4 : 5e-5;
    p.fov.range = 5.0;
    p.fov.phi = 40.0;
    p.fov.dphi = 0.5;
    if (dim == 2) {
      p.delta1 = 1.0;
      p.fov.theta = 80.0;
      p.fov.dr = 0.2;
      p.fov.dtheta = 1.0;
    } else {
      p.delta1 = 2.0;
      p.fov.theta = 40.0;
      p.fov.dr = 0.1;
      p.fov.dtheta = 0.5;
    }
    return p;
  }
};

template <int Dim>
struct StepRecord {
  int t = 0;
  Pose<Dim> pose;
  std::vector<Vec<Dim>> cloud;
  Vec<Dim> fit_goal = Vec<Dim>::Zero();
  Ellipsoid<Dim> ellipsoid;
  Vec<Dim> z_e = Vec<Dim>::Zero();
  double l_e = 0.0;
  Vec<Dim> z_n = Vec<Dim>::Zero();
  double l_n = 0.0;
  double turn = 1.0;  // fraction of the re-aiming rotation applied after the step
  Branch branch = Branch::Goal;
  double time_fit = 0.0;
  double time_dir = 0.0;
  double time_step = 0.0;
  bool step_program = false;  // finite-agent step bound evaluated
  int constraints = 0;
  int psd_blocks = 1;
  int agent_constraints = 0;
  double kkt = 0.0;
  double gap = 0.0;
  SolveStatus fit_status = SolveStatus::Optimal;
};

template <int Dim>
struct PlanTrace {
  std::vector<StepRecord<Dim>> steps;
  Outcome outcome = Outcome::MaxSteps;
  Pose<Dim> final_pose;
  Vec<Dim> goal = Vec<Dim>::Zero();
  double epsilon = 1e-2;
  double final_distance = 0.0;
  double phase1_slack = 0.0;
  std::string message;
};

namespace detail {

template <int Dim>
bool body_inside(const Ellipsoid<Dim>& e, const std::vector<Vec<Dim>>& pts, double tol) {
  for (const auto& p : pts) {
    if (e(p) > -1.0 + tol) return false;
  }
  return true;
}

/// Largest fraction of the re-aiming turn keeping the body inside e.
template <int Dim>
double safe_turn(const AgentModel<Dim>& agent, const Pose<Dim>& moved, const Vec<Dim>& z_n, const Ellipsoid<Dim>& e) {
  auto fits = [&](double f) {
    Pose<Dim> p = moved;
    p.frame = turn_toward(moved.frame, z_n, f);
    return body_inside(e, extremum_points(agent, p), 1e-9);
  };
  if (fits(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Goal used inside the fit. A finite body can never hold the goal on its
/// ellipsoid boundary near arrival, so the target is pushed past the goal.
template <int Dim>
Vec<Dim> fit_goal_for(const AgentModel<Dim>& agent, const Vec<Dim>& position, const Vec<Dim>& goal, double delta1) {
  if (agent.is_point()) return goal;
  const Vec<Dim> d = goal - position;
  const Vec<Dim> u = d.norm() > 1e-12 ? Vec<Dim>(d.normalized()) : Vec<Dim>(Vec<Dim>::Unit(0));
  return goal + (agent.circumradius() + delta1) * u;
}

template <int Dim>
using StepCallback = std::function<void(const StepRecord<Dim>&)>;

template <int Dim>
PlanTrace<Dim> plan(const Environment<Dim>& env, const AgentModel<Dim>& agent, const Pose<Dim>& start,
                    const Vec<Dim>& goal, const PlannerParams& params,
                    const std::type_identity_t<StepCallback<Dim>>& on_step = {}) {
  for (const auto& p : extremum_points(agent, start)) {
    if (occupancy(env, p)) throw ContractViolation("plan: start pose collides with an obstacle");
  }
  const FovGrid<Dim> grid = build_fov_grid<Dim>(params.fov);
  PlanTrace<Dim> trace;
  trace.goal = goal;
  trace.epsilon = params.epsilon;
  Pose<Dim> pose = start;
  int stalled = 0;
  bool done = false;

  for (int t = 0; t < params.max_steps && !done; ++t) {
    if ((pose.position - goal).norm() <= params.epsilon) {
      trace.outcome = Outcome::GoalReached;
      done = true;
      break;
    }
    StepRecord<Dim> rec;
    rec.t = t;
    rec.pose = pose;
    rec.cloud = sense(env, pose, grid);
    const auto body = extremum_points(agent, pose);
    rec.fit_goal = fit_goal_for(agent, pose.position, goal, params.delta1);

    FitInputs<Dim> in;
    in.agent_points = body;
    in.agent_center = pose.position;
    in.goal = rec.fit_goal;
    in.obstacles = rec.cloud;
    in.alpha = params.alpha;
    in.gamma = params.gamma;
    rec.constraints = constraint_count(in);
    rec.agent_constraints = static_cast<int>(body.size());
    FitResult<Dim> fitted;
    try {
      fitted = fit(in);
    } catch (const NoFeasibleEllipsoid& e) {
      trace.outcome = Outcome::NoFeasibleEllipsoid;
      trace.phase1_slack = e.slack;
      trace.message = e.what();
      done = true;
      break;
    }
    const Ellipsoid<Dim>& e = fitted.ellipsoid;
    rec.ellipsoid = e;
    rec.time_fit = fitted.seconds;
    rec.kkt = fitted.solution.kkt_residual;
    rec.gap = fitted.solution.gap_estimate;
    rec.fit_status = fitted.solution.status;

    const Vec<Dim> to_goal = goal - pose.position;
    const double goal_dist = to_goal.norm();
    const Vec<Dim> goal_dir = to_goal / goal_dist;
    Vec<Dim> boundary_point = goal;
    if (goal_on_boundary(e, rec.fit_goal, params.epsilon)) {
      rec.branch = Branch::Goal;
      rec.z_n = goal_dir;
    } else {
      rec.branch = Branch::Boundary;
      const auto t0 = std::chrono::steady_clock::now();
      if constexpr (Dim == 2) {
        rec.z_e = solve_direction_2d(build_frame_2d(e, pose, rec.cloud, goal), params.beta);
      } else {
        rec.z_e = solve_direction_3d(build_frame_3d(e, rec.cloud, goal));
      }
      rec.time_dir = detail::seconds_since(t0);
      rec.l_e = boundary_reach(e, rec.z_e);
      boundary_point = boundary_target(e, rec.z_e, rec.l_e);
      try {
        rec.z_n = motion_direction(pose.position, e, rec.z_e, rec.l_e);
      } catch (const AgentAtBoundaryTarget&) {
        rec.z_n = goal_dir;
      }
    }

    if (agent.is_point()) {
      const double reach = params.point_step == PointStepRule::GoalDistance || rec.branch == Branch::Goal
                               ? goal_dist
                               : (boundary_point - pose.position).norm();
      rec.l_n = std::min(params.delta1, reach);
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      rec.l_n = step_length(e, body, rec.z_n, params.delta1);
      if (rec.branch == Branch::Goal) rec.l_n = std::min(rec.l_n, goal_dist);
      rec.time_step = detail::seconds_since(t0);
      rec.step_program = true;
    }

    Pose<Dim> next = advance(pose, rec.z_n, rec.l_n, 0.0);
    rec.turn = 0.0;
    if (rec.l_n > 0.0) {
      rec.turn = agent.is_point() ? 1.0 : detail::safe_turn(agent, next, rec.z_n, e);
      next = advance(pose, rec.z_n, rec.l_n, rec.turn);
    }
    trace.steps.push_back(rec);
    if (on_step) on_step(trace.steps.back());
    pose = next;

    stalled = rec.l_n < params.stall_length ? stalled + 1 : 0;
    if (stalled >= params.stall_steps) {
      trace.outcome = Outcome::Stalled;
      done = true;
    }
  }
  if (!done) {
    trace.outcome = (pose.position - goal).norm() <= params.epsilon ? Outcome::GoalReached : Outcome::MaxSteps;
  }
  trace.final_pose = pose;
  trace.final_distance = (pose.position - goal).norm();
  return trace;
}

// ---------------------------------------------------------------------------
// audit

enum class AuditKind { FitPredicate, Collision, PoseConsistency, TunnelOverlap, Outcome };

inline const char* to_string(AuditKind k) {
  switch (k) {
    case AuditKind::FitPredicate: return "fit-predicate";
    case AuditKind::Collision: return "collision";
    case AuditKind::PoseConsistency: return "pose-consistency";
    case AuditKind::TunnelOverlap: return "tunnel-overlap";
    case AuditKind::Outcome: return "outcome";
  }
  return "?";
}

struct AuditViolation {
  int step = 0;
  AuditKind kind = AuditKind::FitPredicate;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditViolation> violations;
  std::size_t samples_checked = 0;

  bool ok() const { return violations.empty(); }
  std::size_t count(AuditKind k) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [k](const auto& v) { return v.kind == k; }));
  }
};

namespace detail {

template <int Dim>
double point_segment_distance(const Vec<Dim>& p, const Vec<Dim>& a, const Vec<Dim>& b) {
  const Vec<Dim> ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

/// True when world point p lies in the local bounding box of the body at pose.
template <int Dim>
bool inside_body_box(const AgentModel<Dim>& agent, const Pose<Dim>& pose, const Vec<Dim>& p) {
  Vec<Dim> lo = agent.offsets.front(), hi = agent.offsets.front();
  for (const auto& o : agent.offsets) {
    lo = lo.cwiseMin(o);
    hi = hi.cwiseMax(o);
  }
  const Vec<Dim> v = global_to_local(pose, p);
  return ((v - lo).array() >= 0.0).all() && ((hi - v).array() >= 0.0).all();
}

}  // namespace detail

/// Re-derives safety facts from the stored trace alone: (a) each ellipsoid
/// against its stored cloud, (b) body samples every `spacing` along each step
/// are collision-free, (c) poses follow from z_n, l_n and the turn fraction,
/// (d) finite bodies land inside the previous ellipsoid.
template <int Dim>
AuditReport validate_trace(const Environment<Dim>& env, const AgentModel<Dim>& agent, const PlanTrace<Dim>& trace,
                           double spacing = 1e-2) {
  AuditReport rep;
  auto flag = [&](int t, AuditKind k, const std::string& msg) { rep.violations.push_back({t, k, msg}); };
  const auto& steps = trace.steps;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    const int t = s.t;
    const auto body = extremum_points(agent, s.pose);

    const auto pr = check_fit_predicate(s.ellipsoid, body, s.fit_goal, s.cloud);
    if (!pr.ok) {
      std::ostringstream os;
      os << "agent " << pr.worst_agent << " goal " << pr.goal_value << " obstacle " << pr.worst_obstacle
         << " lambda_min " << pr.lambda_min;
      flag(t, AuditKind::FitPredicate, os.str());
    }
    if (static_cast<int>(body.size()) != s.agent_constraints || s.constraints != s.agent_constraints + 1 + static_cast<int>(s.cloud.size())) {
      flag(t, AuditKind::FitPredicate, "constraint count does not match m + 1 + k");
    }

    const Pose<Dim> expected = advance(s.pose, s.z_n, s.l_n, s.turn);
    const Pose<Dim>& actual = i + 1 < steps.size() ? steps[i + 1].pose : trace.final_pose;
    const double scale = 1.0 + s.pose.position.norm();
    if ((expected.position - actual.position).norm() > 1e-12 * scale ||
        (expected.frame - actual.frame).cwiseAbs().maxCoeff() > 1e-9) {
      flag(t, AuditKind::PoseConsistency, "next pose does not follow from the recorded step");
    }
    if (std::abs(s.z_n.norm() - 1.0) > 1e-9 || s.l_n < 0.0) flag(t, AuditKind::PoseConsistency, "bad step vector");

    const int n = std::max(1, static_cast<int>(std::ceil(s.l_n / spacing)));
    for (int k = 0; k <= n; ++k) {
      const double frac = static_cast<double>(k) / n;
      Pose<Dim> p;
      p.position = s.pose.position + frac * s.l_n * s.z_n;
      p.frame = s.l_n > 0.0 ? turn_toward(s.pose.frame, s.z_n, frac * s.turn) : s.pose.frame;
      for (const auto& b : extremum_points(agent, p)) {
        ++rep.samples_checked;
        if (occupancy(env, b)) {
          flag(t, AuditKind::Collision, "body point inside a finite obstacle");
          k = n + 1;
          break;
        }
      }
      if (!agent.is_point() && k <= n) {
        for (const auto& o : env.points) {
          if (detail::inside_body_box(agent, p, o)) {
            flag(t, AuditKind::Collision, "point obstacle inside the body");
            k = n + 1;
            break;
          }
        }
      }
    }
    if (agent.is_point()) {
      const Vec<Dim> a = s.pose.position, b = s.pose.position + s.l_n * s.z_n;
      for (const auto& o : env.points) {
        if (detail::point_segment_distance(o, a, b) <= 0.0) flag(t, AuditKind::Collision, "path touches a point obstacle");
      }
    } else if (s.l_n > 0.0) {
      for (const auto& b : extremum_points(agent, actual)) {
        if (s.ellipsoid(b) > -1.0 + Tolerances::predicate) {
          flag(t, AuditKind::TunnelOverlap, "body leaves the step ellipsoid");
          break;
        }
      }
    }
  }
  const double final_distance = (trace.final_pose.position - trace.goal).norm();
  if ((trace.outcome == Outcome::GoalReached) != (final_distance <= trace.epsilon)) {
    flag(static_cast<int>(steps.size()), AuditKind::Outcome, "outcome disagrees with the final distance");
  }
  return rep;
}

/// Smallest distance from the executed path (body samples) to any point obstacle.
template <int Dim>
double path_clearance(const Environment<Dim>& env, const PlanTrace<Dim>& trace) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : trace.steps) {
    const Vec<Dim> a = s.pose.position, b = a + s.l_n * s.z_n;
    for (const auto& o : env.points) best = std::min(best, detail::point_segment_distance(o, a, b));
  }
  return best;
}

}  // namespace ecan
