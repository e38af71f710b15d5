#pragma once

#include <cmath>
#include <vector>

#include "ecan/config.hpp"
#include "ecan/geometry.hpp"
#include "ecan/solver.hpp"

namespace ecan {

struct DirectionFrame2D {
  Vec<2> z_pu = Vec<2>::UnitX();
  Vec<2> z_ou = Vec<2>::UnitY();
  int above = 0;
  int below = 0;
};

struct DirectionFrame3D {
  Vec<3> z_pu = Vec<3>::UnitX();
  Vec<3> z1_ou = Vec<3>::UnitY();
  Vec<3> z2_ou = Vec<3>::UnitZ();
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda_min = 1.0;
  int s1 = -1;
  int s2 = -1;
};

inline Vec<2> rotate_plus90(const Vec<2>& v) { return Vec<2>(-v.y(), v.x()); }
inline Vec<2> rotate_minus90(const Vec<2>& v) { return Vec<2>(v.y(), -v.x()); }

namespace detail {

// Unit vector in span(basis columns) closest to `dir`; falls back to the first column.
template <int Dim>
Vec<Dim> project_onto_span(const Vec<Dim>& dir, const std::vector<Vec<Dim>>& basis) {
  Vec<Dim> p = Vec<Dim>::Zero();
  for (const auto& b : basis) p += b.dot(dir) * b;
  if (p.norm() <= 1e-12) return basis.front();
  return p.normalized();
}

}  // namespace detail

/// Principal axis toward the goal plus the side vector away from the busier
/// half-plane (half-planes split by the agent's local x-axis).
inline DirectionFrame2D build_frame_2d(const Ellipsoid<2>& e, const Pose<2>& pose, const std::vector<Vec<2>>& obstacles,
                                       const Vec<2>& goal) {
  const Spectrum<2> sp = eigen_symmetric<2>(e.P);
  const Vec<2> center = ellipsoid_center(e);
  const Vec<2> to_goal = goal - center;
  DirectionFrame2D f;
  if (detail::nearly_equal_eigen(sp.eigenvalues[0], sp.eigenvalues[1], sp.max())) {
    f.z_pu = to_goal.norm() > 1e-12 ? Vec<2>(to_goal.normalized()) : sp.vector(0);
  } else {
    f.z_pu = sp.vector(0);
  }
  if (f.z_pu.dot(to_goal) < 0.0) f.z_pu = -f.z_pu;
  for (const auto& o : obstacles) {
    const double y = global_to_local(pose, o).y();
    if (y > 0.0) ++f.above;
    else if (y < 0.0) ++f.below;
  }
  f.z_ou = f.above > f.below ? rotate_minus90(f.z_pu) : rotate_plus90(f.z_pu);
  return f;
}

/// Right-handed eigenbasis with the principal axis toward the goal; the other
/// axes are ordered by ascending eigenvalue and signed away from the side
/// holding more collision vectors.
inline DirectionFrame3D build_frame_3d(const Ellipsoid<3>& e, const std::vector<Vec<3>>& obstacles, const Vec<3>& goal) {
  const Spectrum<3> sp = eigen_symmetric<3>(e.P);
  const Vec<3> center = ellipsoid_center(e);
  const Vec<3> to_goal = goal - center;
  const double scale = sp.eigenvalues.cwiseAbs().maxCoeff();
  const bool eq01 = detail::nearly_equal_eigen(sp.eigenvalues[0], sp.eigenvalues[1], scale);
  const bool eq12 = detail::nearly_equal_eigen(sp.eigenvalues[1], sp.eigenvalues[2], scale);

  DirectionFrame3D f;
  Vec<3> a1, a2;
  if (eq01 && eq12) {
    f.z_pu = to_goal.norm() > 1e-12 ? Vec<3>(to_goal.normalized()) : sp.vector(0);
    if (f.z_pu.dot(to_goal) < 0.0) f.z_pu = -f.z_pu;
    const Mat<3> basis = frame_from_heading(f.z_pu);
    a1 = basis.col(1);
    a2 = basis.col(2);
  } else if (eq01) {
    f.z_pu = detail::project_onto_span<3>(to_goal, {sp.vector(0), sp.vector(1)});
    if (f.z_pu.dot(to_goal) < 0.0) f.z_pu = -f.z_pu;
    a2 = sp.vector(2);
    a1 = a2.cross(f.z_pu).normalized();
  } else {
    f.z_pu = sp.vector(0);
    if (f.z_pu.dot(to_goal) < 0.0) f.z_pu = -f.z_pu;
    a1 = sp.vector(1);
    a2 = sp.vector(2);
  }
  if (f.z_pu.cross(a1).dot(a2) < 0.0) a2 = -a2;

  f.lambda_min = sp.eigenvalues[0];
  f.lambda1 = sp.eigenvalues[1];
  f.lambda2 = sp.eigenvalues[2];

  auto sign_for = [&](const Vec<3>& axis) {
    int neg = 0, pos = 0;
    for (const auto& o : obstacles) {
      const double p = (o - center).dot(axis);
      if (p < 0.0) ++neg;
      else if (p > 0.0) ++pos;
    }
    return neg > pos ? 1 : -1;
  };
  f.s1 = sign_for(a1);
  f.s2 = sign_for(a2);
  f.z1_ou = f.s1 * a1;
  f.z2_ou = f.s2 * a2;
  return f;
}

inline BallProgram direction_program_2d(const DirectionFrame2D& f, double beta) {
  BallProgram b;
  b.linear = -VectorXd(f.z_pu);
  b.logs.push_back({beta, VectorXd(f.z_ou)});
  return b;
}

/// Weights are multiplied through by lambda_min, which leaves the minimiser unchanged.
inline BallProgram direction_program_3d(const DirectionFrame3D& f) {
  BallProgram b;
  b.linear = -VectorXd(f.z_pu);
  b.logs.push_back({f.lambda_min / f.lambda1, VectorXd(f.z1_ou)});
  b.logs.push_back({f.lambda_min / f.lambda2, VectorXd(f.z2_ou)});
  return b;
}

inline Vec<2> solve_direction_2d(const DirectionFrame2D& f, double beta, Solution* info = nullptr) {
  if (!(beta > 0.0 && beta <= 1.0)) throw ContractViolation("solve_direction_2d: beta must lie in (0, 1]");
  const BallProgram b = direction_program_2d(f, beta);
  Solution sol = solve_ball(b, VectorXd(0.5 * f.z_ou));
  Vec<2> z = sol.x;
  if (info) *info = std::move(sol);
  return z;
}

inline Vec<3> solve_direction_3d(const DirectionFrame3D& f, Solution* info = nullptr) {
  if (!(f.lambda1 > 0.0 && f.lambda2 > 0.0 && f.lambda_min > 0.0)) {
    throw ContractViolation("solve_direction_3d: eigenvalues must be positive");
  }
  const BallProgram b = direction_program_3d(f);
  Solution sol = solve_ball(b, VectorXd(0.4 * (f.z1_ou + f.z2_ou)));
  Vec<3> z = sol.x;
  if (info) *info = std::move(sol);
  return z;
}

/// Distance from the quadric centre to its zero level along unit z_e.
template <int Dim>
double boundary_reach(const Ellipsoid<Dim>& e, const Vec<Dim>& z_e) {
  const Vec<Dim> zc = ellipsoid_center(e);
  const double sigma = e(zc);
  if (!(sigma < 0.0)) throw DegenerateQuadric("boundary_reach: quadric has empty interior");
  const double delta = 2.0 * zc.dot(e.P * z_e) + z_e.dot(e.q);
  const double lam = z_e.dot(e.P * z_e);
  const double disc = std::sqrt(delta * delta - 4.0 * lam * sigma);
  return delta <= 0.0 ? (-delta + disc) / (2.0 * lam) : (-2.0 * sigma) / (delta + disc);
}

template <int Dim>
Vec<Dim> boundary_target(const Ellipsoid<Dim>& e, const Vec<Dim>& z_e, double l_e) {
  return ellipsoid_center(e) + l_e * z_e;
}

template <int Dim>
Vec<Dim> motion_direction(const Vec<Dim>& z_a, const Ellipsoid<Dim>& e, const Vec<Dim>& z_e, double l_e) {
  if (!(e(z_a) < 0.0)) throw ContractViolation("motion_direction: agent is not inside the ellipsoid");
  const Vec<Dim> d = boundary_target(e, z_e, l_e) - z_a;
  if (d.norm() < 1e-12) throw AgentAtBoundaryTarget("motion_direction: agent sits on the boundary target");
  return d.normalized();
}

/// Largest delta >= 0 keeping every body point at Psi <= -1 when translated by delta*z_n.
template <int Dim>
double max_step_inside(const Ellipsoid<Dim>& e, const std::vector<Vec<Dim>>& body_points, const Vec<Dim>& z_n) {
  const double lam = z_n.dot(e.P * z_n);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : body_points) {
    const double c = e(p) + 1.0;
    if (c > 0.0) return 0.0;
    const double b = (2.0 * (e.P * p) + e.q).dot(z_n);
    const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * lam * c));
    const double root = b >= 0.0 ? (-2.0 * c) / (b + disc) : (-b + disc) / (2.0 * lam);
    best = std::min(best, std::max(0.0, root));
  }
  return best;
}

template <int Dim>
double step_length(const Ellipsoid<Dim>& e, const std::vector<Vec<Dim>>& body_points, const Vec<Dim>& z_n,
                   double delta1) {
  return std::min(delta1, max_step_inside(e, body_points, z_n));
}

/// The same step bound as a one-variable cone program (maximise delta under
/// one quadratic inequality per body point).
template <int Dim>
ConeProgram step_length_program(const Ellipsoid<Dim>& e, const std::vector<Vec<Dim>>& body_points, const Vec<Dim>& z_n,
                                double delta1) {
  ConeProgram prog(1);
  prog.objective = SmoothObjective::linear(VectorXd::Constant(1, -1.0));
  const double lam = z_n.dot(e.P * z_n);
  for (const auto& p : body_points) {
    QuadraticInequality q;
    q.Q = MatrixXd::Constant(1, 1, lam);
    q.a = VectorXd::Constant(1, (2.0 * (e.P * p) + e.q).dot(z_n));
    q.b = -1.0 - e(p);
    prog.quadratic.push_back(std::move(q));
  }
  prog.add_linear(VectorXd::Constant(1, 1.0), delta1);
  prog.add_linear(VectorXd::Constant(1, -1.0), 0.0);
  return prog;
}

}  // namespace ecan
