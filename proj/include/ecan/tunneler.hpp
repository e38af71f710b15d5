#pragma once

#include <algorithm>
#include <chrono>
#include <vector>

#include "ecan/config.hpp"
#include "ecan/geometry.hpp"
#include "ecan/solver.hpp"

namespace ecan {

template <int Dim>
struct FitInputs {
  std::vector<Vec<Dim>> agent_points;
  Vec<Dim> goal = Vec<Dim>::Zero();
  std::vector<Vec<Dim>> obstacles;
  double alpha = 0.1;
  double gamma = 5e-5;
  Vec<Dim> agent_center = Vec<Dim>::Zero();
};

/// Unknowns are (upper triangle of P, q, r) in coordinates centred on the agent
/// and divided by fit_scale(), so every row has entries of order one.
template <int Dim>
constexpr int quadric_unknowns() {
  return Dim * (Dim + 1) / 2 + Dim + 1;
}

/// Trace and norm weight that keeps the fit bounded along directions the data
/// leaves free (e.g. all points collinear).
inline constexpr double kFitRegularizer = 1e-6;

namespace detail {

/// Coefficients c with Psi(z) = c'x for the local unknown vector x.
template <int Dim>
VectorXd quadric_row(const Vec<Dim>& z) {
  VectorXd c(quadric_unknowns<Dim>());
  int k = 0;
  for (int i = 0; i < Dim; ++i) {
    for (int j = i; j < Dim; ++j) c[k++] = (i == j ? 1.0 : 2.0) * z[i] * z[j];
  }
  for (int i = 0; i < Dim; ++i) c[k++] = z[i];
  c[k] = 1.0;
  return c;
}

template <int Dim>
Ellipsoid<Dim> unpack_local(const VectorXd& x, double scale = 1.0) {
  Ellipsoid<Dim> e;
  int k = 0;
  for (int i = 0; i < Dim; ++i) {
    for (int j = i; j < Dim; ++j) {
      e.P(i, j) = e.P(j, i) = x[k++] / (scale * scale);
    }
  }
  for (int i = 0; i < Dim; ++i) e.q[i] = x[k++] / scale;
  e.r = x[k];
  return e;
}

/// Express a quadric written around `c` in world coordinates.
template <int Dim>
Ellipsoid<Dim> shift_to_world(const Ellipsoid<Dim>& local, const Vec<Dim>& c) {
  Ellipsoid<Dim> e;
  e.P = local.P;
  e.q = local.q - 2.0 * local.P * c;
  e.r = c.dot(local.P * c) - local.q.dot(c) + local.r;
  return e;
}

template <int Dim>
void validate_inputs(const FitInputs<Dim>& in) {
  if (in.agent_points.empty()) throw ContractViolation("fit: at least one agent point is required");
  if (!(in.alpha > 0.0 && in.alpha <= 1.0)) throw ContractViolation("fit: alpha must lie in (0, 1]");
  if (!(in.gamma > 0.0 && in.gamma <= 1e-3)) throw ContractViolation("fit: gamma must lie in (0, 1e-3]");
  for (const auto& o : in.obstacles) {
    for (const auto& a : in.agent_points) {
      if ((o - a).norm() <= Tolerances::coincidence) {
        throw ContractViolation("fit: obstacle point coincides with an agent point");
      }
    }
  }
}

template <int Dim>
double fit_scale(const FitInputs<Dim>& in) {
  double L = std::max(1.0, (in.goal - in.agent_center).norm());
  for (const auto& a : in.agent_points) L = std::max(L, (a - in.agent_center).norm());
  for (const auto& o : in.obstacles) L = std::max(L, (o - in.agent_center).norm());
  return L;
}

}  // namespace detail

/// Linear rows are ordered: agent points, goal, obstacles.
template <int Dim>
ConeProgram assemble_program(const FitInputs<Dim>& in) {
  detail::validate_inputs(in);
  constexpr int n = quadric_unknowns<Dim>();
  constexpr int np = Dim * (Dim + 1) / 2;
  const Vec<Dim> c = in.agent_center;
  const double L = detail::fit_scale(in);
  auto row = [&](const Vec<Dim>& z) { return detail::quadric_row<Dim>(Vec<Dim>((z - c) / L)); };
  ConeProgram prog(n);

  for (const auto& a : in.agent_points) prog.add_linear(row(a), -1.0);
  const VectorXd goal_row = row(in.goal);
  prog.add_linear(-goal_row, 0.0);
  VectorXd obstacle_sum = VectorXd::Zero(n);
  for (const auto& o : in.obstacles) {
    const VectorXd ro = row(o);
    prog.add_linear(-ro, -1.0);
    obstacle_sum += ro;
  }

  // f1 = |Psi(goal)|, f2 = Psi(center)^2 = r^2 locally, f3 = sum Psi(obstacle)
  prog.abs_terms.push_back({1.0, goal_row, 0.0});
  MatrixXd H = MatrixXd::Zero(n, n);
  H(n - 1, n - 1) = 2.0 * in.alpha;
  VectorXd lin = in.gamma * obstacle_sum;
  int k = 0;
  for (int i = 0; i < Dim; ++i) {
    for (int j = i; j < Dim; ++j, ++k) {
      if (i == j) lin[k] += kFitRegularizer / (L * L);
    }
  }
  for (int i = 0; i < Dim; ++i) H(np + i, np + i) += 2.0 * kFitRegularizer / (L * L);
  prog.objective = SmoothObjective::quadratic(H, lin);

  PsdBlock blk;
  blk.offset = MatrixXd::Zero(Dim, Dim);
  blk.lower = L * L;
  blk.coefficients.assign(n, MatrixXd::Zero(Dim, Dim));
  k = 0;
  for (int i = 0; i < Dim; ++i) {
    for (int j = i; j < Dim; ++j, ++k) {
      blk.coefficients[static_cast<std::size_t>(k)](i, j) = 1.0;
      blk.coefficients[static_cast<std::size_t>(k)](j, i) = 1.0;
    }
  }
  prog.psd = std::move(blk);
  return prog;
}

/// Number of point constraints plus the matrix block, as reported per step.
template <int Dim>
int constraint_count(const FitInputs<Dim>& in) {
  return static_cast<int>(in.agent_points.size() + 1 + in.obstacles.size());
}

template <int Dim>
struct FitResult {
  Ellipsoid<Dim> ellipsoid;
  Solution solution;
  int constraints = 0;
  int psd_blocks = 1;
  double seconds = 0.0;
};

template <int Dim>
FitResult<Dim> fit(const FitInputs<Dim>& in, const SolverSettings& settings = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const ConeProgram prog = assemble_program(in);
  FitResult<Dim> out;
  out.solution = solve_cone(prog, std::nullopt, settings);
  if (out.solution.status == SolveStatus::Infeasible) throw NoFeasibleEllipsoid(out.solution.phase1_slack);
  out.ellipsoid = detail::shift_to_world<Dim>(detail::unpack_local<Dim>(out.solution.x, detail::fit_scale(in)), in.agent_center);
  out.constraints = constraint_count(in);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

template <int Dim>
Ellipsoid<Dim> fit_ellipsoid(const FitInputs<Dim>& in) {
  return fit(in).ellipsoid;
}

inline bool goal_on_boundary(double psi_goal, double eps) { return std::abs(psi_goal) <= eps; }

template <int Dim>
bool goal_on_boundary(const Ellipsoid<Dim>& e, const Vec<Dim>& goal, double eps) {
  return goal_on_boundary(evaluate_quadric(e, goal), eps);
}

/// Violations of the fit predicate: agent points <= -1, goal >= 0,
/// obstacles >= 1, lambda_min(P) >= 1, each within `tol`.
struct PredicateReport {
  double worst_agent = -std::numeric_limits<double>::infinity();
  double goal_value = 0.0;
  double worst_obstacle = std::numeric_limits<double>::infinity();
  double lambda_min = 0.0;
  bool ok = true;
};

template <int Dim>
PredicateReport check_fit_predicate(const Ellipsoid<Dim>& e, const std::vector<Vec<Dim>>& agent_points,
                                    const Vec<Dim>& goal, const std::vector<Vec<Dim>>& obstacles,
                                    double tol = Tolerances::predicate) {
  PredicateReport r;
  for (const auto& a : agent_points) r.worst_agent = std::max(r.worst_agent, e(a));
  r.goal_value = e(goal);
  for (const auto& o : obstacles) r.worst_obstacle = std::min(r.worst_obstacle, e(o));
  r.lambda_min = eigen_symmetric<Dim>(e.P).min();
  r.ok = r.worst_agent <= -1.0 + tol && r.goal_value >= -tol && r.worst_obstacle >= 1.0 - tol &&
         r.lambda_min >= 1.0 - tol;
  return r;
}

}  // namespace ecan
