#pragma once

// Small dense log-barrier interior-point engine.
//
// Two problem shapes are supported:
//   ConeProgram  - smooth convex objective, linear and convex quadratic
//                  inequalities, at most one affine matrix inequality
//                  S(x) >= lower*I, and weighted |c'x + e| terms that are
//                  lifted to epigraph variables before solving.
//   BallProgram  - c'z - sum_i w_i log(d_i'z) over the unit ball.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ecan/config.hpp"

namespace ecan {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class SolveStatus { Optimal, Infeasible, MaxIterations };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::MaxIterations: return "MaxIterations";
  }
  return "?";
}

struct SolverSettings {
  double mu0 = 1.0;
  double kappa = 10.0;
  double newton_tol = 1e-9;
  double gap_tol = 5e-8;
  int max_newton_per_outer = 60;
  int max_outer = 40;
  double psd_margin = 1e-9;
  double infeasible_slack = 1e-6;
  double phase1_proximal = 1e-8;
  double phase1_target = -0.5;
};

struct SmoothObjective {
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
  std::function<MatrixXd(const VectorXd&)> hessian;

  /// 0.5 x'Hx + c'x + c0
  static SmoothObjective quadratic(MatrixXd H, VectorXd c, double c0 = 0.0) {
    SmoothObjective f;
    f.value = [H, c, c0](const VectorXd& x) { return 0.5 * x.dot(H * x) + c.dot(x) + c0; };
    f.gradient = [H, c](const VectorXd& x) -> VectorXd { return H * x + c; };
    f.hessian = [H](const VectorXd&) -> MatrixXd { return H; };
    return f;
  }

  static SmoothObjective linear(VectorXd c) {
    const auto n = c.size();
    return quadratic(MatrixXd::Zero(n, n), std::move(c));
  }
};

/// x'Qx + a'x <= b with Q positive semidefinite.
struct QuadraticInequality {
  MatrixXd Q;
  VectorXd a;
  double b = 0.0;

  double value(const VectorXd& x) const { return x.dot(Q * x) + a.dot(x) - b; }
  VectorXd gradient(const VectorXd& x) const { return 2.0 * (Q * x) + a; }
};

/// Affine matrix inequality offset + sum_k x_k coefficients[k] >= lower*I.
struct PsdBlock {
  MatrixXd offset;
  std::vector<MatrixXd> coefficients;
  double lower = 1.0;

  MatrixXd at(const VectorXd& x) const {
    MatrixXd S = offset;
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
      if (x[static_cast<Eigen::Index>(k)] != 0.0) S += x[static_cast<Eigen::Index>(k)] * coefficients[k];
    }
    return S;
  }
  Eigen::Index dim() const { return offset.rows(); }
};

/// weight * |c'x + e|
struct AbsTerm {
  double weight = 1.0;
  VectorXd c;
  double e = 0.0;
};

struct ConeProgram {
  int n = 0;
  SmoothObjective objective;
  MatrixXd A;  // linear inequalities A x <= b, one row each
  VectorXd b;
  std::vector<QuadraticInequality> quadratic;
  std::optional<PsdBlock> psd;
  std::vector<AbsTerm> abs_terms;

  explicit ConeProgram(int n_vars = 0) : n(n_vars), A(0, n_vars), b(0) {
    objective = SmoothObjective::linear(VectorXd::Zero(n_vars));
  }

  void add_linear(const VectorXd& a, double rhs) {
    A.conservativeResize(A.rows() + 1, n);
    b.conservativeResize(b.size() + 1);
    A.row(A.rows() - 1) = a.transpose();
    b[b.size() - 1] = rhs;
  }

  int linear_count() const { return static_cast<int>(A.rows()); }

  double objective_value(const VectorXd& x) const {
    double v = objective.value(x);
    for (const auto& t : abs_terms) v += t.weight * std::abs(t.c.dot(x) + t.e);
    return v;
  }
};

struct LogTerm {
  double weight = 1.0;
  VectorXd direction;
};

/// linear'z - sum_i w_i log(d_i'z) subject to ||z|| <= 1.
struct BallProgram {
  VectorXd linear;
  std::vector<LogTerm> logs;

  int dim() const { return static_cast<int>(linear.size()); }

  bool in_domain(const VectorXd& z) const {
    for (const auto& l : logs) {
      if (!(l.direction.dot(z) > 0.0)) return false;
    }
    return true;
  }
  double value(const VectorXd& z) const {
    double v = linear.dot(z);
    for (const auto& l : logs) v -= l.weight * std::log(l.direction.dot(z));
    return v;
  }
  VectorXd gradient(const VectorXd& z) const {
    VectorXd g = linear;
    for (const auto& l : logs) g -= (l.weight / l.direction.dot(z)) * l.direction;
    return g;
  }
  MatrixXd hessian(const VectorXd& z) const {
    MatrixXd H = MatrixXd::Zero(dim(), dim());
    for (const auto& l : logs) {
      const double s = l.direction.dot(z);
      H += (l.weight / (s * s)) * l.direction * l.direction.transpose();
    }
    return H;
  }
};

struct Solution {
  VectorXd x;
  double objective_value = std::numeric_limits<double>::quiet_NaN();
  SolveStatus status = SolveStatus::MaxIterations;
  double kkt_residual = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;  // Newton steps, phase I included
  int outer_iterations = 0;
  double wall_time = 0.0;
  double gap_estimate = std::numeric_limits<double>::infinity();
  double phase1_slack = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> objective_history;  // objective at each centered outer iterate
};

namespace detail {

/// A ConeProgram with abs terms lifted to epigraph variables.
struct LiftedProgram {
  int n = 0;
  SmoothObjective objective;
  MatrixXd A;
  VectorXd b;
  std::vector<QuadraticInequality> quadratic;
  std::optional<PsdBlock> psd;
  double psd_floor = 1.0;  // lower * (1 - margin)

  double nu() const {
    return static_cast<double>(A.rows() + static_cast<Eigen::Index>(quadratic.size()) + (psd ? psd->dim() : 0));
  }

  /// b - A x with extended-precision accumulation; active rows cancel to ~1e-9.
  VectorXd slacks(const VectorXd& x) const {
    VectorXd s(A.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      long double acc = b[i];
      for (Eigen::Index j = 0; j < A.cols(); ++j) acc -= static_cast<long double>(A(i, j)) * x[j];
      s[i] = static_cast<double>(acc);
    }
    return s;
  }

  bool feasible(const VectorXd& x) const {
    if (A.rows() > 0 && (slacks(x).array() <= 0.0).any()) return false;
    for (const auto& q : quadratic) {
      if (!(q.value(x) < 0.0)) return false;
    }
    if (psd) {
      MatrixXd F = psd->at(x);
      F.diagonal().array() -= psd_floor;
      Eigen::LLT<MatrixXd> llt(F);
      if (llt.info() != Eigen::Success) return false;
      if (!(llt.matrixL().toDenseMatrix().diagonal().array() > 0.0).all()) return false;
    }
    return true;
  }

  double objective_value(const VectorXd& x) const { return objective.value(x); }

  /// Barrier value mu*f(x) + phi(x); +inf outside the domain.
  double barrier_value(const VectorXd& x, double mu) const {
    if (!feasible(x)) return std::numeric_limits<double>::infinity();
    double v = mu * objective.value(x);
    if (A.rows() > 0) v -= slacks(x).array().log().sum();
    for (const auto& q : quadratic) v -= std::log(-q.value(x));
    if (psd) {
      MatrixXd F = psd->at(x);
      F.diagonal().array() -= psd_floor;
      Eigen::LLT<MatrixXd> llt(F);
      v -= 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    }
    return v;
  }

  void assemble(const VectorXd& x, double mu, VectorXd& g, MatrixXd& H) const {
    g = mu * objective.gradient(x);
    H = mu * objective.hessian(x);
    if (A.rows() > 0) {
      const VectorXd inv_s = slacks(x).cwiseInverse();
      const MatrixXd As = inv_s.asDiagonal() * A;
      for (Eigen::Index k = 0; k < A.cols(); ++k) {
        long double acc = g[k];
        for (Eigen::Index i = 0; i < A.rows(); ++i) acc += static_cast<long double>(As(i, k));
        g[k] = static_cast<double>(acc);
      }
      H.noalias() += As.transpose() * As;
    }
    for (const auto& q : quadratic) {
      const double s = -q.value(x);
      const VectorXd dg = q.gradient(x);
      g += dg / s;
      H += (dg * dg.transpose()) / (s * s) + (2.0 / s) * q.Q;
    }
    if (psd) {
      MatrixXd F = psd->at(x);
      F.diagonal().array() -= psd_floor;
      const MatrixXd Finv = F.llt().solve(MatrixXd::Identity(F.rows(), F.cols()));
      std::vector<MatrixXd> M(static_cast<std::size_t>(n));
      std::vector<bool> nz(static_cast<std::size_t>(n), false);
      for (int k = 0; k < n; ++k) {
        const auto& Sk = psd->coefficients[static_cast<std::size_t>(k)];
        if (Sk.cwiseAbs().maxCoeff() == 0.0) continue;
        nz[static_cast<std::size_t>(k)] = true;
        M[static_cast<std::size_t>(k)] = Finv * Sk;
        g[k] -= M[static_cast<std::size_t>(k)].trace();
      }
      for (int k = 0; k < n; ++k) {
        if (!nz[static_cast<std::size_t>(k)]) continue;
        for (int l = k; l < n; ++l) {
          if (!nz[static_cast<std::size_t>(l)]) continue;
          const double h = (M[static_cast<std::size_t>(k)].cwiseProduct(M[static_cast<std::size_t>(l)].transpose())).sum();
          H(k, l) += h;
          if (l != k) H(l, k) += h;
        }
      }
    }
  }

  /// Largest constraint violation (positive means infeasible).
  double max_violation(const VectorXd& x) const {
    double v = -std::numeric_limits<double>::infinity();
    if (A.rows() > 0) v = std::max(v, (A * x - b).maxCoeff());
    for (const auto& q : quadratic) v = std::max(v, q.value(x));
    if (psd) {
      MatrixXd F = psd->at(x);
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(F, Eigen::EigenvaluesOnly);
      v = std::max(v, psd_floor - es.eigenvalues().minCoeff());
    }
    return v;
  }
};

inline LiftedProgram lift(const ConeProgram& prog, double psd_margin) {
  const int n0 = prog.n;
  const int nt = static_cast<int>(prog.abs_terms.size());
  const int n = n0 + nt;
  LiftedProgram out;
  out.n = n;

  const SmoothObjective base = prog.objective;
  VectorXd tw(nt);
  for (int j = 0; j < nt; ++j) tw[j] = prog.abs_terms[static_cast<std::size_t>(j)].weight;
  out.objective.value = [base, n0, nt, tw](const VectorXd& x) {
    return base.value(x.head(n0)) + (nt > 0 ? tw.dot(x.tail(nt)) : 0.0);
  };
  out.objective.gradient = [base, n0, nt, n, tw](const VectorXd& x) -> VectorXd {
    VectorXd g(n);
    g.head(n0) = base.gradient(x.head(n0));
    if (nt > 0) g.tail(nt) = tw;
    return g;
  };
  out.objective.hessian = [base, n0, n](const VectorXd& x) -> MatrixXd {
    MatrixXd H = MatrixXd::Zero(n, n);
    H.topLeftCorner(n0, n0) = base.hessian(x.head(n0));
    return H;
  };

  const Eigen::Index m0 = prog.A.rows();
  out.A = MatrixXd::Zero(m0 + 2 * nt, n);
  out.b = VectorXd::Zero(m0 + 2 * nt);
  if (m0 > 0) {
    out.A.topLeftCorner(m0, n0) = prog.A;
    out.b.head(m0) = prog.b;
  }
  for (int j = 0; j < nt; ++j) {
    const auto& t = prog.abs_terms[static_cast<std::size_t>(j)];
    // c'x + e - t <= 0 and -c'x - e - t <= 0
    out.A.block(m0 + 2 * j, 0, 1, n0) = t.c.transpose();
    out.A(m0 + 2 * j, n0 + j) = -1.0;
    out.b[m0 + 2 * j] = -t.e;
    out.A.block(m0 + 2 * j + 1, 0, 1, n0) = -t.c.transpose();
    out.A(m0 + 2 * j + 1, n0 + j) = -1.0;
    out.b[m0 + 2 * j + 1] = t.e;
  }
  for (const auto& q : prog.quadratic) {
    QuadraticInequality ql;
    ql.Q = MatrixXd::Zero(n, n);
    ql.Q.topLeftCorner(n0, n0) = q.Q;
    ql.a = VectorXd::Zero(n);
    ql.a.head(n0) = q.a;
    ql.b = q.b;
    out.quadratic.push_back(std::move(ql));
  }
  if (prog.psd) {
    PsdBlock p;
    p.offset = prog.psd->offset;
    p.lower = prog.psd->lower;
    p.coefficients = prog.psd->coefficients;
    p.coefficients.resize(static_cast<std::size_t>(n), MatrixXd::Zero(p.offset.rows(), p.offset.cols()));
    out.psd = std::move(p);
    out.psd_floor = prog.psd->lower * (1.0 - psd_margin);
  }
  return out;
}

inline VectorXd lift_point(const ConeProgram& prog, const VectorXd& x, double pad) {
  VectorXd y(prog.n + static_cast<Eigen::Index>(prog.abs_terms.size()));
  y.head(prog.n) = x;
  for (std::size_t j = 0; j < prog.abs_terms.size(); ++j) {
    const auto& t = prog.abs_terms[j];
    y[prog.n + static_cast<Eigen::Index>(j)] = std::abs(t.c.dot(x) + t.e) + pad;
  }
  return y;
}

/// Feasibility problem: minimize s (plus a small proximal term) subject to
/// every constraint relaxed by s and s >= -1.
inline LiftedProgram phase1(const LiftedProgram& p, const VectorXd& x_init, double proximal) {
  const int n = p.n + 1;
  LiftedProgram out;
  out.n = n;
  const VectorXd anchor = x_init;
  out.objective.value = [anchor, proximal, n](const VectorXd& x) {
    return x[n - 1] + proximal * (x.head(n - 1) - anchor).squaredNorm();
  };
  out.objective.gradient = [anchor, proximal, n](const VectorXd& x) -> VectorXd {
    VectorXd g(n);
    g.head(n - 1) = 2.0 * proximal * (x.head(n - 1) - anchor);
    g[n - 1] = 1.0;
    return g;
  };
  out.objective.hessian = [proximal, n](const VectorXd&) -> MatrixXd {
    MatrixXd H = MatrixXd::Zero(n, n);
    H.topLeftCorner(n - 1, n - 1).diagonal().setConstant(2.0 * proximal);
    return H;
  };
  const Eigen::Index m = p.A.rows();
  out.A = MatrixXd::Zero(m + 1, n);
  out.b = VectorXd::Zero(m + 1);
  if (m > 0) {
    out.A.topLeftCorner(m, p.n) = p.A;
    out.A.col(n - 1).head(m).setConstant(-1.0);
    out.b.head(m) = p.b;
  }
  out.A(m, n - 1) = -1.0;  // s >= -1
  out.b[m] = 1.0;
  for (const auto& q : p.quadratic) {
    QuadraticInequality ql;
    ql.Q = MatrixXd::Zero(n, n);
    ql.Q.topLeftCorner(p.n, p.n) = q.Q;
    ql.a = VectorXd::Zero(n);
    ql.a.head(p.n) = q.a;
    ql.a[n - 1] = -1.0;
    ql.b = q.b;
    out.quadratic.push_back(std::move(ql));
  }
  if (p.psd) {
    PsdBlock blk = *p.psd;
    blk.coefficients.push_back(MatrixXd::Identity(blk.dim(), blk.dim()));
    out.psd = std::move(blk);
    out.psd_floor = p.psd_floor;
  }
  return out;
}

/// Barrier model for BallProgram.
struct BallModel {
  const BallProgram* prog;

  double nu() const { return 1.0; }
  bool feasible(const VectorXd& z) const { return z.squaredNorm() < 1.0 && prog->in_domain(z); }
  double objective_value(const VectorXd& z) const { return prog->value(z); }
  double barrier_value(const VectorXd& z, double mu) const {
    if (!feasible(z)) return std::numeric_limits<double>::infinity();
    return mu * prog->value(z) - std::log(1.0 - z.squaredNorm());
  }
  void assemble(const VectorXd& z, double mu, VectorXd& g, MatrixXd& H) const {
    const double s = 1.0 - z.squaredNorm();
    g = mu * prog->gradient(z) + (2.0 / s) * z;
    H = mu * prog->hessian(z);
    H.diagonal().array() += 2.0 / s;
    H += (4.0 / (s * s)) * z * z.transpose();
  }
};

struct BarrierResult {
  VectorXd x;
  bool converged = false;
  bool stopped_early = false;
  int newton_steps = 0;
  int outer = 0;
  double mu = 0.0;
  std::vector<double> history;
};

enum class Centering { Centered, NotCentered, Stopped };

/// Newton centering of mu*f + phi with a feasibility-aware backtracking line
/// search. `stop` is consulted after every accepted step.
template <class Model>
Centering center(const Model& m, VectorXd& x, double mu, const SolverSettings& s, int& steps,
                 const std::function<bool(const VectorXd&)>& stop = {}) {
  VectorXd g;
  MatrixXd H;
  double prev_lambda2 = std::numeric_limits<double>::infinity();
  for (int it = 0; it < s.max_newton_per_outer; ++it) {
    m.assemble(x, mu, g, H);
    Eigen::LDLT<MatrixXd> ldlt(H);
    VectorXd dx = ldlt.solve(-g);
    if (!dx.allFinite() || ldlt.info() != Eigen::Success) {
      MatrixXd Hr = H;
      Hr.diagonal().array() += 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
      dx = Hr.ldlt().solve(-g);
      if (!dx.allFinite()) return Centering::NotCentered;
    }
    const double lambda2 = std::abs(g.dot(dx));
    if (0.5 * lambda2 <= s.newton_tol) return Centering::Centered;
    // rounding floor: decrement small and no longer shrinking
    if (lambda2 < 0.0625 && lambda2 >= prev_lambda2) return Centering::Centered;
    prev_lambda2 = lambda2;
    ++steps;
    const double f0 = m.barrier_value(x, mu);
    const double slack = 1e-12 * std::max(1.0, std::abs(f0));
    double t = 1.0;
    bool moved = false;
    if (lambda2 < 0.0625 && m.feasible(x + dx)) {
      // quadratic convergence region: no line search needed
      x += dx;
      moved = true;
    }
    for (int ls = 0; ls < 80 && !moved; ++ls) {
      const VectorXd xn = x + t * dx;
      if (m.feasible(xn) && m.barrier_value(xn, mu) <= f0 - 0.25 * t * lambda2 + slack) {
        x = xn;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved || (t * dx).norm() <= 1e-15 * (1.0 + x.norm())) {
      // stalled at floating-point resolution
      return 0.5 * lambda2 <= 1e-4 ? Centering::Centered : Centering::NotCentered;
    }
    if (stop && stop(x)) return Centering::Stopped;
  }
  return Centering::NotCentered;
}

template <class Model>
BarrierResult run_barrier(const Model& m, VectorXd x, const SolverSettings& s,
                          const std::function<bool(const VectorXd&)>& stop_early = {}) {
  BarrierResult r;
  double mu = s.mu0;
  for (int outer = 0; outer < s.max_outer; ++outer) {
    const Centering c = center(m, x, mu, s, r.newton_steps, stop_early);
    r.outer = outer + 1;
    r.mu = mu;
    if (c == Centering::Stopped || (stop_early && stop_early(x))) {
      r.stopped_early = true;
      break;
    }
    if (c != Centering::Centered) continue;  // same mu again
    r.history.push_back(m.objective_value(x));
    if (m.nu() / mu <= s.gap_tol * (1.0 + 1e-12)) {
      r.converged = true;
      break;
    }
    mu = std::min(mu * s.kappa, m.nu() / s.gap_tol);
  }
  r.x = std::move(x);
  return r;
}

/// min_{lambda >= 0} ||A lambda + g||^2 + ||diag(s) lambda||^2 by Lawson-Hanson
/// active sets; each passive-set subproblem is a small stacked least squares.
inline double complementarity_nnls(const MatrixXd& A, const VectorXd& s, const VectorXd& g) {
  const Eigen::Index n = A.rows(), m = A.cols();
  if (m == 0) return g.norm();
  VectorXd scale(m);
  for (Eigen::Index i = 0; i < m; ++i) scale[i] = std::sqrt(A.col(i).squaredNorm() + s[i] * s[i]);
  VectorXd lambda = VectorXd::Zero(m);
  std::vector<char> passive(static_cast<std::size_t>(m), 0);
  const double tol = 1e-12 * std::max(1.0, g.norm());

  auto solve_passive = [&](const std::vector<Eigen::Index>& idx) {
    const Eigen::Index p = static_cast<Eigen::Index>(idx.size());
    MatrixXd K = MatrixXd::Zero(n + p, p);
    VectorXd rhs = VectorXd::Zero(n + p);
    rhs.head(n) = -g;
    for (Eigen::Index k = 0; k < p; ++k) {
      const Eigen::Index i = idx[static_cast<std::size_t>(k)];
      K.col(k).head(n) = A.col(i) / scale[i];
      K(n + k, k) = s[i] / scale[i];
    }
    VectorXd z = K.colPivHouseholderQr().solve(rhs);
    for (Eigen::Index k = 0; k < p; ++k) z[k] /= scale[idx[static_cast<std::size_t>(k)]];
    return z;
  };

  for (int outer = 0; outer < 3 * m + 10; ++outer) {
    const VectorXd r = A * lambda + g;
    const VectorXd w = -(A.transpose() * r + s.cwiseProduct(s).cwiseProduct(lambda));
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (passive[static_cast<std::size_t>(i)]) continue;
      const double wi = w[i] / scale[i];
      if (wi > best_w) {
        best_w = wi;
        best = i;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = 1;

    for (int inner = 0; inner < 3 * m + 10; ++inner) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index i = 0; i < m; ++i)
        if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
      const VectorXd z = solve_passive(idx);
      bool all_positive = true;
      for (Eigen::Index k = 0; k < z.size(); ++k) all_positive = all_positive && z[k] > 0.0;
      if (all_positive) {
        lambda.setZero();
        for (std::size_t k = 0; k < idx.size(); ++k) lambda[idx[k]] = z[static_cast<Eigen::Index>(k)];
        break;
      }
      double alpha = 1.0;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const double zk = z[static_cast<Eigen::Index>(k)], lk = lambda[idx[k]];
        if (zk <= 0.0) alpha = std::min(alpha, lk / (lk - zk));
      }
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const Eigen::Index i = idx[k];
        lambda[i] += alpha * (z[static_cast<Eigen::Index>(k)] - lambda[i]);
        if (lambda[i] <= 1e-300) {
          lambda[i] = 0.0;
          passive[static_cast<std::size_t>(i)] = 0;
        }
      }
    }
  }
  return std::sqrt((A * lambda + g).squaredNorm() + s.cwiseProduct(lambda).squaredNorm());
}

}  // namespace detail

/// Scaled KKT residual of a ConeProgram at x:
///   min_{lambda >= 0} sqrt(||grad f + sum lambda_i grad g_i||^2 + sum (s_i lambda_i)^2)
/// divided by max(1, ||grad f||), over all linear, quadratic and matrix-inequality
/// eigen-directions (s_i = slack). Abs terms are lifted with t = |c'x + e|.
inline double check_kkt(const ConeProgram& prog, const VectorXd& x) {
  const detail::LiftedProgram lp = detail::lift(prog, 0.0);
  const VectorXd y = detail::lift_point(prog, x, 0.0);
  const VectorXd grad = lp.objective.gradient(y);
  const Eigen::Index n = lp.n;

  std::vector<VectorXd> cols;
  std::vector<double> slacks;
  auto push = [&](const VectorXd& dg, double slack) {
    cols.push_back(dg);
    slacks.push_back(std::max(slack, 0.0));
  };
  const VectorXd sl = lp.slacks(y);
  for (Eigen::Index i = 0; i < lp.A.rows(); ++i) push(lp.A.row(i).transpose(), sl[i]);
  for (const auto& q : lp.quadratic) push(q.gradient(y), -q.value(y));
  if (lp.psd) {
    MatrixXd F = lp.psd->at(y);
    F.diagonal().array() -= lp.psd->lower;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(F);
    for (Eigen::Index j = 0; j < F.rows(); ++j) {
      const VectorXd v = es.eigenvectors().col(j);
      VectorXd dg(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        dg[k] = -v.dot(lp.psd->coefficients[static_cast<std::size_t>(k)] * v);
      }
      push(dg, es.eigenvalues()[j]);
    }
  }
  MatrixXd G(n, static_cast<Eigen::Index>(cols.size()));
  VectorXd S(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    G.col(static_cast<Eigen::Index>(i)) = cols[i];
    S[static_cast<Eigen::Index>(i)] = slacks[i];
  }
  return detail::complementarity_nnls(G, S, grad) / std::max(1.0, grad.norm());
}

/// Scaled KKT residual of a BallProgram at z (single constraint ||z||^2 <= 1).
inline double check_kkt(const BallProgram& prog, const VectorXd& z) {
  const VectorXd g = prog.gradient(z);
  const VectorXd dg = 2.0 * z;
  const double s = std::max(0.0, 1.0 - z.squaredNorm());
  const double denom = dg.squaredNorm() + s * s;
  const double lambda = denom > 0.0 ? std::max(0.0, -g.dot(dg) / denom) : 0.0;
  const double res = std::sqrt((g + lambda * dg).squaredNorm() + (s * lambda) * (s * lambda));
  return res / std::max(1.0, g.norm());
}

/// Barrier method with Newton centering. Without x0, a phase-I problem finds
/// a strictly feasible start or certifies infeasibility.
inline Solution solve_cone(const ConeProgram& prog, const std::optional<VectorXd>& x0 = std::nullopt,
                           const SolverSettings& settings = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  Solution sol;
  const detail::LiftedProgram lp = detail::lift(prog, settings.psd_margin);

  VectorXd y;
  if (x0) {
    if (x0->size() != prog.n) throw ContractViolation("solve_cone: x0 has wrong dimension");
    y = detail::lift_point(prog, *x0, 1.0);
    if (!lp.feasible(y)) throw ContractViolation("solve_cone: x0 is not strictly feasible");
  } else {
    const VectorXd x_init = VectorXd::Zero(lp.n);
    const double viol = lp.max_violation(x_init);
    if (viol < -1e-9) {
      y = x_init;
    } else {
      const detail::LiftedProgram p1 = detail::phase1(lp, x_init, settings.phase1_proximal);
      VectorXd z(p1.n);
      z.head(lp.n) = x_init;
      z[p1.n - 1] = std::max(viol + 1.0, 0.0);
      const double target = settings.phase1_target;
      const int sidx = p1.n - 1;
      const auto r1 = detail::run_barrier(p1, z, settings, [target, sidx](const VectorXd& v) { return v[sidx] <= target; });
      sol.iterations += r1.newton_steps;
      sol.phase1_slack = r1.x[sidx];
      if (r1.x[sidx] > settings.infeasible_slack || r1.x[sidx] >= -1e-12 || !lp.feasible(r1.x.head(lp.n))) {
        sol.status = SolveStatus::Infeasible;
        sol.x = r1.x.head(prog.n);
        sol.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return sol;
      }
      y = r1.x.head(lp.n);
    }
  }

  const auto r = detail::run_barrier(lp, y, settings);
  sol.iterations += r.newton_steps;
  sol.outer_iterations = r.outer;
  sol.objective_history = r.history;
  sol.gap_estimate = lp.nu() / r.mu;
  sol.x = r.x.head(prog.n);
  sol.objective_value = prog.objective_value(sol.x);
  sol.status = r.converged ? SolveStatus::Optimal : SolveStatus::MaxIterations;
  sol.kkt_residual = check_kkt(prog, sol.x);
  sol.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

/// Barrier method on ||z||^2 <= 1. The result is pushed radially onto the
/// sphere when the objective still decreases outward there.
inline Solution solve_ball(const BallProgram& prog, const VectorXd& x0, const SolverSettings& settings = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  if (x0.size() != prog.dim()) throw ContractViolation("solve_ball: x0 has wrong dimension");
  if (!(x0.squaredNorm() < 1.0) || !prog.in_domain(x0)) {
    throw ContractViolation("solve_ball: x0 must lie strictly inside the ball and every log domain");
  }
  const detail::BallModel model{&prog};
  const auto r = detail::run_barrier(model, x0, settings);
  Solution sol;
  sol.iterations = r.newton_steps;
  sol.outer_iterations = r.outer;
  sol.objective_history = r.history;
  sol.gap_estimate = 1.0 / r.mu;
  VectorXd z = r.x;
  const double n = z.norm();
  if (n > 0.0 && prog.gradient(z).dot(z) < 0.0) {
    const VectorXd zs = z / n;
    if (prog.in_domain(zs) && prog.value(zs) <= prog.value(z)) z = zs;
  }
  sol.x = z;
  sol.objective_value = prog.value(z);
  sol.status = r.converged ? SolveStatus::Optimal : SolveStatus::MaxIterations;
  sol.kkt_residual = check_kkt(prog, z);
  sol.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

}  // namespace ecan
