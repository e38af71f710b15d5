#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ecan {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;

template <int Dim>
using Mat = Eigen::Matrix<double, Dim, Dim>;

/// Numerical tolerances shared by every module.
struct Tolerances {
  static constexpr double symmetry = 1e-12;
  static constexpr double orthonormality = 1e-10;
  static constexpr double eigen_degenerate = 1e-9;
  static constexpr double singular_quadric = 1e-12;
  static constexpr double feasibility = 1e-7;
  static constexpr double predicate = 1e-6;
  static constexpr double occupancy = 1e-9;
  static constexpr double coincidence = 1e-9;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a precondition (dimension mismatch, out-of-range parameter).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class DegenerateQuadric : public Error {
 public:
  using Error::Error;
};

class NoFeasibleEllipsoid : public Error {
 public:
  explicit NoFeasibleEllipsoid(double phase1_slack)
      : Error("no feasible ellipsoid (phase-I slack " + std::to_string(phase1_slack) + ")"),
        slack(phase1_slack) {}
  double slack;
};

class AgentAtBoundaryTarget : public Error {
 public:
  using Error::Error;
};

class EmptyFovAxis : public Error {
 public:
  using Error::Error;
};

}  // namespace ecan
