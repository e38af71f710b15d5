#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>

#include "ecan/config.hpp"

namespace ecan {

/// Quadric {x | x'Px + q'x + r <= 0}; an ellipsoid when P is positive definite.
template <int Dim>
struct Ellipsoid {
  Mat<Dim> P = Mat<Dim>::Identity();
  Vec<Dim> q = Vec<Dim>::Zero();
  double r = -1.0;

  double operator()(const Vec<Dim>& z) const { return z.dot(P * z) + q.dot(z) + r; }
};

template <int Dim>
double evaluate_quadric(const Ellipsoid<Dim>& e, const Vec<Dim>& z) {
  return e(z);
}

/// Runtime-sized overload for callers holding untyped coordinates.
template <int Dim>
double evaluate_quadric(const Ellipsoid<Dim>& e, std::span<const double> z) {
  if (z.size() != static_cast<std::size_t>(Dim)) {
    throw ContractViolation("evaluate_quadric: point has dimension " + std::to_string(z.size()) +
                            ", quadric has " + std::to_string(Dim));
  }
  Vec<Dim> v;
  for (int i = 0; i < Dim; ++i) v[i] = z[static_cast<std::size_t>(i)];
  return e(v);
}

/// Stationary point -P^{-1} q / 2 of the quadric.
template <int Dim>
Vec<Dim> ellipsoid_center(const Ellipsoid<Dim>& e) {
  const double det = e.P.determinant();
  const double scale = std::pow(std::max(e.P.cwiseAbs().maxCoeff(), 1e-300), Dim);
  if (!std::isfinite(det) || std::abs(det) <= Tolerances::singular_quadric * scale) {
    throw DegenerateQuadric("ellipsoid_center: P is singular");
  }
  return -0.5 * (e.P.inverse() * e.q);
}

/// Agent position plus orthonormal frame; column 0 is the direction of motion.
template <int Dim>
struct Pose {
  Vec<Dim> position = Vec<Dim>::Zero();
  Mat<Dim> frame = Mat<Dim>::Identity();

  Vec<Dim> heading() const { return frame.col(0); }
};

template <int Dim>
Vec<Dim> local_to_global(const Pose<Dim>& pose, const Vec<Dim>& v_local) {
  return pose.position + pose.frame * v_local;
}

template <int Dim>
Vec<Dim> global_to_local(const Pose<Dim>& pose, const Vec<Dim>& z) {
  return pose.frame.transpose() * (z - pose.position);
}

template <int Dim>
bool is_valid_frame(const Mat<Dim>& frame, double tol = Tolerances::orthonormality) {
  if (((frame.transpose() * frame) - Mat<Dim>::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  if constexpr (Dim == 3) {
    if (frame.determinant() < 0.0) return false;
  }
  return true;
}

/// 2D frame whose x-axis is `heading`.
inline Mat<2> frame_from_heading(const Vec<2>& heading) {
  const Vec<2> x = heading.normalized();
  Mat<2> f;
  f.col(0) = x;
  f.col(1) = Vec<2>(-x.y(), x.x());
  return f;
}

/// 3D right-handed frame with x-axis `heading` and zero roll (y-axis horizontal).
inline Mat<3> frame_from_heading(const Vec<3>& heading) {
  const Vec<3> x = heading.normalized();
  Vec<3> y = Vec<3>::UnitZ().cross(x);
  if (y.norm() < 1e-9) y = x.cross(Vec<3>::UnitX()).norm() > 1e-9 ? Vec<3>(x.cross(Vec<3>::UnitX())) : Vec<3>::UnitY();
  y.normalize();
  Mat<3> f;
  f.col(0) = x;
  f.col(1) = y;
  f.col(2) = x.cross(y);
  return f;
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
template <int Dim>
struct Spectrum {
  Vec<Dim> eigenvalues;
  Mat<Dim> eigenvectors;  // column i pairs with eigenvalues[i]

  double min() const { return eigenvalues[0]; }
  double max() const { return eigenvalues[Dim - 1]; }
  Vec<Dim> vector(int i) const { return eigenvectors.col(i); }
};

namespace detail {

template <int Dim>
void canonical_sign(Eigen::Ref<Vec<Dim>> v) {
  int best = 0;
  for (int i = 1; i < Dim; ++i) {
    if (std::abs(v[i]) > std::abs(v[best]) + 1e-12) best = i;
  }
  if (v[best] < 0.0) v = -v;
}

inline bool nearly_equal_eigen(double a, double b, double scale) {
  return std::abs(a - b) <= Tolerances::eigen_degenerate * std::max(1.0, scale);
}

/// Cyclic Jacobi on a 3x3 symmetric matrix; returns unsorted pairs.
inline void jacobi3(Mat<3> a, Vec<3>& values, Mat<3>& vectors) {
  vectors.setIdentity();
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    if (off <= 1e-32 * std::max(1.0, a.squaredNorm())) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Mat<3> rot = Mat<3>::Identity();
        rot(p, p) = c;
        rot(q, q) = c;
        rot(p, q) = s;
        rot(q, p) = -s;
        a = rot.transpose() * a * rot;
        a(p, q) = a(q, p) = 0.0;
        vectors = vectors * rot;
      }
    }
  }
  values = a.diagonal();
}

}  // namespace detail

/// Symmetric eigendecomposition: closed form in 2D, cyclic Jacobi in 3D.
/// Repeated eigenvalues get canonical-axis-aligned eigenvectors; each vector's
/// largest component is made positive.
template <int Dim>
Spectrum<Dim> eigen_symmetric(const Mat<Dim>& P) {
  static_assert(Dim == 2 || Dim == 3, "eigen_symmetric supports 2x2 and 3x3");
  const Mat<Dim> S = 0.5 * (P + P.transpose());
  Spectrum<Dim> out;

  if constexpr (Dim == 2) {
    const double a = S(0, 0), b = S(0, 1), c = S(1, 1);
    const double mean = 0.5 * (a + c);
    const double rad = std::hypot(0.5 * (a - c), b);
    out.eigenvalues = Vec<2>(mean - rad, mean + rad);
    const double scale = std::max(std::abs(out.eigenvalues[0]), std::abs(out.eigenvalues[1]));
    if (detail::nearly_equal_eigen(out.eigenvalues[0], out.eigenvalues[1], scale)) {
      out.eigenvectors.setIdentity();
      out.eigenvalues.setConstant(mean);
      return out;
    }
    if (std::abs(b) <= 1e-300) {
      // already diagonal; order by value
      out.eigenvectors = a <= c ? Mat<2>::Identity() : Mat<2>((Mat<2>() << 0, 1, 1, 0).finished());
    } else {
      for (int i = 0; i < 2; ++i) {
        const double lam = out.eigenvalues[i];
        const Vec<2> u(b, lam - a);
        const Vec<2> w(lam - c, b);
        out.eigenvectors.col(i) = (u.squaredNorm() >= w.squaredNorm() ? u : w).normalized();
      }
      // enforce exact orthogonality
      const Vec<2> v0 = out.eigenvectors.col(0);
      out.eigenvectors.col(1) = Vec<2>(-v0.y(), v0.x());
    }
  } else {
    Vec<3> values;
    Mat<3> vectors;
    detail::jacobi3(S, values, vectors);
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return values[i] < values[j]; });
    for (int k = 0; k < 3; ++k) {
      out.eigenvalues[k] = values[idx[k]];
      out.eigenvectors.col(k) = vectors.col(idx[k]).normalized();
    }
    const double scale = out.eigenvalues.cwiseAbs().maxCoeff();
    const bool eq01 = detail::nearly_equal_eigen(out.eigenvalues[0], out.eigenvalues[1], scale);
    const bool eq12 = detail::nearly_equal_eigen(out.eigenvalues[1], out.eigenvalues[2], scale);
    if (eq01 && eq12) {
      out.eigenvectors.setIdentity();
      return out;
    }
    if (eq01 || eq12) {
      // a repeated pair spans the plane orthogonal to the distinct vector
      const int distinct = eq01 ? 2 : 0;
      const int first = eq01 ? 0 : 1;
      Vec<3> u = out.eigenvectors.col(distinct);
      detail::canonical_sign<3>(u);
      int best = 0;
      double best_norm = -1.0;
      for (int axis = 0; axis < 3; ++axis) {
        const Vec<3> e = Vec<3>::Unit(axis);
        const double n = (e - e.dot(u) * u).norm();
        if (n > best_norm + 1e-12) {
          best_norm = n;
          best = axis;
        }
      }
      const Vec<3> e = Vec<3>::Unit(best);
      Vec<3> va = (e - e.dot(u) * u).normalized();
      Vec<3> vb = u.cross(va).normalized();
      detail::canonical_sign<3>(vb);
      out.eigenvectors.col(distinct) = u;
      out.eigenvectors.col(first) = va;
      out.eigenvectors.col(first + 1) = vb;
      return out;
    }
  }
  for (int i = 0; i < Dim; ++i) detail::canonical_sign<Dim>(out.eigenvectors.col(i));
  return out;
}

}  // namespace ecan
