#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "ecan/config.hpp"
#include "ecan/geometry.hpp"

namespace ecan {

enum class ShapeKind { Box, Polygon };

/// Closed convex set {x | normals[i]'x <= offsets[i]}.
template <int Dim>
struct ConvexShape {
  ShapeKind kind = ShapeKind::Box;
  std::vector<Vec<Dim>> normals;
  std::vector<double> offsets;
  std::vector<Vec<Dim>> vertices;  // polygon corners (counter-clockwise) or {min, max} for boxes
  Vec<Dim> lo = Vec<Dim>::Zero();
  Vec<Dim> hi = Vec<Dim>::Zero();

  bool contains(const Vec<Dim>& z, double tol = Tolerances::occupancy) const {
    for (std::size_t i = 0; i < normals.size(); ++i) {
      if (normals[i].dot(z) > offsets[i] + tol) return false;
    }
    return true;
  }

  Vec<Dim> centre() const { return 0.5 * (lo + hi); }
  double radius() const { return 0.5 * (hi - lo).norm(); }

  static ConvexShape box(const Vec<Dim>& min, const Vec<Dim>& max) {
    if (!((max - min).array() > 0.0).all()) throw ContractViolation("box obstacle must have positive extent");
    ConvexShape s;
    s.kind = ShapeKind::Box;
    for (int i = 0; i < Dim; ++i) {
      s.normals.push_back(Vec<Dim>::Unit(i));
      s.offsets.push_back(max[i]);
      s.normals.push_back(-Vec<Dim>::Unit(i));
      s.offsets.push_back(-min[i]);
    }
    s.vertices = {min, max};
    s.lo = min;
    s.hi = max;
    return s;
  }

  static ConvexShape polygon(std::vector<Vec<2>> pts) requires(Dim == 2) {
    if (pts.size() < 3) throw ContractViolation("polygon obstacle needs at least three vertices");
    double area = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& a = pts[i];
      const auto& b = pts[(i + 1) % pts.size()];
      area += a.x() * b.y() - a.y() * b.x();
    }
    if (std::abs(area) <= 1e-12) throw ContractViolation("polygon obstacle must have positive area");
    if (area < 0.0) std::reverse(pts.begin(), pts.end());
    ConvexShape s;
    s.kind = ShapeKind::Polygon;
    s.lo = s.hi = pts.front();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& a = pts[i];
      const auto& b = pts[(i + 1) % pts.size()];
      const Vec<2> e = b - a;
      const Vec<2> n = Vec<2>(e.y(), -e.x()).normalized();
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (n.dot(pts[j] - a) > 1e-9) throw ContractViolation("polygon obstacle must be convex");
      }
      s.normals.push_back(n);
      s.offsets.push_back(n.dot(a));
      s.lo = s.lo.cwiseMin(a);
      s.hi = s.hi.cwiseMax(a);
    }
    s.vertices = std::move(pts);
    return s;
  }

  /// Parameter interval of the ray p + t d (|d| = 1) inside the shape, clipped to [0, tmax].
  std::optional<std::pair<double, double>> clip_ray(const Vec<Dim>& p, const Vec<Dim>& d, double tmax) const {
    double t0 = 0.0, t1 = tmax;
    for (std::size_t i = 0; i < normals.size(); ++i) {
      const double nd = normals[i].dot(d);
      const double slack = offsets[i] - normals[i].dot(p);
      if (std::abs(nd) < 1e-15) {
        if (slack < -Tolerances::occupancy) return std::nullopt;
        continue;
      }
      const double t = slack / nd;
      if (nd > 0.0) t1 = std::min(t1, t);
      else t0 = std::max(t0, t);
      if (t0 > t1 + 1e-9) return std::nullopt;
    }
    return std::make_pair(t0, t1);
  }
};

template <int Dim>
struct Environment {
  std::vector<Vec<Dim>> points;
  std::vector<ConvexShape<Dim>> shapes;
  std::optional<std::pair<Vec<Dim>, Vec<Dim>>> bounds;

  bool has_finite_obstacles() const { return !shapes.empty(); }
};

template <int Dim>
bool occupancy(const Environment<Dim>& env, const Vec<Dim>& z) {
  for (const auto& s : env.shapes) {
    if (s.contains(z)) return true;
  }
  return false;
}

/// Field-of-view wedge; angles in degrees.
struct FovSpec {
  double range = 5.0;
  double theta = 80.0;
  double phi = 40.0;
  double dr = 0.2;
  double dtheta = 1.0;
  double dphi = 0.5;

  bool operator==(const FovSpec&) const = default;

  void validate() const {
    if (!(range > 0 && theta > 0 && phi > 0 && dr > 0 && dtheta > 0 && dphi > 0)) {
      throw ContractViolation("fov parameters must be positive");
    }
    if (theta > 180.0 || phi > 90.0) throw ContractViolation("fov half-angles exceed 180/90 degrees");
  }
};

/// The closed-form lattice size (2 theta + 1)(2 phi + 1) R / (dr dtheta dphi), 2D drops the phi factor.
inline double fov_formula_count(const FovSpec& f, int dim) {
  const double planar = (2.0 * f.theta + 1.0) * f.range / (f.dr * f.dtheta);
  return dim == 2 ? planar : planar * (2.0 * f.phi + 1.0) / f.dphi;
}

namespace detail {

inline int axis_count(double extent, double step, const char* name) {
  const int n = static_cast<int>(std::floor(extent / step + 1e-9));
  if (n < 1) throw EmptyFovAxis(std::string("fov axis '") + name + "' has no samples: step exceeds range");
  return n;
}

/// Cell-centre samples covering [-half - 0.5, half + 0.5] degrees.
inline std::vector<double> angle_samples(double half, double step, const char* name) {
  const int n = axis_count(2.0 * half + 1.0, step, name);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = -half - 0.5 + (k + 0.5) * step;
  return out;
}

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace detail

/// Polar (2D) or spherical (3D) lattice in the agent frame, stored as
/// directions x radii; point(i) enumerates it direction-major.
template <int Dim>
struct FovGrid {
  FovSpec spec;
  std::vector<Vec<Dim>> directions;
  std::vector<double> radii;

  std::size_t size() const { return directions.size() * radii.size(); }
  Vec<Dim> point(std::size_t i) const { return radii[i % radii.size()] * directions[i / radii.size()]; }

  std::vector<Vec<Dim>> points() const {
    std::vector<Vec<Dim>> out;
    out.reserve(size());
    for (const auto& d : directions)
      for (double r : radii) out.push_back(r * d);
    return out;
  }
};

template <int Dim>
FovGrid<Dim> build_fov_grid(const FovSpec& fov) {
  fov.validate();
  FovGrid<Dim> g;
  g.spec = fov;
  const int nr = detail::axis_count(fov.range, fov.dr, "r");
  for (int i = 1; i <= nr; ++i) g.radii.push_back(i * fov.dr);
  const auto thetas = detail::angle_samples(fov.theta, fov.dtheta, "theta");
  if constexpr (Dim == 2) {
    for (double t : thetas) g.directions.emplace_back(std::cos(detail::deg2rad(t)), std::sin(detail::deg2rad(t)));
  } else {
    const auto phis = detail::angle_samples(fov.phi, fov.dphi, "phi");
    for (double t : thetas) {
      for (double p : phis) {
        const double ct = std::cos(detail::deg2rad(t)), st = std::sin(detail::deg2rad(t));
        const double cp = std::cos(detail::deg2rad(p)), sp = std::sin(detail::deg2rad(p));
        g.directions.emplace_back(cp * ct, cp * st, sp);
      }
    }
  }
  return g;
}

/// Azimuth (and elevation in 3D) of a local-frame vector, degrees.
template <int Dim>
std::pair<double, double> local_angles(const Vec<Dim>& v) {
  const double az = std::atan2(v[1], v[0]) * 180.0 / std::numbers::pi;
  double el = 0.0;
  if constexpr (Dim == 3) el = std::asin(std::clamp(v[2] / v.norm(), -1.0, 1.0)) * 180.0 / std::numbers::pi;
  return {az, el};
}

template <int Dim>
bool in_fov_wedge(const FovSpec& fov, const Pose<Dim>& pose, const Vec<Dim>& p) {
  const Vec<Dim> v = global_to_local(pose, p);
  const double dist = v.norm();
  if (!(dist > 0.0) || dist > fov.range) return false;
  const auto [az, el] = local_angles<Dim>(v);
  if (std::abs(az) > fov.theta) return false;
  if constexpr (Dim == 3) {
    if (std::abs(el) > fov.phi) return false;
  }
  return true;
}

/// Lattice points inside finite obstacles plus raw point obstacles inside the
/// wedge. Nothing is occluded.
template <int Dim>
std::vector<Vec<Dim>> sense(const Environment<Dim>& env, const Pose<Dim>& pose, const FovGrid<Dim>& grid) {
  std::vector<Vec<Dim>> cloud;
  const double range = grid.radii.empty() ? 0.0 : grid.radii.back();
  std::vector<const ConvexShape<Dim>*> nearby;
  for (const auto& s : env.shapes) {
    if ((s.centre() - pose.position).norm() <= range + s.radius() + 1e-9) nearby.push_back(&s);
  }
  if (!nearby.empty()) {
    const double dr = grid.spec.dr;
    const int nr = static_cast<int>(grid.radii.size());
    std::vector<int> hits;
    for (const auto& dl : grid.directions) {
      const Vec<Dim> d = pose.frame * dl;
      hits.clear();
      for (const auto* s : nearby) {
        const auto seg = s->clip_ray(pose.position, d, range + 1e-9);
        if (!seg) continue;
        const int i0 = std::max(1, static_cast<int>(std::ceil((seg->first - 1e-9) / dr)));
        const int i1 = std::min(nr, static_cast<int>(std::floor((seg->second + 1e-9) / dr)));
        for (int i = i0; i <= i1; ++i) hits.push_back(i);
      }
      std::sort(hits.begin(), hits.end());
      hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
      for (int i : hits) {
        const Vec<Dim> p = pose.position + grid.radii[static_cast<std::size_t>(i - 1)] * d;
        if (occupancy(env, p)) cloud.push_back(p);
      }
    }
  }
  for (const auto& p : env.points) {
    if (in_fov_wedge(grid.spec, pose, p)) cloud.push_back(p);
  }
  return cloud;
}

/// Uniform point obstacles in [lo, hi] that keep `clearance` from every keep-out centre.
template <int Dim>
std::vector<Vec<Dim>> random_points(std::size_t count, const Vec<Dim>& lo, const Vec<Dim>& hi, std::uint64_t seed,
                                    const std::vector<Vec<Dim>>& keep_out = {}, double clearance = 0.0) {
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> axes;
  for (int i = 0; i < Dim; ++i) axes.emplace_back(lo[i], hi[i]);
  std::vector<Vec<Dim>> out;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * count + 1000) throw ContractViolation("random_points: keep-out zones leave no room");
    Vec<Dim> p;
    for (int i = 0; i < Dim; ++i) p[i] = axes[static_cast<std::size_t>(i)](rng);
    bool ok = true;
    for (const auto& k : keep_out) ok = ok && (p - k).norm() > clearance;
    if (ok) out.push_back(p);
  }
  return out;
}

}  // namespace ecan
