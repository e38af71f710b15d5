#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ecan/config.hpp"
#include "ecan/geometry.hpp"

namespace ecan {

enum class AgentKind { Point, Box2D, Plane3D };

inline const char* to_string(AgentKind k) {
  switch (k) {
    case AgentKind::Point: return "point";
    case AgentKind::Box2D: return "box";
    case AgentKind::Plane3D: return "plane";
  }
  return "?";
}

/// Plane geometry in the body frame (x forward, z up). Lengths are world units;
/// the *_x fields place a wing's chord centre along the body axis.
struct PlaneDims {
  double body_length = 1.4;
  double body_width = 0.3;
  double body_height = 0.3;
  double nose_length = 0.3;
  double front_span = 0.7;
  double front_chord = 0.4;
  double front_x = 0.1;
  double rear_span = 0.35;
  double rear_chord = 0.25;
  double rear_x = -0.55;
  double fin_height = 0.3;
  double fin_chord = 0.25;
  double fin_x = -0.55;
  double fin_spacing = 0.2;  // distance between the twin fins
  double thickness = 0.05;

  bool operator==(const PlaneDims&) const = default;

  void validate() const {
    for (double v : {body_length, body_width, body_height, nose_length, front_span, front_chord, rear_span,
                     rear_chord, fin_height, fin_chord, fin_spacing, thickness}) {
      if (!(v > 0.0)) throw ContractViolation("plane dimensions must be positive");
    }
  }
};

/// 8 body corners, the nose tip, then 4 corners on each of the six wing free ends.
inline std::vector<Vec<3>> plane33_offsets(const PlaneDims& d) {
  d.validate();
  std::vector<Vec<3>> out;
  out.reserve(33);
  const double hx = d.body_length / 2, hy = d.body_width / 2, hz = d.body_height / 2, ht = d.thickness / 2;
  for (double sx : {1.0, -1.0})
    for (double sy : {1.0, -1.0})
      for (double sz : {1.0, -1.0}) out.emplace_back(sx * hx, sy * hy, sz * hz);
  out.emplace_back(hx + d.nose_length, 0.0, 0.0);

  auto wing_tip = [&](double x_centre, double chord, double y) {
    for (double sx : {1.0, -1.0})
      for (double sz : {1.0, -1.0}) out.emplace_back(x_centre + sx * chord / 2, y, sz * ht);
  };
  for (double side : {1.0, -1.0}) wing_tip(d.front_x, d.front_chord, side * (hy + d.front_span));
  for (double side : {1.0, -1.0}) wing_tip(d.rear_x, d.rear_chord, side * (hy + d.rear_span));
  for (double side : {1.0, -1.0}) {
    const double y = side * d.fin_spacing / 2;
    for (double sx : {1.0, -1.0})
      for (double sy : {1.0, -1.0}) out.emplace_back(d.fin_x + sx * d.fin_chord / 2, y + sy * ht, hz + d.fin_height);
  }
  return out;
}

template <int Dim>
struct AgentModel {
  AgentKind kind = AgentKind::Point;
  std::vector<Vec<Dim>> offsets{Vec<Dim>::Zero()};
  Vec<Dim> extents = Vec<Dim>::Zero();  // box width/height
  PlaneDims plane;

  std::size_t m() const { return offsets.size(); }
  bool is_point() const { return kind == AgentKind::Point; }

  double circumradius() const {
    double r = 0.0;
    for (const auto& o : offsets) r = std::max(r, o.norm());
    return r;
  }

  static AgentModel point() { return AgentModel{}; }

  static AgentModel box(double width, double height) requires(Dim == 2) {
    if (!(width > 0.0 && height > 0.0)) throw ContractViolation("box agent needs positive width and height");
    AgentModel a;
    a.kind = AgentKind::Box2D;
    a.extents = Vec<2>(width, height);
    const double w = width / 2, h = height / 2;
    a.offsets = {Vec<2>(w, h), Vec<2>(-w, h), Vec<2>(-w, -h), Vec<2>(w, -h)};
    return a;
  }

  static AgentModel plane3d(const PlaneDims& d = {}) requires(Dim == 3) {
    AgentModel a;
    a.kind = AgentKind::Plane3D;
    a.plane = d;
    a.offsets = plane33_offsets(d);
    return a;
  }
};

template <int Dim>
std::vector<Vec<Dim>> extremum_points(const AgentModel<Dim>& model, const Pose<Dim>& pose) {
  std::vector<Vec<Dim>> out;
  out.reserve(model.offsets.size());
  for (const auto& o : model.offsets) out.push_back(local_to_global(pose, o));
  return out;
}

namespace detail {

inline Mat<2> orthonormalize(const Mat<2>& f) { return frame_from_heading(Vec<2>(f.col(0))); }

inline Mat<3> orthonormalize(const Mat<3>& f) {
  const Vec<3> x = f.col(0).normalized();
  const Vec<3> y = (f.col(1) - f.col(1).dot(x) * x).normalized();
  Mat<3> out;
  out.col(0) = x;
  out.col(1) = y;
  out.col(2) = x.cross(y);
  return out;
}

inline Mat<2> rotation_between(const Vec<2>& from, const Vec<2>& to, double fraction) {
  const double ang = fraction * std::atan2(from.x() * to.y() - from.y() * to.x(), from.dot(to));
  Mat<2> R;
  R << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
  return R;
}

inline Mat<3> rotation_between(const Vec<3>& from, const Vec<3>& to, double fraction, const Vec<3>& fallback_axis) {
  Vec<3> axis = from.cross(to);
  const double s = axis.norm();
  const double ang = std::atan2(s, from.dot(to));
  if (s < 1e-12) {
    if (from.dot(to) > 0.0) return Mat<3>::Identity();
    axis = fallback_axis;
  }
  return Eigen::AngleAxisd(fraction * ang, axis.normalized()).toRotationMatrix();
}

}  // namespace detail

/// Frame turned by `fraction` of the minimal rotation taking its x-axis to `target`.
template <int Dim>
Mat<Dim> turn_toward(const Mat<Dim>& frame, const Vec<Dim>& target, double fraction = 1.0) {
  const Vec<Dim> from = frame.col(0);
  const Vec<Dim> to = target.normalized();
  Mat<Dim> R;
  if constexpr (Dim == 2) {
    R = detail::rotation_between(from, to, fraction);
  } else {
    R = detail::rotation_between(from, to, fraction, Vec<3>(frame.col(2)));
  }
  return detail::orthonormalize(Mat<Dim>(R * frame));
}

/// Translate by l_n * z_n and aim the x-axis along z_n (or a fraction of the way there).
template <int Dim>
Pose<Dim> advance(const Pose<Dim>& pose, const Vec<Dim>& z_n, double l_n, double turn_fraction = 1.0) {
  if (!(l_n >= 0.0)) throw ContractViolation("advance: step length must be nonnegative");
  if (l_n == 0.0) return pose;
  Pose<Dim> out;
  out.position = pose.position + l_n * z_n;
  out.frame = turn_fraction > 0.0 ? turn_toward(pose.frame, z_n, turn_fraction) : pose.frame;
  return out;
}

}  // namespace ecan
