#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "ecan/io/scenario.hpp"
#include "ecan/planner.hpp"

namespace ecan::io {

enum class Projection { XY, XZ, YZ };

inline Projection parse_projection(const std::string& s) {
  if (s == "xy") return Projection::XY;
  if (s == "xz") return Projection::XZ;
  if (s == "yz") return Projection::YZ;
  throw ContractViolation("projection must be xy, xz or yz");
}

namespace detail {

inline std::array<int, 2> axes(Projection p) {
  switch (p) {
    case Projection::XY: return {0, 1};
    case Projection::XZ: return {0, 2};
    case Projection::YZ: return {1, 2};
  }
  return {0, 1};
}

inline std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", v == 0.0 ? 0.0 : v);  // no "-0.0000"
  return buf;
}

struct Bounds {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -std::numeric_limits<double>::infinity(), y1 = x1;
  void add(double x, double y) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
};

}  // namespace detail

/// Outline of the quadric's sublevel set {Psi <= 0} projected on two axes;
/// empty when the set is empty or unbounded.
template <int Dim>
std::vector<Vec<2>> ellipse_outline(const Ellipsoid<Dim>& e, std::array<int, 2> ax, int segments = 128) {
  Eigen::LLT<Mat<Dim>> llt(e.P);
  if (llt.info() != Eigen::Success) return {};
  const Vec<Dim> c = -0.5 * llt.solve(e.q);
  const double k = -e(c);
  if (!(k > 0.0)) return {};
  const Mat<Dim> shape = k * llt.solve(Mat<Dim>::Identity());
  Mat<2> s;
  Vec<2> c2;
  for (int i = 0; i < 2; ++i) {
    c2[i] = c[ax[static_cast<std::size_t>(i)]];
    for (int j = 0; j < 2; ++j) s(i, j) = shape(ax[static_cast<std::size_t>(i)], ax[static_cast<std::size_t>(j)]);
  }
  const Mat<2> L = Eigen::LLT<Mat<2>>(s).matrixL();
  std::vector<Vec<2>> out;
  out.reserve(static_cast<std::size_t>(segments));
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * std::numbers::pi * i / segments;
    out.push_back(c2 + L * Vec<2>(std::cos(a), std::sin(a)));
  }
  return out;
}

/// Static picture: obstacles, ellipse outlines, path polyline, start and goal markers.
template <int Dim>
std::string render_svg(const PlanTrace<Dim>& trace, const Scenario& sc, Projection proj = Projection::XY) {
  using detail::fmt;
  const auto ax = Dim == 2 ? std::array<int, 2>{0, 1} : detail::axes(proj);
  const auto env = make_environment<Dim>(sc);
  auto pick = [&](const Vec<Dim>& v) { return Vec<2>(v[ax[0]], v[ax[1]]); };

  detail::Bounds bb;
  const Vec<2> start = pick(detail::to_vec<Dim>(sc.start)), goal = pick(detail::to_vec<Dim>(sc.goal));
  bb.add(start.x(), start.y());
  bb.add(goal.x(), goal.y());

  std::string obstacles, ellipses, path;
  for (const auto& s : env.shapes) {
    if (s.kind == ShapeKind::Box) {
      const Vec<2> lo = pick(s.lo), hi = pick(s.hi);
      obstacles += "<rect class=\"obstacle\" x=\"" + fmt(lo.x()) + "\" y=\"" + fmt(lo.y()) + "\" width=\"" +
                   fmt(hi.x() - lo.x()) + "\" height=\"" + fmt(hi.y() - lo.y()) + "\"/>\n";
    } else {
      std::string pts;
      for (const auto& v : s.vertices) pts += (pts.empty() ? "" : " ") + fmt(v[0]) + "," + fmt(v[1]);
      obstacles += "<polygon class=\"obstacle\" points=\"" + pts + "\"/>\n";
    }
  }
  for (const auto& p : env.points) {
    const Vec<2> v = pick(p);
    obstacles += "<circle class=\"obstacle\" cx=\"" + fmt(v.x()) + "\" cy=\"" + fmt(v.y()) + "\" r=\"0.08\"/>\n";
  }
  for (const auto& s : trace.steps) {
    const auto outline = ellipse_outline(s.ellipsoid, ax);
    if (outline.empty()) continue;
    std::string d;
    for (std::size_t i = 0; i < outline.size(); ++i) {
      d += (i == 0 ? "M" : " L") + fmt(outline[i].x()) + "," + fmt(outline[i].y());
      bb.add(outline[i].x(), outline[i].y());
    }
    ellipses += "<path class=\"ellipse\" d=\"" + d + " Z\"/>\n";
  }
  if (!trace.steps.empty()) {
    std::string pts;
    auto add = [&](const Vec<Dim>& p) {
      const Vec<2> v = pick(p);
      pts += (pts.empty() ? "" : " ") + fmt(v.x()) + "," + fmt(v.y());
      bb.add(v.x(), v.y());
    };
    for (const auto& s : trace.steps) add(s.pose.position);
    add(trace.final_pose.position);
    path = "<polyline class=\"path\" points=\"" + pts + "\"/>\n";
  }

  // the view follows the path and ellipses; obstacles far away are clipped
  const double pad = 1.0 + 0.05 * std::max(bb.x1 - bb.x0, bb.y1 - bb.y0);
  const double x0 = bb.x0 - pad, y0 = bb.y0 - pad, w = bb.x1 - bb.x0 + 2 * pad, h = bb.y1 - bb.y0 + 2 * pad;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + fmt(x0) + " " + fmt(-(y0 + h)) + " " +
                    fmt(w) + " " + fmt(h) + "\" width=\"800\" height=\"" + fmt(800.0 * h / w) + "\">\n";
  svg += "<style>.obstacle{fill:#555;stroke:none}.ellipse{fill:none;stroke:#1f77b4;stroke-width:0.03}"
         ".path{fill:none;stroke:#d62728;stroke-width:0.05}.start{fill:#2ca02c}.goal{fill:#ff7f0e}</style>\n";
  svg += "<g transform=\"scale(1,-1)\">\n";
  svg += obstacles + ellipses + path;
  svg += "<circle class=\"start\" cx=\"" + fmt(start.x()) + "\" cy=\"" + fmt(start.y()) + "\" r=\"0.2\"/>\n";
  svg += "<circle class=\"goal\" cx=\"" + fmt(goal.x()) + "\" cy=\"" + fmt(goal.y()) + "\" r=\"0.2\"/>\n";
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace ecan::io
