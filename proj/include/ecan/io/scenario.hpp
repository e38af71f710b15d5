#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecan/agent.hpp"
#include "ecan/planner.hpp"
#include "ecan/world.hpp"

namespace ecan::io {

using nlohmann::json;

class ScenarioError : public Error {
 public:
  using Error::Error;
};

struct BoxSpec {
  std::vector<double> min, max;
  bool operator==(const BoxSpec&) const = default;
};

/// Seeded uniform point obstacles; start and goal are kept clear by `clearance`.
struct GeneratedPoints {
  std::size_t count = 0;
  std::vector<double> min, max;
  double clearance = 1.5;
  bool operator==(const GeneratedPoints&) const = default;
};

struct AgentSpec {
  AgentKind kind = AgentKind::Point;
  double width = 0.6;
  double height = 0.3;
  PlaneDims plane;
  bool operator==(const AgentSpec&) const = default;
};

struct Scenario {
  int dimension = 2;
  AgentSpec agent;
  std::vector<double> start, heading, goal;
  std::vector<std::vector<double>> points;
  std::vector<BoxSpec> boxes;
  std::vector<std::vector<std::vector<double>>> polygons;
  std::optional<GeneratedPoints> generate;
  PlannerParams params;
  std::uint64_t seed = 0;

  bool has_finite_obstacles() const { return !boxes.empty() || !polygons.empty(); }
  bool operator==(const Scenario&) const = default;
};

namespace detail {

inline const json* member(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ScenarioError(path + ": expected a number");
  return v.get<double>();
}

inline void read_number(const json& j, const char* key, const std::string& path, double& out) {
  if (const json* v = member(j, key)) out = as_number(*v, path + key);
}

inline std::vector<double> as_point(const json& v, int dim, const std::string& path) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim) {
    throw ScenarioError(path + ": expected an array of " + std::to_string(dim) + " numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline const json& require(const json& j, const char* key, const std::string& path) {
  const json* v = member(j, key);
  if (!v) throw ScenarioError(path + key + ": missing");
  return *v;
}

inline const json& as_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ScenarioError(path + ": expected an object");
  return v;
}

inline const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ScenarioError(path + ": expected an array");
  return v;
}

inline AgentKind parse_agent_kind(const json& v, const std::string& path) {
  if (!v.is_string()) throw ScenarioError(path + ": expected a string");
  const auto s = v.get<std::string>();
  if (s == "point") return AgentKind::Point;
  if (s == "box") return AgentKind::Box2D;
  if (s == "plane") return AgentKind::Plane3D;
  throw ScenarioError(path + ": unknown agent kind '" + s + "'");
}

#define ECAN_PLANE_FIELDS(X)                                                                            \
  X(body_length) X(body_width) X(body_height) X(nose_length) X(front_span) X(front_chord) X(front_x)   \
  X(rear_span) X(rear_chord) X(rear_x) X(fin_height) X(fin_chord) X(fin_x) X(fin_spacing) X(thickness)

inline void parse_params(const json& j, const std::string& path, PlannerParams& p) {
  as_object(j, path);
  read_number(j, "delta1", path + ".", p.delta1);
  read_number(j, "alpha", path + ".", p.alpha);
  read_number(j, "beta", path + ".", p.beta);
  read_number(j, "gamma", path + ".", p.gamma);
  read_number(j, "epsilon", path + ".", p.epsilon);
  if (const json* v = member(j, "max_steps")) {
    if (!v->is_number_integer() || v->get<long long>() < 1) throw ScenarioError(path + ".max_steps: expected a positive integer");
    p.max_steps = v->get<int>();
  }
  if (const json* v = member(j, "point_step")) {
    const std::string s = v->is_string() ? v->get<std::string>() : "";
    if (s == "goal_distance") p.point_step = PointStepRule::GoalDistance;
    else if (s == "boundary_distance") p.point_step = PointStepRule::BoundaryDistance;
    else throw ScenarioError(path + ".point_step: expected \"goal_distance\" or \"boundary_distance\"");
  }
  if (const json* f = member(j, "fov")) {
    const std::string fp = path + ".fov.";
    as_object(*f, path + ".fov");
    read_number(*f, "range", fp, p.fov.range);
    read_number(*f, "theta", fp, p.fov.theta);
    read_number(*f, "phi", fp, p.fov.phi);
    read_number(*f, "dr", fp, p.fov.dr);
    read_number(*f, "dtheta", fp, p.fov.dtheta);
    read_number(*f, "dphi", fp, p.fov.dphi);
  }
}

inline void validate_params(const PlannerParams& p) {
  if (!(p.delta1 > 0)) throw ScenarioError("params.delta1: must be positive");
  if (!(p.alpha > 0 && p.alpha <= 1)) throw ScenarioError("params.alpha: must lie in (0, 1]");
  if (!(p.gamma > 0 && p.gamma <= 1e-3)) throw ScenarioError("params.gamma: must lie in (0, 1e-3]");
  if (!(p.beta > 0)) throw ScenarioError("params.beta: must be positive");
  if (!(p.epsilon > 0)) throw ScenarioError("params.epsilon: must be positive");
  try {
    p.fov.validate();
  } catch (const ContractViolation& e) {
    throw ScenarioError(std::string("params.fov: ") + e.what());
  }
}

template <int Dim>
Vec<Dim> to_vec(const std::vector<double>& v) {
  Vec<Dim> out;
  for (int i = 0; i < Dim; ++i) out[i] = v[static_cast<std::size_t>(i)];
  return out;
}

inline json point_json(const std::vector<double>& v) { return json(v); }

}  // namespace detail

template <int Dim>
AgentModel<Dim> make_agent(const Scenario& sc) {
  switch (sc.agent.kind) {
    case AgentKind::Point: return AgentModel<Dim>::point();
    case AgentKind::Box2D:
      if constexpr (Dim == 2) return AgentModel<2>::box(sc.agent.width, sc.agent.height);
      break;
    case AgentKind::Plane3D:
      if constexpr (Dim == 3) return AgentModel<3>::plane3d(sc.agent.plane);
      break;
  }
  throw ScenarioError(std::string("agent.kind: '") + to_string(sc.agent.kind) + "' is not available in " +
                      std::to_string(Dim) + "D");
}

template <int Dim>
Pose<Dim> start_pose(const Scenario& sc) {
  Pose<Dim> p;
  p.position = detail::to_vec<Dim>(sc.start);
  p.frame = frame_from_heading(Vec<Dim>(detail::to_vec<Dim>(sc.heading)));
  return p;
}

template <int Dim>
Vec<Dim> goal_of(const Scenario& sc) {
  return detail::to_vec<Dim>(sc.goal);
}

/// Finite shapes first, then listed points, then generated points that fall
/// outside every shape.
template <int Dim>
Environment<Dim> make_environment(const Scenario& sc) {
  Environment<Dim> env;
  for (const auto& b : sc.boxes) env.shapes.push_back(ConvexShape<Dim>::box(detail::to_vec<Dim>(b.min), detail::to_vec<Dim>(b.max)));
  if constexpr (Dim == 2) {
    for (const auto& poly : sc.polygons) {
      std::vector<Vec<2>> pts;
      for (const auto& v : poly) pts.push_back(detail::to_vec<2>(v));
      env.shapes.push_back(ConvexShape<2>::polygon(pts));
    }
  }
  for (const auto& p : sc.points) env.points.push_back(detail::to_vec<Dim>(p));
  if (sc.generate) {
    const auto& g = *sc.generate;
    const auto pts = random_points<Dim>(g.count, detail::to_vec<Dim>(g.min), detail::to_vec<Dim>(g.max), sc.seed,
                                        {detail::to_vec<Dim>(sc.start), detail::to_vec<Dim>(sc.goal)}, g.clearance);
    for (const auto& p : pts)
      if (!occupancy(env, p)) env.points.push_back(p);
  }
  return env;
}

namespace detail {

template <int Dim>
void validate_start(const Scenario& sc) {
  const auto env = make_environment<Dim>(sc);
  const auto agent = make_agent<Dim>(sc);
  const auto pose = start_pose<Dim>(sc);
  for (const auto& b : extremum_points(agent, pose)) {
    if (occupancy(env, b)) throw ScenarioError("start: agent overlaps a finite obstacle");
  }
  for (const auto& o : env.points) {
    const bool hit = agent.is_point() ? (o - pose.position).norm() <= Tolerances::coincidence
                                      : ecan::detail::inside_body_box(agent, pose, o);
    if (hit) throw ScenarioError("start: agent overlaps a point obstacle");
  }
}

}  // namespace detail

inline Scenario parse_scenario(const json& root) {
  using namespace detail;
  as_object(root, "scenario");
  Scenario sc;
  if (const json* d = member(root, "dimension")) {
    if (!d->is_number_integer() || (d->get<int>() != 2 && d->get<int>() != 3)) throw ScenarioError("dimension: expected 2 or 3");
    sc.dimension = d->get<int>();
  }
  const int dim = sc.dimension;

  if (const json* a = member(root, "agent")) {
    as_object(*a, "agent");
    if (const json* k = member(*a, "kind")) sc.agent.kind = parse_agent_kind(*k, "agent.kind");
    if (const json* dims = member(*a, "dims")) {
      as_object(*dims, "agent.dims");
      read_number(*dims, "width", "agent.dims.", sc.agent.width);
      read_number(*dims, "height", "agent.dims.", sc.agent.height);
#define ECAN_READ(name) read_number(*dims, #name, "agent.dims.", sc.agent.plane.name);
      ECAN_PLANE_FIELDS(ECAN_READ)
#undef ECAN_READ
    }
  }

  const json& start = as_object(require(root, "start", ""), "start");
  sc.start = as_point(require(start, "position", "start."), dim, "start.position");
  sc.goal = as_point(require(root, "goal", ""), dim, "goal");
  if (const json* h = member(start, "heading")) {
    sc.heading = as_point(*h, dim, "start.heading");
  } else {
    sc.heading.assign(static_cast<std::size_t>(dim), 0.0);
    for (int i = 0; i < dim; ++i) sc.heading[static_cast<std::size_t>(i)] = sc.goal[static_cast<std::size_t>(i)] - sc.start[static_cast<std::size_t>(i)];
  }
  double hn = 0.0;
  for (double v : sc.heading) hn += v * v;
  if (!(hn > 1e-24)) {
    if (member(start, "heading")) throw ScenarioError("start.heading: must be nonzero");
    sc.heading.assign(static_cast<std::size_t>(dim), 0.0);
    sc.heading[0] = 1.0;
  }

  if (const json* obs = member(root, "obstacles")) {
    as_object(*obs, "obstacles");
    if (const json* pts = member(*obs, "points")) {
      as_array(*pts, "obstacles.points");
      for (std::size_t i = 0; i < pts->size(); ++i)
        sc.points.push_back(as_point((*pts)[i], dim, "obstacles.points[" + std::to_string(i) + "]"));
    }
    if (const json* boxes = member(*obs, "boxes")) {
      as_array(*boxes, "obstacles.boxes");
      for (std::size_t i = 0; i < boxes->size(); ++i) {
        const std::string bp = "obstacles.boxes[" + std::to_string(i) + "]";
        const json& b = as_object((*boxes)[i], bp);
        BoxSpec spec{as_point(require(b, "min", bp + "."), dim, bp + ".min"), as_point(require(b, "max", bp + "."), dim, bp + ".max")};
        for (int k = 0; k < dim; ++k)
          if (!(spec.max[static_cast<std::size_t>(k)] > spec.min[static_cast<std::size_t>(k)])) throw ScenarioError(bp + ": max must exceed min on every axis");
        sc.boxes.push_back(std::move(spec));
      }
    }
    if (const json* polys = member(*obs, "polygons")) {
      as_array(*polys, "obstacles.polygons");
      if (dim != 2 && !polys->empty()) throw ScenarioError("obstacles.polygons: only supported in 2D");
      for (std::size_t i = 0; i < polys->size(); ++i) {
        const std::string pp = "obstacles.polygons[" + std::to_string(i) + "]";
        const json& poly = as_array((*polys)[i], pp);
        std::vector<std::vector<double>> verts;
        for (std::size_t k = 0; k < poly.size(); ++k) verts.push_back(as_point(poly[k], 2, pp + "[" + std::to_string(k) + "]"));
        sc.polygons.push_back(std::move(verts));
      }
    }
    if (const json* g = member(*obs, "generate")) {
      as_object(*g, "obstacles.generate");
      GeneratedPoints gp;
      const json& c = require(*g, "count", "obstacles.generate.");
      if (!c.is_number_integer() || c.get<long long>() < 0) throw ScenarioError("obstacles.generate.count: expected a nonnegative integer");
      gp.count = c.get<std::size_t>();
      gp.min = as_point(require(*g, "min", "obstacles.generate."), dim, "obstacles.generate.min");
      gp.max = as_point(require(*g, "max", "obstacles.generate."), dim, "obstacles.generate.max");
      read_number(*g, "clearance", "obstacles.generate.", gp.clearance);
      sc.generate = gp;
    }
  }

  if (const json* s = member(root, "seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0)) throw ScenarioError("seed: expected a nonnegative integer");
    sc.seed = s->get<std::uint64_t>();
  }

  sc.params = PlannerParams::defaults(dim, sc.has_finite_obstacles());
  if (const json* p = member(root, "params")) parse_params(*p, "params", sc.params);
  validate_params(sc.params);

  try {
    if (dim == 2) validate_start<2>(sc);
    else validate_start<3>(sc);
  } catch (const ContractViolation& e) {
    throw ScenarioError(e.what());
  }
  return sc;
}

inline Scenario load_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("parse error: ") + e.what());
  }
  return parse_scenario(root);
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

/// Canonical form: every field written, defaults included.
inline json scenario_json(const Scenario& sc) {
  json j;
  j["dimension"] = sc.dimension;
  json dims = json::object();
  if (sc.agent.kind == AgentKind::Box2D) {
    dims["width"] = sc.agent.width;
    dims["height"] = sc.agent.height;
  } else if (sc.agent.kind == AgentKind::Plane3D) {
#define ECAN_WRITE(name) dims[#name] = sc.agent.plane.name;
    ECAN_PLANE_FIELDS(ECAN_WRITE)
#undef ECAN_WRITE
  }
  j["agent"] = {{"kind", to_string(sc.agent.kind)}, {"dims", dims}};
  j["start"] = {{"position", sc.start}, {"heading", sc.heading}};
  j["goal"] = sc.goal;
  json obs;
  obs["points"] = sc.points.empty() ? json::array() : json(sc.points);
  obs["boxes"] = json::array();
  for (const auto& b : sc.boxes) obs["boxes"].push_back({{"min", b.min}, {"max", b.max}});
  obs["polygons"] = sc.polygons.empty() ? json::array() : json(sc.polygons);
  if (sc.generate) {
    obs["generate"] = {{"count", sc.generate->count}, {"min", sc.generate->min}, {"max", sc.generate->max},
                       {"clearance", sc.generate->clearance}};
  }
  j["obstacles"] = obs;
  const auto& p = sc.params;
  j["params"] = {{"delta1", p.delta1},
                 {"alpha", p.alpha},
                 {"beta", p.beta},
                 {"gamma", p.gamma},
                 {"epsilon", p.epsilon},
                 {"max_steps", p.max_steps},
                 {"point_step", to_string(p.point_step)},
                 {"fov",
                  {{"range", p.fov.range},
                   {"theta", p.fov.theta},
                   {"phi", p.fov.phi},
                   {"dr", p.fov.dr},
                   {"dtheta", p.fov.dtheta},
                   {"dphi", p.fov.dphi}}}};
  j["seed"] = sc.seed;
  return j;
}

inline std::string save_scenario(const Scenario& sc) { return scenario_json(sc).dump(2) + "\n"; }

#undef ECAN_PLANE_FIELDS

}  // namespace ecan::io
