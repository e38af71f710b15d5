#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "ecan/planner.hpp"

namespace ecan::io {

using nlohmann::json;

class TraceError : public Error {
 public:
  using Error::Error;
};

namespace detail {

template <int Dim>
json vec_json(const Vec<Dim>& v) {
  json a = json::array();
  for (int i = 0; i < Dim; ++i) a.push_back(v[i]);
  return a;
}

template <int Dim>
json mat_json(const Mat<Dim>& m) {
  json a = json::array();
  for (int i = 0; i < Dim; ++i)
    for (int k = 0; k < Dim; ++k) a.push_back(m(i, k));
  return a;
}

template <int Dim>
Vec<Dim> json_vec(const json& a, const char* what) {
  if (!a.is_array() || a.size() != static_cast<std::size_t>(Dim)) throw TraceError(std::string(what) + ": bad vector");
  Vec<Dim> v;
  for (int i = 0; i < Dim; ++i) v[i] = a[static_cast<std::size_t>(i)].get<double>();
  return v;
}

template <int Dim>
Mat<Dim> json_mat(const json& a, const char* what) {
  if (!a.is_array() || a.size() != static_cast<std::size_t>(Dim * Dim)) throw TraceError(std::string(what) + ": bad matrix");
  Mat<Dim> m;
  for (int i = 0; i < Dim; ++i)
    for (int k = 0; k < Dim; ++k) m(i, k) = a[static_cast<std::size_t>(i * Dim + k)].get<double>();
  return m;
}

inline Outcome parse_outcome(const std::string& s) {
  for (Outcome o : {Outcome::GoalReached, Outcome::NoFeasibleEllipsoid, Outcome::Stalled, Outcome::MaxSteps})
    if (s == to_string(o)) return o;
  throw TraceError("unknown outcome '" + s + "'");
}

}  // namespace detail

template <int Dim>
json step_json(const StepRecord<Dim>& s) {
  using namespace detail;
  json cloud = json::array();
  for (const auto& p : s.cloud) cloud.push_back(vec_json<Dim>(p));
  return {{"t", s.t},
          {"position", vec_json<Dim>(s.pose.position)},
          {"frame", mat_json<Dim>(s.pose.frame)},
          {"cloud_size", s.cloud.size()},
          {"P", mat_json<Dim>(s.ellipsoid.P)},
          {"q", vec_json<Dim>(s.ellipsoid.q)},
          {"r", s.ellipsoid.r},
          {"fit_goal", vec_json<Dim>(s.fit_goal)},
          {"z_e", vec_json<Dim>(s.z_e)},
          {"l_e", s.l_e},
          {"z_n", vec_json<Dim>(s.z_n)},
          {"l_n", s.l_n},
          {"turn", s.turn},
          {"branch", to_string(s.branch)},
          {"time_fit", s.time_fit},
          {"time_dir", s.time_dir},
          {"time_step", s.time_step},
          {"step_program", s.step_program},
          {"constraints", s.constraints},
          {"agent_constraints", s.agent_constraints},
          {"psd_blocks", s.psd_blocks},
          {"kkt", s.kkt},
          {"gap", s.gap},
          {"status", to_string(s.fit_status)},
          {"cloud", cloud}};
}

template <int Dim>
StepRecord<Dim> parse_step(const json& j) {
  using namespace detail;
  StepRecord<Dim> s;
  s.t = j.at("t").get<int>();
  s.pose.position = json_vec<Dim>(j.at("position"), "position");
  s.pose.frame = json_mat<Dim>(j.at("frame"), "frame");
  s.ellipsoid.P = json_mat<Dim>(j.at("P"), "P");
  s.ellipsoid.q = json_vec<Dim>(j.at("q"), "q");
  s.ellipsoid.r = j.at("r").get<double>();
  s.fit_goal = json_vec<Dim>(j.at("fit_goal"), "fit_goal");
  s.z_e = json_vec<Dim>(j.at("z_e"), "z_e");
  s.l_e = j.at("l_e").get<double>();
  s.z_n = json_vec<Dim>(j.at("z_n"), "z_n");
  s.l_n = j.at("l_n").get<double>();
  s.turn = j.at("turn").get<double>();
  s.branch = j.at("branch").get<std::string>() == "boundary" ? Branch::Boundary : Branch::Goal;
  s.time_fit = j.value("time_fit", 0.0);
  s.time_dir = j.value("time_dir", 0.0);
  s.time_step = j.value("time_step", 0.0);
  s.step_program = j.value("step_program", false);
  s.constraints = j.at("constraints").get<int>();
  s.agent_constraints = j.at("agent_constraints").get<int>();
  s.psd_blocks = j.value("psd_blocks", 1);
  s.kkt = j.value("kkt", 0.0);
  s.gap = j.value("gap", 0.0);
  const std::string st = j.value("status", std::string("Optimal"));
  for (SolveStatus v : {SolveStatus::Optimal, SolveStatus::Infeasible, SolveStatus::MaxIterations})
    if (st == to_string(v)) s.fit_status = v;
  for (const auto& p : j.at("cloud")) s.cloud.push_back(json_vec<Dim>(p, "cloud"));
  return s;
}

/// One line per step, then a closing summary line.
template <int Dim>
std::string trace_jsonl(const PlanTrace<Dim>& tr) {
  using namespace detail;
  std::string out;
  for (const auto& s : tr.steps) out += step_json(s).dump() + "\n";
  const json summary = {{"summary", true},
                        {"dimension", Dim},
                        {"outcome", to_string(tr.outcome)},
                        {"steps", tr.steps.size()},
                        {"final_position", vec_json<Dim>(tr.final_pose.position)},
                        {"final_frame", mat_json<Dim>(tr.final_pose.frame)},
                        {"goal", vec_json<Dim>(tr.goal)},
                        {"epsilon", tr.epsilon},
                        {"final_distance", tr.final_distance},
                        {"phase1_slack", tr.phase1_slack},
                        {"message", tr.message}};
  out += summary.dump() + "\n";
  return out;
}

template <int Dim>
PlanTrace<Dim> parse_trace(const std::string& text) {
  using namespace detail;
  PlanTrace<Dim> tr;
  std::istringstream in(text);
  std::string line;
  bool closed = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      if (j.value("summary", false)) {
        if (j.at("dimension").get<int>() != Dim) throw TraceError("trace dimension mismatch");
        tr.outcome = parse_outcome(j.at("outcome").get<std::string>());
        tr.final_pose.position = json_vec<Dim>(j.at("final_position"), "final_position");
        tr.final_pose.frame = json_mat<Dim>(j.at("final_frame"), "final_frame");
        tr.goal = json_vec<Dim>(j.at("goal"), "goal");
        tr.epsilon = j.at("epsilon").get<double>();
        tr.final_distance = j.at("final_distance").get<double>();
        tr.phase1_slack = j.value("phase1_slack", 0.0);
        tr.message = j.value("message", std::string());
        closed = true;
      } else {
        tr.steps.push_back(parse_step<Dim>(j));
      }
    } catch (const json::exception& e) {
      throw TraceError("trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!closed) throw TraceError("trace has no summary line");
  return tr;
}

/// Reads only the summary line's dimension.
inline int trace_dimension(const std::string& text) {
  std::istringstream in(text);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  try {
    return json::parse(last).at("dimension").get<int>();
  } catch (const json::exception& e) {
    throw TraceError(std::string("trace summary: ") + e.what());
  }
}

}  // namespace ecan::io
