#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ecan/planner.hpp"

namespace ecan::io {

struct Moments {
  std::size_t calls = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

struct RunStats {
  Moments fit, direction, step_length;
  int min_constraints = 0;
  int max_constraints = 0;
};

inline Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.calls = xs.size();
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.stddev = std::sqrt(ss / static_cast<double>(xs.size()));
  return m;
}

template <int Dim>
RunStats run_stats(const PlanTrace<Dim>& tr) {
  std::vector<double> fit, dir, step;
  RunStats rs;
  for (const auto& s : tr.steps) {
    fit.push_back(s.time_fit);
    if (s.branch == Branch::Boundary) dir.push_back(s.time_dir);
    if (s.step_program) step.push_back(s.time_step);
    rs.min_constraints = fit.size() == 1 ? s.constraints : std::min(rs.min_constraints, s.constraints);
    rs.max_constraints = std::max(rs.max_constraints, s.constraints);
  }
  rs.fit = moments(fit);
  rs.direction = moments(dir);
  rs.step_length = moments(step);
  return rs;
}

/// One row per step; then "mean" and "stddev" rows over the calls actually made.
template <int Dim>
std::string stats_csv(const PlanTrace<Dim>& tr) {
  char buf[256];
  std::string out = "t,solve_time_eq1,constraints,solve_time_dir,solve_time_steplen\n";
  for (const auto& s : tr.steps) {
    std::snprintf(buf, sizeof buf, "%d,%.9f,%d,%.9f,%.9f\n", s.t, s.time_fit, s.constraints, s.time_dir, s.time_step);
    out += buf;
  }
  const RunStats rs = run_stats(tr);
  std::vector<double> cons;
  for (const auto& s : tr.steps) cons.push_back(s.constraints);
  const Moments c = moments(cons);
  std::snprintf(buf, sizeof buf, "mean,%.9f,%.3f,%.9f,%.9f\n", rs.fit.mean, c.mean, rs.direction.mean, rs.step_length.mean);
  out += buf;
  std::snprintf(buf, sizeof buf, "stddev,%.9f,%.3f,%.9f,%.9f\n", rs.fit.stddev, c.stddev, rs.direction.stddev,
                rs.step_length.stddev);
  out += buf;
  return out;
}

}  // namespace ecan::io
