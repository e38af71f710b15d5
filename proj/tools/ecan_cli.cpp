#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "ecan/io/scenario.hpp"
#include "ecan/io/stats.hpp"
#include "ecan/io/svg.hpp"
#include "ecan/io/trace.hpp"
#include "ecan/planner.hpp"

namespace fs = std::filesystem;
using namespace ecan;

namespace {

// ECAN_LOG: 0 quiet, 1 summary (default), 2 per-step lines on stderr
int log_level() {
  const char* v = std::getenv("ECAN_LOG");
  if (!v || !*v) return 1;
  const std::string s(v);
  if (s == "quiet" || s == "0") return 0;
  if (s == "debug" || s == "2") return 2;
  return 1;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

std::string read_file(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunOptions {
  std::string scenario, out;
  bool svg = false, stats = false;
  long long seed = -1;
  int max_steps = 0;
  std::string projection = "xy";
};

template <int Dim>
int run_dim(const io::Scenario& sc, const RunOptions& opt) {
  const int verbose = log_level();
  const auto env = io::make_environment<Dim>(sc);
  const auto agent = io::make_agent<Dim>(sc);
  auto step_log = [&](const StepRecord<Dim>& s) {
    if (verbose < 2) return;
    std::fprintf(stderr, "t=%d k=%zu branch=%s l_n=%.6f fit=%.4fs kkt=%.2e\n", s.t, s.cloud.size(), to_string(s.branch),
                 s.l_n, s.time_fit, s.kkt);
  };
  const auto tr = plan(env, agent, io::start_pose<Dim>(sc), io::goal_of<Dim>(sc), sc.params, step_log);

  fs::create_directories(opt.out);
  const fs::path dir(opt.out);
  write_file(dir / "trace.jsonl", io::trace_jsonl(tr));
  if (opt.stats) write_file(dir / "stats.csv", io::stats_csv(tr));
  if (opt.svg) write_file(dir / "plan.svg", io::render_svg(tr, sc, io::parse_projection(opt.projection)));

  if (verbose >= 1) {
    const auto rs = io::run_stats(tr);
    std::printf("outcome %s steps %zu final_distance %.6g mean_fit %.4fs constraints %d..%d\n", to_string(tr.outcome),
                tr.steps.size(), tr.final_distance, rs.fit.mean, rs.min_constraints, rs.max_constraints);
  }
  if (tr.outcome != Outcome::GoalReached) {
    std::cerr << to_string(tr.outcome);
    if (!tr.message.empty()) std::cerr << ": " << tr.message;
    std::cerr << "\n";
    return 1;
  }
  return 0;
}

int cmd_run(const RunOptions& opt) {
  auto sc = io::load_scenario_file(opt.scenario);
  if (opt.seed >= 0) sc.seed = static_cast<std::uint64_t>(opt.seed);
  if (opt.max_steps > 0) sc.params.max_steps = opt.max_steps;
  return sc.dimension == 2 ? run_dim<2>(sc, opt) : run_dim<3>(sc, opt);
}

template <int Dim>
int validate_dim(const std::string& text, const io::Scenario& sc) {
  const auto tr = io::parse_trace<Dim>(text);
  const auto rep = validate_trace(io::make_environment<Dim>(sc), io::make_agent<Dim>(sc), tr);
  for (const auto& v : rep.violations) std::printf("step %d %s: %s\n", v.step, to_string(v.kind), v.detail.c_str());
  std::printf("%zu violations, %zu body samples, outcome %s\n", rep.violations.size(), rep.samples_checked,
              to_string(tr.outcome));
  return rep.ok() ? 0 : 1;
}

int cmd_validate(const std::string& trace_path, const std::string& scenario_path) {
  const auto sc = io::load_scenario_file(scenario_path);
  const auto text = read_file(trace_path);
  if (io::trace_dimension(text) != sc.dimension) throw std::runtime_error("trace and scenario dimensions differ");
  return sc.dimension == 2 ? validate_dim<2>(text, sc) : validate_dim<3>(text, sc);
}

int cmd_grid_info(const std::string& scenario_path) {
  const auto sc = io::load_scenario_file(scenario_path);
  const auto& f = sc.params.fov;
  const std::size_t n = sc.dimension == 2 ? build_fov_grid<2>(f).size() : build_fov_grid<3>(f).size();
  std::printf("dimension %d\nrange %g theta %g phi %g dr %g dtheta %g dphi %g\n", sc.dimension, f.range, f.theta, f.phi,
              f.dr, f.dtheta, f.dphi);
  std::printf("formula %.6f\nN %zu\n", fov_formula_count(f, sc.dimension), n);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ecan: online ellipsoid-tunnel path planner"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "plan a scenario and write trace/stats/svg");
  run_cmd->add_option("scenario", run.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run.out, "output directory")->required();
  run_cmd->add_flag("--svg", run.svg, "write plan.svg");
  run_cmd->add_flag("--stats", run.stats, "write stats.csv");
  run_cmd->add_option("--seed", run.seed, "override the world seed")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--max-steps", run.max_steps, "override max_steps")->check(CLI::PositiveNumber);
  run_cmd->add_option("--projection", run.projection, "3D svg plane")->check(CLI::IsMember({"xy", "xz", "yz"}));

  std::string trace_path, scenario_path, grid_path;
  auto* val_cmd = app.add_subcommand("validate", "audit a trace against its scenario");
  val_cmd->add_option("trace", trace_path, "trace.jsonl")->required()->check(CLI::ExistingFile);
  val_cmd->add_option("scenario", scenario_path, "scenario JSON")->required()->check(CLI::ExistingFile);

  auto* grid_cmd = app.add_subcommand("grid-info", "print the FOV lattice size");
  grid_cmd->add_option("scenario", grid_path, "scenario JSON")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*val_cmd) return cmd_validate(trace_path, scenario_path);
    if (*grid_cmd) return cmd_grid_info(grid_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
