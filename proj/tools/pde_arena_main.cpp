// pde-arena: solve the model problems with FEM and PINNs, build fine-mesh
// ground truths, and run the solve/evaluate/accuracy comparison.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "pdearena/bench.hpp"
#include "pdearena/evolve.hpp"
#include "pdearena/fem_problems.hpp"
#include "pdearena/manifest.hpp"
#include "pdearena/train.hpp"

namespace {

using namespace pdearena;
namespace fs = std::filesystem;

struct GlobalOpts {
  std::string manifest_path;
  std::string cache_dir;
  std::string out_dir = "out";
  std::string scale = "desk";
  std::uint64_t seed = 0;
  int repeats = 0;  // 0: manifest default for the scale
  bool yes_long_run = false;
};

Scale parse_scale(const GlobalOpts& g) {
  if (g.scale == "paper") {
    if (!g.yes_long_run)
      throw CLI::ValidationError(
          "--scale paper replays the full-size study and can run for hours; "
          "acknowledge with --yes-long-run");
    return Scale::Paper;
  }
  if (g.scale == "desk") return Scale::Desk;
  throw CLI::ValidationError("--scale must be desk or paper");
}

std::string resolve_cache_dir(const GlobalOpts& g) {
  if (!g.cache_dir.empty()) return g.cache_dir;
  if (const char* env = std::getenv("PDE_ARENA_CACHE")) return env;
  return "gt";
}

std::vector<ProblemId> parse_problems(const std::string& name) {
  if (name == "all") {
    std::vector<ProblemId> all;
    for (int i = 0; i < kProblemCount; ++i)
      all.push_back(static_cast<ProblemId>(i));
    return all;
  }
  const auto id = problem_from_string(name);
  if (!id)
    throw CLI::ValidationError("unknown problem '" + name +
                               "' (try poisson1d, poisson2d, poisson3d, "
                               "allen_cahn1d, schrodinger1d, schrodinger2d, "
                               "or all)");
  return {*id};
}

// Keeps desk machines out of swap: refuse meshes beyond a sane footprint.
void check_mesh_budget(const ProblemSpec& p, long n) {
  const double max_nodes = 8e6, max_cells = 2e7;
  const double nd = static_cast<double>(n);
  double nodes = nd + 1, cells = nd;
  if (p.spatial_dim == 2) {
    nodes = (nd + 1) * (nd + 1);
    cells = 2 * nd * nd;
  } else if (p.spatial_dim == 3) {
    nodes = (nd + 1) * (nd + 1) * (nd + 1);
    cells = 6 * nd * nd * nd;
  }
  if (n < 1 || nodes > max_nodes || cells > max_cells)
    throw CLI::ValidationError(
        "mesh n=" + std::to_string(n) +
        " exceeds the resource budget (max 8e6 nodes / 2e7 cells)");
}

std::string arch_tag(const std::vector<int>& arch) {
  std::string s;
  for (std::size_t i = 0; i < arch.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(arch[i]);
  }
  return s;
}

int cmd_gt_build(const GlobalOpts& g, const std::string& problem, bool force) {
  const Manifest m = load_manifest(g.manifest_path);
  const Scale scale = parse_scale(g);
  GroundTruthStore store(resolve_cache_dir(g));
  for (ProblemId id : parse_problems(problem)) {
    const ProblemSpec p = build_problem(id);
    if (p.stationary()) {
      std::cout << to_string(id) << ": analytic ground truth, nothing to build\n";
      continue;
    }
    const EvalGridSet grid = build_eval_grid(p, m, scale);
    store.values(p, m, scale, grid, force);
    std::cout << to_string(id) << ": ground truth cached under "
              << store.directory() << "\n";
  }
  return 0;
}

ProblemSpec build_problem_with_eps(ProblemId id, double eps_override) {
  ProblemSpec p = build_problem(id);
  if (eps_override > 0.0) {
    if (id != ProblemId::AllenCahn1d)
      throw CLI::ValidationError("--eps only applies to allen_cahn1d");
    p.eps = eps_override;
  }
  return p;
}

int cmd_fem_solve(const GlobalOpts& g, const std::string& problem, long n,
                  double eps_override) {
  const Manifest m = load_manifest(g.manifest_path);
  const Scale scale = parse_scale(g);
  const auto ids = parse_problems(problem);
  if (ids.size() != 1)
    throw CLI::ValidationError("fem solve takes a single problem");
  const ProblemSpec p = build_problem_with_eps(ids[0], eps_override);
  check_mesh_budget(p, n);
  fs::create_directories(g.out_dir);
  const Mesh mesh = build_problem_mesh(p, static_cast<int>(n));
  const std::string mesh_id =
      to_string(p.id) + ":n=" + std::to_string(n);

  if (p.stationary()) {
    const StationarySolve s = solve_stationary(p, mesh);
    const EvalGridSet grid = build_eval_grid(p, m, scale);
    std::vector<std::array<double, 3>> pts(grid.spatial.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      pts[i] = {grid.spatial[i][0], grid.spatial[i][1], grid.spatial[i][2]};
    const FieldEval ev = evaluate_field(s.field, pts);
    std::vector<double> exact(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      exact[i] = p.analytic(pts[i].data());
    const double err = l2_relative_error(ev.values, exact);
    const fs::path path =
        fs::path(g.out_dir) / ("fem_" + to_string(p.id) + "_n" +
                               std::to_string(n) + ".json");
    std::ofstream out(path, std::ios::trunc);
    out << field_to_json(s.field, mesh_id) << "\n";
    std::cout << to_string(p.id) << " n=" << n << ": solve " << s.seconds
              << " s (" << s.cg_iterations << " cg iterations), interpolate "
              << ev.seconds << " s, l2 rel error " << err << "\n"
              << "field written to " << path.string() << "\n";
    return 0;
  }

  const EvalGridSet grid = build_eval_grid(p, m, scale);
  const Trajectory traj =
      run_evolution(evolution_problem(p), mesh, grid.bench_dt, p.t_final,
                    Scheme::SemiImplicit, grid.times);
  const fs::path path =
      fs::path(g.out_dir) / ("fem_" + to_string(p.id) + "_n" +
                             std::to_string(n) + "_trajectory.jsonl");
  std::ofstream out(path, std::ios::trunc);
  for (const EvolutionState& snap : traj.snapshots) {
    nlohmann::json j;
    j["t"] = snap.t;
    auto& fields = j["fields"] = nlohmann::json::array();
    for (const FemField& f : snap.fields) fields.push_back(f.coefficients);
    out << j.dump() << "\n";
  }
  std::cout << to_string(p.id) << " n=" << n << ": " << traj.snapshots.size()
            << " snapshots in " << traj.solve_seconds << " s\n"
            << "trajectory written to " << path.string() << "\n";
  return 0;
}

int cmd_pinn_train(const GlobalOpts& g, const std::string& problem,
                   std::vector<int> arch, double eps_override) {
  const Manifest m = load_manifest(g.manifest_path);
  const Scale scale = parse_scale(g);
  const auto ids = parse_problems(problem);
  if (ids.size() != 1)
    throw CLI::ValidationError("pinn train takes a single problem");
  const ProblemSpec p = build_problem_with_eps(ids[0], eps_override);
  if (arch.empty()) arch = m.at(p.id).archs(scale).front();
  fs::create_directories(g.out_dir);

  TrainOptions opts = schedule_options(m, p.id, scale, g.seed);
  const std::string tag = to_string(p.id) + "_" + arch_tag(arch);
  opts.log_path = (fs::path(g.out_dir) / ("pinn_" + tag + "_log.jsonl")).string();
  const TrainResult res = train_pinn(p, arch, opts);

  const fs::path ckpt = fs::path(g.out_dir) / ("pinn_" + tag + ".json");
  std::ofstream out(ckpt, std::ios::trunc);
  out << params_to_json(res.params) << "\n";
  std::cout << to_string(p.id) << " " << arch_tag(arch) << ": "
            << res.epochs_run << " epochs + refinement in "
            << res.train_seconds << " s, final loss " << res.final_loss << "\n"
            << "checkpoint written to " << ckpt.string() << "\n"
            << "training log written to " << opts.log_path << "\n";
  return 0;
}

int cmd_compare(const GlobalOpts& g, const std::string& problem,
                const std::string& method, const std::string& format) {
  const Manifest m = load_manifest(g.manifest_path);
  const Scale scale = parse_scale(g);
  BenchSelection sel;
  sel.problems = parse_problems(problem);
  sel.run_fem = method != "pinn";
  sel.run_pinn = method != "fem";
  const int repeats = g.repeats > 0 ? g.repeats : m.repeats(scale);
  GroundTruthStore store(resolve_cache_dir(g));
  const auto records = run_benchmark(m, sel, repeats, g.seed, scale, store);
  const auto written = emit_report(records, format, g.out_dir);
  int failures = 0;
  for (const auto& r : records) {
    if (!r.ok()) {
      ++failures;
      std::cerr << r.problem << " " << r.method << " " << r.config
                << " failed: " << r.error_message << "\n";
    } else {
      std::cout << r.problem << " " << r.method << " " << r.config
                << ": solve " << r.solve_time_s << " s, eval " << r.eval_time_s
                << " s, l2 rel error " << r.l2_rel_error << "\n";
    }
  }
  for (const auto& w : written) std::cout << "wrote " << w << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_report(const std::string& in_path, const std::string& format,
               const std::string& out_dir) {
  std::ifstream in(in_path);
  if (!in) throw CLI::ValidationError("cannot open " + in_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto records = records_from_json(ss.str());
  for (const auto& w : emit_report(records, format, out_dir))
    std::cout << "wrote " << w << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pde-arena: FEM and PINN solvers for six model PDEs with a "
               "solve-time / evaluation-time / accuracy benchmark harness"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--manifest", g.manifest_path,
                 "problem manifest JSON (default: built-in)");
  app.add_option("--cache", g.cache_dir,
                 "ground-truth cache directory (default: $PDE_ARENA_CACHE or ./gt)");
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "run seed")->capture_default_str();
  app.add_option("--scale", g.scale, "desk or paper")->capture_default_str();
  app.add_option("--repeats", g.repeats,
                 "timing repeats (default: manifest value for the scale)");
  app.add_flag("--yes-long-run", g.yes_long_run,
               "acknowledge the long runtime of --scale paper");

  std::string problem = "all", method = "both", format = "both";
  std::string report_in;
  long fem_n = 0;
  std::string arch_str;
  bool gt_force = false;
  double eps_override = 0.0;

  auto* gt = app.add_subcommand("gt", "ground-truth management");
  gt->fallthrough();
  gt->require_subcommand(1);
  auto* gt_build = gt->add_subcommand("build", "build and cache ground truths");
  gt_build->fallthrough();
  gt_build->add_option("--problem", problem, "problem id or 'all'")
      ->capture_default_str();
  gt_build->add_flag("--force", gt_force, "rebuild even if cached");

  auto* fem = app.add_subcommand("fem", "finite element runs");
  fem->fallthrough();
  fem->require_subcommand(1);
  auto* fem_solve = fem->add_subcommand("solve", "solve one problem on one mesh");
  fem_solve->fallthrough();
  fem_solve->add_option("--problem", problem, "problem id")->required();
  fem_solve->add_option("--n", fem_n, "cells per side")->required();
  fem_solve->add_option("--eps", eps_override,
                        "override the Allen-Cahn interface width, e.g. 0.001");

  auto* pinn = app.add_subcommand("pinn", "neural network runs");
  pinn->fallthrough();
  pinn->require_subcommand(1);
  auto* pinn_train = pinn->add_subcommand("train", "train one architecture");
  pinn_train->fallthrough();
  pinn_train->add_option("--problem", problem, "problem id")->required();
  pinn_train->add_option("--arch", arch_str,
                         "hidden widths + output width, e.g. 20,20,1 "
                         "(default: first manifest architecture)");
  pinn_train->add_option("--eps", eps_override,
                         "override the Allen-Cahn interface width");

  auto* compare = app.add_subcommand(
      "compare", "benchmark FEM against PINNs and emit records");
  compare->fallthrough();
  compare->add_option("--problem", problem, "problem id or 'all'")
      ->capture_default_str();
  compare->add_option("--method", method, "fem, pinn, or both")
      ->capture_default_str();
  compare->add_option("--format", format, "csv, json, or both")
      ->capture_default_str();

  auto* report = app.add_subcommand("report", "re-emit reports from records");
  report->fallthrough();
  report->add_option("--in", report_in, "records JSON file")->required();
  report->add_option("--format", format, "csv, json, or both")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help text, exit 0
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gt_build->parsed()) return cmd_gt_build(g, problem, gt_force);
    if (fem_solve->parsed()) return cmd_fem_solve(g, problem, fem_n, eps_override);
    if (pinn_train->parsed()) {
      std::vector<int> arch;
      if (!arch_str.empty()) {
        std::stringstream ss(arch_str);
        std::string item;
        while (std::getline(ss, item, ',')) arch.push_back(std::stoi(item));
      }
      return cmd_pinn_train(g, problem, arch, eps_override);
    }
    if (compare->parsed()) return cmd_compare(g, problem, method, format);
    if (report->parsed()) return cmd_report(report_in, format, g.out_dir);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
