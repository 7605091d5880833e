// Integration acceptance suite: runs the project's exit criteria end to end
// and prints one PASS/FAIL line per criterion. Exit code = number of
// failures.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "pdearena/bench.hpp"
#include "pdearena/evolve.hpp"
#include "pdearena/fem_problems.hpp"
#include "pdearena/manifest.hpp"
#include "pdearena/timer.hpp"
#include "pdearena/train.hpp"

using namespace pdearena;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s: %s\n", pass ? "PASS" : "FAIL", id, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double fem_error_on_grid(const ProblemSpec& p, int n, const Manifest& m,
                         double* solve_seconds = nullptr,
                         double* eval_seconds = nullptr) {
  const Mesh mesh = build_problem_mesh(p, n);
  const StationarySolve s = solve_stationary(p, mesh);
  const EvalGridSet grid = build_eval_grid(p, m, Scale::Desk);
  std::vector<std::array<double, 3>> pts(grid.spatial.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    pts[i] = {grid.spatial[i][0], grid.spatial[i][1], grid.spatial[i][2]};
  const FieldEval ev = evaluate_field(s.field, pts);
  std::vector<double> exact(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    exact[i] = p.analytic(pts[i].data());
  if (solve_seconds) *solve_seconds = s.seconds;
  if (eval_seconds) *eval_seconds = ev.seconds;
  return l2_relative_error(ev.values, exact);
}

// ---------------------------------------------------------------------------

void criterion_1_fem_convergence(const Manifest& m) {
  WallTimer timer;
  bool pass = true;
  std::ostringstream detail;
  const struct {
    ProblemId id;
    std::vector<int> ns;
  } fams[] = {{ProblemId::Poisson1d, {64, 128, 256}},
              {ProblemId::Poisson2d, {50, 100, 200}},
              {ProblemId::Poisson3d, {16, 32}}};
  for (const auto& fam : fams) {
    const ProblemSpec p = build_problem(fam.id);
    std::vector<double> errs;
    for (int n : fam.ns) errs.push_back(fem_error_on_grid(p, n, m));
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
      const double ratio = errs[i] / errs[i + 1];
      detail << to_string(fam.id) << " " << fam.ns[i] << "->" << fam.ns[i + 1]
             << ": " << fmt(ratio) << "  ";
      pass = pass && ratio >= 3.2 && ratio <= 4.8;
    }
  }
  const double secs = timer.seconds();
  detail << "(" << fmt(secs) << " s)";
  pass = pass && secs < 120.0;
  report(1, "FEM convergence order in [3.2, 4.8]", pass, detail.str());
}

void criterion_2_fem_floor(const Manifest& m) {
  const ProblemSpec p = build_problem(ProblemId::Poisson1d);
  const double err = fem_error_on_grid(p, 4096, m);
  report(2, "1D Poisson n=4096 error <= 1e-6", err <= 1e-6,
         "l2 rel error " + fmt(err));
}

struct PinnOutcome {
  double median_error = 0.0;
  double median_train_seconds = 0.0;
  std::vector<double> errors, times;
};

PinnOutcome criterion_3_pinn_poisson1d(const Manifest& m) {
  const ProblemSpec p = build_problem(ProblemId::Poisson1d);
  const EvalGridSet grid = build_eval_grid(p, m, Scale::Desk);
  GroundTruthStore store("/tmp/pdearena_acceptance_gt");
  const std::vector<double> gt = store.values(p, m, Scale::Desk, grid);

  WallTimer timer;
  PinnOutcome out;
  for (std::uint64_t seed : {1, 2, 3}) {
    const TrainOptions opts = schedule_options(m, p.id, Scale::Desk, seed);
    const TrainResult res = train_pinn(p, std::vector<int>{20, 20, 1}, opts);
    const PinnEval ev = evaluate_pinn(p, res.params, grid.spatial);
    out.errors.push_back(l2_relative_error(ev.values, gt));
    out.times.push_back(res.train_seconds);
  }
  std::vector<double> sorted = out.errors;
  std::sort(sorted.begin(), sorted.end());
  out.median_error = sorted[1];
  std::vector<double> st = out.times;
  std::sort(st.begin(), st.end());
  out.median_train_seconds = st[1];

  // the full-size schedule must also be available and reach 1e-3
  const TrainOptions paper = schedule_options(m, p.id, Scale::Paper, 1);
  const TrainResult full = train_pinn(p, std::vector<int>{20, 20, 1}, paper);
  const double paper_err =
      l2_relative_error(evaluate_pinn(p, full.params, grid.spatial).values, gt);

  const double secs = timer.seconds();
  const bool pass =
      out.median_error <= 1e-2 && paper_err <= 1e-3 && secs <= 600.0;
  report(3, "PINN [20,20,1]: desk median of 3 seeds <= 1e-2, paper <= 1e-3",
         pass,
         "desk errors {" + fmt(out.errors[0]) + ", " + fmt(out.errors[1]) +
             ", " + fmt(out.errors[2]) + "}, median " + fmt(out.median_error) +
             "; paper-schedule error " + fmt(paper_err) + "; wall " +
             fmt(secs) + " s");
  return out;
}

void criterion_4_headline(const Manifest& m, const PinnOutcome& pinn) {
  const ProblemSpec p = build_problem(ProblemId::Poisson1d);
  double solve_s = 0.0;
  std::vector<double> times;
  double err = 0.0;
  for (int r = 0; r < 10; ++r) {
    err = fem_error_on_grid(p, 256, m, &solve_s);
    times.push_back(solve_s);
  }
  const double fem_mean =
      std::accumulate(times.begin(), times.end(), 0.0) / times.size();
  const bool faster = 10.0 * fem_mean <= pinn.median_train_seconds;
  const bool more_accurate = err <= pinn.median_error;
  report(4, "FEM n=256 at least 10x faster and at least as accurate",
         faster && more_accurate,
         "fem solve " + fmt(fem_mean) + " s vs pinn train " +
             fmt(pinn.median_train_seconds) + " s (ratio " +
             fmt(pinn.median_train_seconds / fem_mean) + "), fem error " +
             fmt(err) + " vs pinn " + fmt(pinn.median_error));
}

void criterion_5_eval_crossover(const Manifest& m) {
  const ProblemSpec p = build_problem(ProblemId::Poisson3d);
  const EvalGridSet grid = build_eval_grid(p, m, Scale::Desk);

  // FEM side: finest desk mesh, interpolation onto the 50^3 grid
  const Mesh mesh = build_problem_mesh(p, 32);
  const FemField field = solve_stationary(p, mesh).field;
  std::vector<std::array<double, 3>> pts(grid.spatial.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    pts[i] = {grid.spatial[i][0], grid.spatial[i][1], grid.spatial[i][2]};

  // PINN side: the smallest desk 3D architecture
  const MlpParams net = init_params(std::vector<int>{3, 20, 20, 1}, 7);

  double fem_s = 0.0, pinn_s = 0.0;
  evaluate_field(field, pts);          // warm-up
  evaluate_pinn(p, net, grid.spatial);  // warm-up
  const int reps = 5;
  for (int r = 0; r < reps; ++r) {
    fem_s += evaluate_field(field, pts).seconds;
    pinn_s += evaluate_pinn(p, net, grid.spatial).seconds;
  }
  fem_s /= reps;
  pinn_s /= reps;
  report(5, "3D evaluation: PINN batched forward <= FEM interpolation",
         pinn_s <= fem_s,
         "pinn [20,20,1] " + fmt(pinn_s) + " s vs fem n=32 " + fmt(fem_s) +
             " s on " + std::to_string(pts.size()) + " points");
}

void criterion_6_autodiff() {
  bool pass = true;
  std::ostringstream detail;
  for (int i = 0; i < kProblemCount; ++i) {
    ProblemSpec p = build_problem(static_cast<ProblemId>(i));
    // small nets and small batches keep the finite-difference sweep cheap
    p.n_f = 12;
    p.n_g = std::min(p.n_g, 4);
    p.n_h = std::min(p.n_h, 4);
    CounterRng rng(31 + i);
    const SampleBatch batch = sample_batch(p, rng);
    std::vector<int> arch{p.input_dim, 8, 6, p.components};
    MlpParams net = init_params(arch, 5 + i);

    std::vector<double> grad(net.parameter_count());
    total_loss_gradient(p, net, batch, grad);

    MlpParams work = net;
    auto loss_of = [&](const std::vector<double>& flat) {
      unpack_params(flat, work);
      return total_loss(p, work, batch);
    };
    const std::vector<double> fd =
        oracles::fd_gradient(loss_of, pack_params(net), 1e-5);
    double worst = 0.0;
    double scale = 0.0;
    for (double v : fd) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < fd.size(); ++k)
      worst = std::max(worst, std::abs(grad[k] - fd[k]) /
                                  std::max(std::abs(fd[k]), 1e-2 * scale));
    detail << to_string(p.id) << " " << fmt(worst) << "  ";
    pass = pass && worst <= 1e-5;
  }

  // Laplacian against nested finite differences on a width-20 net
  CounterRng rng(77);
  const MlpParams net = init_params(std::vector<int>{3, 20, 20, 1}, 9);
  double worst_lap = 0.0;
  for (int t = 0; t < 5; ++t) {
    std::vector<double> x(3);
    for (auto& v : x) v = rng.next_double(-1.0, 1.0);
    const Jet2 jet = jet2(net, x);
    auto f = [&](const std::vector<double>& q) { return forward(net, q)[0]; };
    double lap_fd = 0.0;
    for (int k = 0; k < 3; ++k) lap_fd += oracles::fd_second(f, x, k);
    worst_lap =
        std::max(worst_lap, oracles::rel_err(jet.laplacian(0), lap_fd));
  }
  detail << "laplacian " << fmt(worst_lap);
  pass = pass && worst_lap <= 1e-4;
  report(6, "loss gradients match finite differences (<= 1e-5, lap <= 1e-4)",
         pass, detail.str());
}

void criterion_7_allen_cahn() {
  const ProblemSpec p = build_problem(ProblemId::AllenCahn1d);
  const Mesh mesh = build_interval_mesh(2048, 0.0, 1.0);

  // implicit ground-truth run: energy must never increase
  AllenCahnStepper impl(mesh, p.eps, 2.5e-4, Scheme::Implicit, 1e-10, 25);
  auto ic = [&](const double* x) { return p.initial(x, 0); };
  std::vector<double> u = impl.initial_dofs(ic);
  double energy = impl.energy(u);
  double worst_rise = 0.0;
  const long steps = std::lround(0.05 / 2.5e-4);
  for (long s = 0; s < steps; ++s) {
    impl.step(u);
    const double e = impl.energy(u);
    worst_rise = std::max(worst_rise, (e - energy) / std::abs(energy));
    energy = e;
  }
  const bool monotone = worst_rise <= 1e-10;

  // semi-implicit benchmark run on the same mesh, compared at T
  AllenCahnStepper semi(mesh, p.eps, 1e-3, Scheme::SemiImplicit);
  std::vector<double> v = semi.initial_dofs(ic);
  for (int s = 0; s < 50; ++s) semi.step(v);
  const double gap = l2_relative_error(v, u);
  const bool close = gap <= 5e-2;

  report(7, "Allen-Cahn energy monotone and semi-implicit within 5e-2",
         monotone && close,
         "worst energy rise " + fmt(worst_rise) + ", final gap " + fmt(gap));
}

void criterion_8_schrodinger() {
  // fine implicit run: mass drift over [0, pi/2] at most 1%
  const ProblemSpec p = build_problem(ProblemId::Schrodinger1d);
  const Mesh mesh = build_interval_mesh(2048, -5.0, 5.0);
  const double T = p.t_final;
  const long steps = std::lround(T / 2.5e-4);
  const double dt = T / static_cast<double>(steps);
  SchrodingerStepper impl(mesh, dt, Scheme::Implicit, 0.5, 1e-10, 25);
  auto icr = [&](const double* x) { return p.initial(x, 0); };
  auto ici = [&](const double* x) { return p.initial(x, 1); };
  std::vector<double> ur = impl.initial_dofs(icr), ui = impl.initial_dofs(ici);
  const double mass0 = impl.mass_l2sq(ur, ui);
  for (long s = 0; s < steps; ++s) impl.step(ur, ui);
  const double drift = std::abs(impl.mass_l2sq(ur, ui) - mass0) / mass0;
  const bool mass_ok = drift <= 0.01;

  // constant state follows the closed-form phase rotation
  const Mesh small = build_interval_mesh(16, -5.0, 5.0);
  SchrodingerStepper semi(small, 1e-3, Scheme::SemiImplicit);
  const int n = semi.dofs().n_dofs;
  std::vector<double> cr(n, 1.0), ci(n, 0.0);
  for (int s = 0; s < 100; ++s) semi.step(cr, ci);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(cr[i] - std::cos(0.1)));
    worst = std::max(worst, std::abs(ci[i] - std::sin(0.1)));
  }
  const bool phase_ok = worst <= 1e-3;

  report(8, "Schroedinger mass drift <= 1% and phase rotation <= 1e-3",
         mass_ok && phase_ok,
         "drift " + fmt(100.0 * drift) + "%, phase deviation " + fmt(worst));
}

void criterion_9_lhs() {
  const double lo[4] = {0, -1, 2, 0};
  const double hi[4] = {1, 1, 5, 10};
  bool pass = true;
  for (int n : {1, 4, 256})
    for (int dim : {1, 2, 3, 4})
      for (std::uint64_t seed = 0; seed < 100 && pass; ++seed) {
        CounterRng rng(seed * 7919 + n * 31 + dim);
        const auto pts = lhs_sample(n, dim, lo, hi, rng);
        for (int d = 0; d < dim && pass; ++d) {
          std::vector<int> occ(n, 0);
          for (const auto& q : pts) {
            double t = (q[d] - lo[d]) / (hi[d] - lo[d]) * n;
            int s = std::min(static_cast<int>(t), n - 1);
            ++occ[s];
          }
          for (int s = 0; s < n; ++s) pass = pass && occ[s] == 1;
        }
      }
  report(9, "Latin hypercube occupancy exactly one per stratum", pass,
         "grid {1,4,256} x {1,2,3,4}, 100 seeds each");
}

void criterion_10_reproducibility(const Manifest& m) {
  BenchSelection sel;
  sel.problems = {ProblemId::Poisson1d};
  GroundTruthStore store("/tmp/pdearena_acceptance_gt");
  const auto r1 = run_benchmark(m, sel, 1, 7, Scale::Desk, store);
  const auto r2 = run_benchmark(m, sel, 1, 7, Scale::Desk, store);
  bool pass = r1.size() == r2.size() && !r1.empty();
  for (std::size_t i = 0; pass && i < r1.size(); ++i)
    pass = r1[i].ok() && r2[i].ok() &&
           r1[i].l2_rel_error == r2[i].l2_rel_error;
  // the full 1D mesh family refines strictly
  for (std::size_t i = 0; pass && i + 1 < r1.size(); ++i)
    if (r1[i].method == "fem" && r1[i + 1].method == "fem")
      pass = r1[i].l2_rel_error > r1[i + 1].l2_rel_error;

  // checkpoint round trip is bit-exact
  const MlpParams net = init_params(std::vector<int>{2, 9, 9, 2}, 4242);
  const MlpParams back = params_from_json(params_to_json(net));
  const std::vector<double> fa = pack_params(net), fb = pack_params(back);
  pass = pass && fa.size() == fb.size() &&
         std::memcmp(fa.data(), fb.data(), fa.size() * sizeof(double)) == 0;

  report(10, "identical seeds replay identical errors; checkpoints round-trip",
         pass, std::to_string(r1.size()) + " records compared");
}

void criterion_11_records_schema(const Manifest& m) {
  BenchSelection sel;
  sel.problems = {ProblemId::Poisson1d};
  sel.run_pinn = false;
  GroundTruthStore store("/tmp/pdearena_acceptance_gt");
  const auto records = run_benchmark(m, sel, 1, 7, Scale::Desk, store);
  const fs::path out = "/tmp/pdearena_acceptance_report";
  fs::remove_all(out);
  emit_report(records, "both", out.string());

  bool pass = true;
  std::ostringstream detail;

  // CSV: documented header, one row per record, numeric fields parse
  std::ifstream cf(out / "records.csv");
  std::string line;
  std::getline(cf, line);
  pass = pass && line ==
                     "problem,method,config,solve_time_s,eval_time_s,"
                     "l2_rel_error,repeats,seed";
  int rows = 0;
  while (std::getline(cf, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    pass = pass && fields.size() == 8;
    if (fields.size() == 8) {
      pass = pass && std::stod(fields[3]) > 0.0 && std::stod(fields[4]) > 0.0 &&
             std::stod(fields[5]) >= 0.0 && std::stoi(fields[6]) >= 1;
    }
  }
  pass = pass && rows == static_cast<int>(records.size());

  // JSON: schema version v1, reparses identically
  std::ifstream jf(out / "records.json");
  std::ostringstream jss;
  jss << jf.rdbuf();
  const auto back = records_from_json(jss.str());
  pass = pass && back.size() == records.size();
  for (std::size_t i = 0; pass && i < back.size(); ++i)
    pass = back[i].l2_rel_error == records[i].l2_rel_error &&
           back[i].config == records[i].config;

  // pareto: exactly one row per (problem, method, config)
  std::ifstream pf(out / "pareto.csv");
  int prows = 0;
  while (std::getline(pf, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("problem,", 0) == 0)
      continue;
    ++prows;
  }
  pass = pass && prows == static_cast<int>(records.size());
  detail << rows << " csv rows, " << back.size() << " json records, " << prows
         << " pareto rows";
  report(11, "records validate against the documented v1 schema", pass,
         detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  // --skip-crossover / --only-crossover let the test runner report the
  // evaluation-time crossover criterion as its own entry (it is a known
  // red on this hardware; see the README's benchmark findings).
  bool run_crossover = true, run_rest = true;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--skip-crossover") run_crossover = false;
    if (std::string(argv[i]) == "--only-crossover") run_rest = false;
  }
  std::printf("acceptance suite: cpu-only, %u hardware threads\n",
              std::thread::hardware_concurrency());
  const Manifest m = default_manifest();
  WallTimer total;

  int planned = 0;
  if (run_rest) {
    planned += 10;
    criterion_1_fem_convergence(m);
    criterion_2_fem_floor(m);
    const PinnOutcome pinn = criterion_3_pinn_poisson1d(m);
    criterion_4_headline(m, pinn);
    if (run_crossover) {
      ++planned;
      criterion_5_eval_crossover(m);
    }
    criterion_6_autodiff();
    criterion_7_allen_cahn();
    criterion_8_schrodinger();
    criterion_9_lhs();
    criterion_10_reproducibility(m);
    criterion_11_records_schema(m);
  } else if (run_crossover) {
    ++planned;
    criterion_5_eval_crossover(m);
  }

  std::printf("%d of %d criteria passed (total %.1f s)\n", planned - g_failures,
              planned, total.seconds());
  return g_failures;
}
