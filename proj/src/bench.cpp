#include "pdearena/bench.hpp"

#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "pdearena/errors.hpp"
#include "pdearena/evolve.hpp"
#include "pdearena/fem_problems.hpp"
#include "pdearena/train.hpp"

namespace pdearena {

namespace fs = std::filesystem;

double l2_relative_error(std::span<const double> approx,
                         std::span<const double> reference) {
  if (approx.size() != reference.size())
    throw InvalidArgument("l2_relative_error: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    const double d = approx[i] - reference[i];
    num += d * d;
    den += reference[i] * reference[i];
  }
  if (den == 0.0)
    throw InvalidArgument("l2_relative_error: reference norm is zero");
  return std::sqrt(num / den);
}

EvalGridSet build_eval_grid(const ProblemSpec& p, const Manifest& m,
                            Scale scale) {
  const ProblemManifest& pm = m.at(p.id);
  EvalGridSet grid;
  grid.dims = pm.eval_grid(scale);
  if (static_cast<int>(grid.dims.size()) != p.spatial_dim)
    throw InvalidArgument("evaluation grid rank does not match the problem");

  std::size_t total = 1;
  for (int d : grid.dims) total *= static_cast<std::size_t>(d);
  grid.spatial.resize(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int d = 0; d < p.spatial_dim; ++d) {
      const int nd = grid.dims[d];
      const int i = static_cast<int>(rem % nd);
      rem /= nd;
      grid.spatial[idx][d] =
          nd == 1 ? p.lo[d]
                  : p.lo[d] + (p.hi[d] - p.lo[d]) * i / double(nd - 1);
    }
  }

  if (!p.stationary()) {
    const long n_steps = std::lround(p.t_final / pm.bench_dt);
    grid.bench_dt = p.t_final / static_cast<double>(n_steps);
    for (double f : m.snapshot_fractions) {
      const long s = std::lround(f * static_cast<double>(n_steps));
      const double t = static_cast<double>(s) * grid.bench_dt;
      if (grid.times.empty() || std::abs(grid.times.back() - t) > 1e-15)
        grid.times.push_back(t);
    }
  }
  return grid;
}

namespace {

std::uint64_t fnv1a(const void* data, std::size_t len,
                    std::uint64_t h = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::string iso_timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string machine_descriptor() {
  return "cpu-only; " + std::to_string(std::thread::hardware_concurrency()) +
         " hardware threads";
}

std::array<double, 3> spatial3(const Point& p) { return {p[0], p[1], p[2]}; }

}  // namespace

GroundTruthStore::GroundTruthStore(std::string cache_dir)
    : dir_(std::move(cache_dir)) {
  if (dir_.empty()) dir_ = "gt";
}

std::vector<double> GroundTruthStore::compute_fine_fem(const ProblemSpec& p,
                                                       const Manifest& m,
                                                       Scale scale,
                                                       const EvalGridSet& grid) {
  const ProblemManifest& pm = m.at(p.id);
  const int n = pm.gt_n(scale);
  // The ground-truth step divides the benchmark step exactly so snapshot
  // times land on both grids.
  const long refine = std::max(
      1l, std::lround(grid.bench_dt / pm.gt_dt(scale)));
  const double dt = grid.bench_dt / static_cast<double>(refine);
  const Mesh mesh = build_problem_mesh(p, n);
  const Trajectory traj =
      run_evolution(evolution_problem(p), mesh, dt, p.t_final,
                    Scheme::Implicit, grid.times);
  if (traj.snapshots.size() != grid.times.size())
    throw std::runtime_error("ground truth run missed snapshot times");

  std::vector<std::array<double, 3>> pts(grid.spatial.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = spatial3(grid.spatial[i]);

  std::vector<double> values;
  values.reserve(grid.times.size() * grid.spatial.size() * p.components);
  for (const EvolutionState& snap : traj.snapshots) {
    std::vector<FieldEval> per_comp;
    per_comp.reserve(p.components);
    for (int c = 0; c < p.components; ++c)
      per_comp.push_back(evaluate_field(snap.fields[c], pts));
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (int c = 0; c < p.components; ++c)
        values.push_back(per_comp[c].values[i]);
  }
  return values;
}

std::vector<double> GroundTruthStore::values(const ProblemSpec& p,
                                             const Manifest& m, Scale scale,
                                             const EvalGridSet& grid,
                                             bool force_rebuild) {
  if (p.stationary()) {
    std::vector<double> out(grid.spatial.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = p.analytic(grid.spatial[i].data());
    return out;
  }

  const ProblemManifest& pm = m.at(p.id);
  std::ostringstream key;
  key << to_string(p.id) << "|implicit|n=" << pm.gt_n(scale)
      << "|dt=" << pm.gt_dt(scale) << "|bench_dt=" << grid.bench_dt << "|grid=";
  for (int d : grid.dims) key << d << ",";
  key << "|times=";
  for (double t : grid.times) key << t << ",";
  const std::string key_str = key.str();
  const std::uint64_t key_hash = fnv1a(key_str.data(), key_str.size());

  std::ostringstream hex;
  hex << std::hex << key_hash;
  const fs::path dir = fs::path(dir_) / to_string(p.id);
  const fs::path bin = dir / (hex.str() + ".bin");
  const fs::path meta = dir / (hex.str() + ".meta.json");

  if (!force_rebuild && fs::exists(bin) && fs::exists(meta)) {
    try {
      std::ifstream mf(meta);
      const auto j = nlohmann::json::parse(mf);
      if (j.at("key").get<std::string>() != key_str)
        throw std::runtime_error("cache key collision");
      const auto count = j.at("count").get<std::size_t>();
      const auto want_hash = j.at("content_hash").get<std::string>();
      std::vector<double> values(count);
      std::ifstream bf(bin, std::ios::binary);
      bf.read(reinterpret_cast<char*>(values.data()),
              static_cast<std::streamsize>(count * sizeof(double)));
      if (!bf || bf.gcount() !=
                     static_cast<std::streamsize>(count * sizeof(double)))
        throw std::runtime_error("cache truncated");
      std::ostringstream got;
      got << std::hex << fnv1a(values.data(), count * sizeof(double));
      if (got.str() != want_hash)
        throw std::runtime_error("cache content hash mismatch");
      return values;
    } catch (const std::exception& e) {
      std::cerr << "ground-truth cache for " << to_string(p.id)
                << " is unusable (" << e.what() << "); rebuilding\n";
    }
  }

  std::vector<double> values = compute_fine_fem(p, m, scale, grid);
  fs::create_directories(dir);
  {
    std::ofstream bf(bin, std::ios::binary | std::ios::trunc);
    bf.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size() * sizeof(double)));
  }
  {
    std::ostringstream got;
    got << std::hex << fnv1a(values.data(), values.size() * sizeof(double));
    nlohmann::json j = {{"problem", to_string(p.id)},
                        {"kind", "fine_fem"},
                        {"scheme", "implicit"},
                        {"key", key_str},
                        {"count", values.size()},
                        {"content_hash", got.str()}};
    std::ofstream mf(meta, std::ios::trunc);
    mf << j.dump(2) << "\n";
  }
  return values;
}

namespace {

BenchRecord base_record(const ProblemSpec& p, const std::string& method,
                        const std::string& config, int repeats,
                        std::uint64_t seed) {
  BenchRecord r;
  r.problem = to_string(p.id);
  r.method = method;
  r.config = config;
  r.repeats = repeats;
  r.seed = seed;
  r.timestamp = iso_timestamp();
  r.machine = machine_descriptor();
  return r;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

BenchRecord bench_fem(const ProblemSpec& p, int n, int repeats,
                      std::uint64_t seed, const EvalGridSet& grid,
                      std::span<const double> gt) {
  BenchRecord rec =
      base_record(p, "fem", "n=" + std::to_string(n), repeats, seed);
  try {
    const Mesh mesh = build_problem_mesh(p, n);
    std::vector<std::array<double, 3>> pts(grid.spatial.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      pts[i] = spatial3(grid.spatial[i]);

    std::vector<double> approx;
    if (p.stationary()) {
      FemField field;
      for (int r = 0; r < repeats; ++r) {
        StationarySolve s = solve_stationary(p, mesh);
        rec.solve_times_raw.push_back(s.seconds);
        field = std::move(s.field);
      }
      for (int r = 0; r < repeats; ++r) {
        FieldEval ev = evaluate_field(field, pts);
        rec.eval_times_raw.push_back(ev.seconds);
        if (r == 0) approx = std::move(ev.values);
      }
    } else {
      Trajectory traj;
      for (int r = 0; r < repeats; ++r) {
        traj = run_evolution(evolution_problem(p), mesh, grid.bench_dt,
                             p.t_final, Scheme::SemiImplicit, grid.times);
        rec.solve_times_raw.push_back(traj.solve_seconds);
      }
      for (int r = 0; r < repeats; ++r) {
        double eval_s = 0.0;
        std::vector<double> stacked;
        stacked.reserve(grid.times.size() * pts.size() * p.components);
        for (const EvolutionState& snap : traj.snapshots) {
          std::vector<FieldEval> per_comp;
          for (int c = 0; c < p.components; ++c) {
            per_comp.push_back(evaluate_field(snap.fields[c], pts));
            eval_s += per_comp.back().seconds;
          }
          for (std::size_t i = 0; i < pts.size(); ++i)
            for (int c = 0; c < p.components; ++c)
              stacked.push_back(per_comp[c].values[i]);
        }
        rec.eval_times_raw.push_back(eval_s);
        if (r == 0) approx = std::move(stacked);
      }
    }
    rec.solve_time_s = mean(rec.solve_times_raw);
    rec.eval_time_s = mean(rec.eval_times_raw);
    rec.l2_rel_error = l2_relative_error(approx, gt);
  } catch (const std::exception& e) {
    rec.error_message = e.what();
  }
  return rec;
}

std::string arch_string(const std::vector<int>& arch) {
  std::string s = "[";
  for (std::size_t i = 0; i < arch.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(arch[i]);
  }
  return s + "]";
}

BenchRecord bench_pinn(const ProblemSpec& p, const Manifest& m, Scale scale,
                       const std::vector<int>& arch, int repeats,
                       std::uint64_t seed, const EvalGridSet& grid,
                       std::span<const double> gt) {
  BenchRecord rec = base_record(p, "pinn", arch_string(arch), repeats, seed);
  try {
    const TrainOptions opts = schedule_options(m, p.id, scale, seed);
    TrainResult trained;
    for (int r = 0; r < repeats; ++r) {
      trained = train_pinn(p, arch, opts);
      rec.solve_times_raw.push_back(trained.train_seconds);
    }

    std::vector<Point> inputs;
    if (p.stationary()) {
      inputs.assign(grid.spatial.begin(), grid.spatial.end());
    } else {
      inputs.reserve(grid.times.size() * grid.spatial.size());
      for (double t : grid.times)
        for (const Point& q : grid.spatial) {
          Point in{t, 0, 0, 0};
          for (int d = 0; d < p.spatial_dim; ++d) in[d + 1] = q[d];
          inputs.push_back(in);
        }
    }
    std::vector<double> approx;
    for (int r = 0; r < repeats; ++r) {
      PinnEval ev = evaluate_pinn(p, trained.params, inputs);
      rec.eval_times_raw.push_back(ev.seconds);
      if (r == 0) approx = std::move(ev.values);
    }
    rec.solve_time_s = mean(rec.solve_times_raw);
    rec.eval_time_s = mean(rec.eval_times_raw);
    rec.l2_rel_error = l2_relative_error(approx, gt);
  } catch (const std::exception& e) {
    rec.error_message = e.what();
  }
  return rec;
}

}  // namespace

std::vector<BenchRecord> run_benchmark(const Manifest& m,
                                       const BenchSelection& sel, int repeats,
                                       std::uint64_t seed, Scale scale,
                                       GroundTruthStore& gt_store) {
  if (repeats < 1) throw InvalidArgument("run_benchmark: repeats must be >= 1");
  std::vector<BenchRecord> records;
  for (ProblemId id : sel.problems) {
    const ProblemSpec p = build_problem(id);
    const ProblemManifest& pm = m.at(id);
    const EvalGridSet grid = build_eval_grid(p, m, scale);
    std::vector<double> gt;
    try {
      gt = gt_store.values(p, m, scale, grid);
    } catch (const std::exception& e) {
      BenchRecord rec = base_record(p, "gt", "", repeats, seed);
      rec.error_message = std::string("ground truth unavailable: ") + e.what();
      records.push_back(std::move(rec));
      continue;
    }
    if (sel.run_fem)
      for (int n : pm.fem_ns(scale))
        records.push_back(bench_fem(p, n, repeats, seed, grid, gt));
    if (sel.run_pinn)
      for (const auto& arch : pm.archs(scale))
        records.push_back(
            bench_pinn(p, m, scale, arch, repeats, seed, grid, gt));
  }
  return records;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace

std::string records_to_json(std::span<const BenchRecord> records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const BenchRecord& r : records) {
    nlohmann::json j = {{"problem", r.problem},
                        {"method", r.method},
                        {"config", r.config},
                        {"solve_time_s", r.solve_time_s},
                        {"eval_time_s", r.eval_time_s},
                        {"l2_rel_error", r.l2_rel_error},
                        {"repeats", r.repeats},
                        {"seed", r.seed},
                        {"timestamp", r.timestamp},
                        {"machine", r.machine},
                        {"solve_times_raw", r.solve_times_raw},
                        {"eval_times_raw", r.eval_times_raw},
                        {"timing_valid", r.timing_valid}};
    if (!r.error_message.empty()) j["error"] = r.error_message;
    arr.push_back(std::move(j));
  }
  nlohmann::json top = {{"schema_version", "v1"}, {"records", arr}};
  return top.dump(2);
}

std::vector<BenchRecord> records_from_json(const std::string& text) {
  const auto top = nlohmann::json::parse(text);
  if (top.at("schema_version").get<std::string>() != "v1")
    throw InvalidArgument("unsupported records schema version");
  std::vector<BenchRecord> records;
  for (const auto& j : top.at("records")) {
    BenchRecord r;
    j.at("problem").get_to(r.problem);
    j.at("method").get_to(r.method);
    j.at("config").get_to(r.config);
    j.at("solve_time_s").get_to(r.solve_time_s);
    j.at("eval_time_s").get_to(r.eval_time_s);
    j.at("l2_rel_error").get_to(r.l2_rel_error);
    j.at("repeats").get_to(r.repeats);
    j.at("seed").get_to(r.seed);
    r.timestamp = j.value("timestamp", std::string());
    r.machine = j.value("machine", std::string());
    if (j.contains("solve_times_raw"))
      j.at("solve_times_raw").get_to(r.solve_times_raw);
    if (j.contains("eval_times_raw"))
      j.at("eval_times_raw").get_to(r.eval_times_raw);
    r.timing_valid = j.value("timing_valid", true);
    r.error_message = j.value("error", std::string());
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<std::string> emit_report(std::span<const BenchRecord> records,
                                     const std::string& format,
                                     const std::string& out_dir) {
  if (records.empty()) throw InvalidArgument("emit_report: no records");
  if (format != "csv" && format != "json" && format != "both")
    throw InvalidArgument("emit_report: format must be csv, json, or both");
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  if (format == "csv" || format == "both") {
    const fs::path path = fs::path(out_dir) / "records.csv";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "problem,method,config,solve_time_s,eval_time_s,l2_rel_error,"
           "repeats,seed\n";
    for (const BenchRecord& r : records) {
      if (!r.ok()) continue;
      out << csv_quote(r.problem) << ',' << csv_quote(r.method) << ','
          << csv_quote(r.config) << ',' << fmt(r.solve_time_s) << ','
          << fmt(r.eval_time_s) << ',' << fmt(r.l2_rel_error) << ','
          << r.repeats << ',' << r.seed << '\n';
    }
    written.push_back(path.string());
  }
  if (format == "json" || format == "both") {
    const fs::path path = fs::path(out_dir) / "records.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << records_to_json(records) << "\n";
    written.push_back(path.string());
  }

  // Pareto companion: time-vs-error per problem with the FEM solve and PINN
  // training axes in separate columns.
  {
    const fs::path path = fs::path(out_dir) / "pareto.csv";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# timing scope: fem solve = assembly + linear solves (mesh build "
           "excluded); pinn train = all epochs + refinement;\n"
        << "# eval = interpolation (fem) or batched forward passes (pinn) on "
           "the problem's evaluation grid; all runs cpu-only\n"
        << "problem,method,config,fem_solve_time_s,pinn_train_time_s,"
           "eval_time_s,l2_rel_error\n";
    for (const BenchRecord& r : records) {
      if (!r.ok()) continue;
      out << csv_quote(r.problem) << ',' << csv_quote(r.method) << ','
          << csv_quote(r.config) << ',';
      if (r.method == "fem")
        out << fmt(r.solve_time_s) << ",,";
      else
        out << ',' << fmt(r.solve_time_s) << ',';
      out << fmt(r.eval_time_s) << ',' << fmt(r.l2_rel_error) << '\n';
    }
    written.push_back(path.string());
  }
  return written;
}

}  // namespace pdearena
