#ifndef PDEARENA_BENCH_HPP
#define PDEARENA_BENCH_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pdearena/manifest.hpp"
#include "pdearena/problems.hpp"

namespace pdearena {

/// ||approx - reference||_2 / ||reference||_2. Throws on length mismatch or
/// an all-zero reference.
double l2_relative_error(std::span<const double> approx,
                         std::span<const double> reference);

/// The comparison grid of one problem: a tensor grid over the spatial box
/// plus, for evolution problems, the snapshot times (all sitting on the
/// benchmark time-step grid).
struct EvalGridSet {
  std::vector<int> dims;             // points per spatial dimension
  std::vector<Point> spatial;        // spatial coords in slots [0, dim)
  std::vector<double> times;         // empty for stationary problems
  double bench_dt = 0.0;             // adjusted benchmark step (T / n_steps)
};

EvalGridSet build_eval_grid(const ProblemSpec& p, const Manifest& m,
                            Scale scale);

/// Reference values on an evaluation grid: analytic for Poisson, an
/// implicit-Euler run on the manifest's fine mesh for the evolution
/// problems (cached on disk, content-hashed). Layout: stationary [point];
/// evolution [time][point][component].
class GroundTruthStore {
 public:
  explicit GroundTruthStore(std::string cache_dir);

  std::vector<double> values(const ProblemSpec& p, const Manifest& m,
                             Scale scale, const EvalGridSet& grid,
                             bool force_rebuild = false);

  const std::string& directory() const { return dir_; }

 private:
  std::vector<double> compute_fine_fem(const ProblemSpec& p, const Manifest& m,
                                       Scale scale, const EvalGridSet& grid);
  std::string dir_;
};

struct BenchRecord {
  std::string problem;
  std::string method;  // "fem" | "pinn"
  std::string config;  // "n=256" | "[20,20,1]"
  double solve_time_s = 0.0;
  double eval_time_s = 0.0;
  double l2_rel_error = 0.0;
  int repeats = 1;
  std::uint64_t seed = 0;
  std::string timestamp;
  std::string machine;
  std::vector<double> solve_times_raw;
  std::vector<double> eval_times_raw;
  bool timing_valid = true;
  std::string error_message;  // non-empty when the run failed

  bool ok() const { return error_message.empty(); }
};

struct BenchSelection {
  std::vector<ProblemId> problems;
  bool run_fem = true;
  bool run_pinn = true;
};

/// Solve/train, evaluate, and score every selected (problem, method,
/// config). Individual failures land in the record stream instead of
/// aborting the batch. Runs are sequential so timings stay uncontaminated.
std::vector<BenchRecord> run_benchmark(const Manifest& m,
                                       const BenchSelection& sel, int repeats,
                                       std::uint64_t seed, Scale scale,
                                       GroundTruthStore& gt);

/// records.csv / records.json (per `format`: "csv", "json", "both") plus
/// the pareto.csv companion table; returns the written paths.
std::vector<std::string> emit_report(std::span<const BenchRecord> records,
                                     const std::string& format,
                                     const std::string& out_dir);

std::string records_to_json(std::span<const BenchRecord> records);
std::vector<BenchRecord> records_from_json(const std::string& text);

}  // namespace pdearena

#endif
