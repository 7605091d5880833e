#ifndef PDEARENA_MANIFEST_HPP
#define PDEARENA_MANIFEST_HPP

#include <map>
#include <string>
#include <vector>

#include "pdearena/problems.hpp"

namespace pdearena {

enum class Scale { Desk, Paper };

std::string to_string(Scale s);

/// Per-problem benchmark configuration: network architectures (trailing
/// entry is the output width; the input width comes from the problem), the
/// optimizer schedule, FEM mesh families, evaluation grids, and the
/// ground-truth resolution. Desk values are the scaled-down defaults; paper
/// values replay the full-size study.
struct ProblemManifest {
  std::vector<std::vector<int>> archs_paper;
  std::vector<std::vector<int>> archs_desk;
  long adam_epochs = 0;  // paper scale; desk multiplies by the epoch factor
  long ic_epochs = 0;    // Allen-Cahn pretraining phase
  double learning_rate = 1e-3;
  int lbfgs_max_iter_paper = 500;
  int lbfgs_max_iter_desk = 200;
  std::vector<int> fem_n_paper, fem_n_desk;
  std::vector<int> eval_grid_paper, eval_grid_desk;  // points per dimension
  double bench_dt = 0.0;  // nominal time step of benchmark evolution runs
  int gt_n_paper = 0, gt_n_desk = 0;        // fine-mesh ground-truth cells
  double gt_dt_paper = 0.0, gt_dt_desk = 0.0;

  const std::vector<std::vector<int>>& archs(Scale s) const {
    return s == Scale::Paper ? archs_paper : archs_desk;
  }
  const std::vector<int>& fem_ns(Scale s) const {
    return s == Scale::Paper ? fem_n_paper : fem_n_desk;
  }
  const std::vector<int>& eval_grid(Scale s) const {
    return s == Scale::Paper ? eval_grid_paper : eval_grid_desk;
  }
  int lbfgs_max_iter(Scale s) const {
    return s == Scale::Paper ? lbfgs_max_iter_paper : lbfgs_max_iter_desk;
  }
  int gt_n(Scale s) const { return s == Scale::Paper ? gt_n_paper : gt_n_desk; }
  double gt_dt(Scale s) const {
    return s == Scale::Paper ? gt_dt_paper : gt_dt_desk;
  }
};

struct Manifest {
  std::string version = "v1";
  double desk_epoch_factor = 0.1;
  int repeats_paper = 10;
  int repeats_desk = 3;
  std::vector<double> snapshot_fractions = {0.2, 0.4, 0.6, 0.8, 1.0};
  std::map<std::string, ProblemManifest> problems;

  const ProblemManifest& at(ProblemId id) const;
  long scaled_epochs(long paper_epochs, Scale s) const;
  int repeats(Scale s) const {
    return s == Scale::Paper ? repeats_paper : repeats_desk;
  }
};

Manifest default_manifest();
Manifest manifest_from_json(const std::string& text);
std::string manifest_to_json(const Manifest& m);
/// Empty path loads the built-in defaults.
Manifest load_manifest(const std::string& path);

}  // namespace pdearena

#endif
