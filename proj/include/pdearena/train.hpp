#ifndef PDEARENA_TRAIN_HPP
#define PDEARENA_TRAIN_HPP

#include <cstdint>
#include <span>
#include <string>

#include "pdearena/manifest.hpp"
#include "pdearena/problems.hpp"

namespace pdearena {

struct TrainOptions {
  long adam_epochs = 0;
  long ic_epochs = 0;  // Allen-Cahn pretraining on the initial loss alone
  double learning_rate = 1e-3;
  int lbfgs_max_iter = 200;
  double lbfgs_grad_tol = 1e-9;
  std::uint64_t seed = 0;
  std::string log_path;  // JSON-lines {epoch, loss, wall_time}; empty = off
};

struct TrainResult {
  MlpParams params;
  double train_seconds = 0.0;  // everything: init, Adam phases, L-BFGS
  long epochs_run = 0;
  double final_loss = 0.0;
};

/// The two-stage schedule: Adam with freshly LHS-sampled collocation points
/// every epoch (after the IC-only pretraining phase, when configured),
/// followed by L-BFGS refinement on one fixed fresh batch. `arch` lists
/// hidden widths plus the output width; the input width comes from the
/// problem. Loss divergence (NaN) aborts with the epoch index.
TrainResult train_pinn(const ProblemSpec& problem, std::span<const int> arch,
                       const TrainOptions& opts);

/// Schedule parameters for (problem, scale) straight from the manifest.
TrainOptions schedule_options(const Manifest& m, ProblemId id, Scale scale,
                              std::uint64_t seed);

}  // namespace pdearena

#endif
