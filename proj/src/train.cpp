#include "pdearena/train.hpp"

#include <fstream>
#include <json.hpp>

#include "pdearena/errors.hpp"
#include "pdearena/optim.hpp"
#include "pdearena/timer.hpp"

namespace pdearena {

namespace {

// Stream tags keep the IC phase, the per-epoch draws, and the final L-BFGS
// batch on disjoint substreams of the training seed.
constexpr std::uint64_t kIcPhase = 0x100000000ull;
constexpr std::uint64_t kAdamPhase = 0x200000000ull;
constexpr std::uint64_t kLbfgsBatch = 0x300000000ull;

SampleBatch sample_ic_batch(const ProblemSpec& p, CounterRng& rng) {
  SampleBatch batch;
  batch.boundary_group = 1;
  CounterRng r = rng.child(3);  // same substream as sample_batch's initial
  double slo[4], shi[4];
  for (int s = 0; s < p.spatial_dim; ++s) {
    slo[s] = p.lo[s];
    shi[s] = p.hi[s];
  }
  for (const auto& q : lhs_sample(p.n_h, p.spatial_dim, slo, shi, r)) {
    Point pt{0, 0, 0, 0};
    for (int s = 0; s < p.spatial_dim; ++s) pt[s + 1] = q[s];
    batch.initial.push_back(pt);
  }
  return batch;
}

}  // namespace

TrainResult train_pinn(const ProblemSpec& problem, std::span<const int> arch,
                       const TrainOptions& opts) {
  if (arch.empty() || arch.back() != problem.components)
    throw InvalidArgument("architecture output width must match the problem");

  std::ofstream log;
  if (!opts.log_path.empty()) {
    log.open(opts.log_path);
    if (!log) throw InvalidArgument("cannot open training log " + opts.log_path);
  }

  TrainResult out;
  WallTimer timer;

  std::vector<int> full_arch;
  full_arch.push_back(problem.input_dim);
  full_arch.insert(full_arch.end(), arch.begin(), arch.end());
  out.params = init_params(full_arch, opts.seed);

  std::vector<double> flat = pack_params(out.params);
  std::vector<double> grad(flat.size());
  CounterRng master(opts.seed);

  auto log_epoch = [&](long epoch, double loss) {
    if (!log.is_open()) return;
    nlohmann::json j = {{"epoch", epoch}, {"loss", loss},
                        {"wall_time", timer.seconds()}};
    log << j.dump() << "\n";
  };

  AdamState adam;
  adam.lr = opts.learning_rate;
  long epoch = 0;
  try {
    for (long e = 0; e < opts.ic_epochs; ++e, ++epoch) {
      CounterRng rng = master.child(kIcPhase + static_cast<std::uint64_t>(e));
      const SampleBatch batch = sample_ic_batch(problem, rng);
      unpack_params(flat, out.params);
      const double loss =
          ic_only_loss_gradient(problem, out.params, batch, grad);
      adam_step(adam, flat, grad);
      log_epoch(epoch, loss);
    }
    adam = AdamState{};  // fresh moments for the full-loss phase
    adam.lr = opts.learning_rate;
    for (long e = 0; e < opts.adam_epochs; ++e, ++epoch) {
      CounterRng rng = master.child(kAdamPhase + static_cast<std::uint64_t>(e));
      const SampleBatch batch = sample_batch(problem, rng);
      unpack_params(flat, out.params);
      const double loss = total_loss_gradient(problem, out.params, batch, grad);
      adam_step(adam, flat, grad);
      log_epoch(epoch, loss);
      out.final_loss = loss;
    }
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("training diverged at epoch " +
                             std::to_string(epoch) + ": " + e.what());
  }

  // L-BFGS refinement on one fixed, freshly sampled batch.
  CounterRng rng = master.child(kLbfgsBatch);
  const SampleBatch fixed = sample_batch(problem, rng);
  MlpParams work = out.params;
  LbfgsOptions lopts;
  lopts.max_iter = opts.lbfgs_max_iter;
  lopts.grad_tol = opts.lbfgs_grad_tol;
  const LbfgsResult res = lbfgs_minimize(
      [&](std::span<const double> x, std::span<double> g) {
        unpack_params(x, work);
        return total_loss_gradient(problem, work, fixed, g);
      },
      flat, lopts);
  flat = res.x;
  out.final_loss = res.loss;
  if (log.is_open()) {
    nlohmann::json j = {{"epoch", epoch},
                        {"loss", res.loss},
                        {"wall_time", timer.seconds()},
                        {"phase", "lbfgs"},
                        {"iterations", res.iterations},
                        {"stop_reason", res.stop_reason}};
    log << j.dump() << "\n";
  }

  unpack_params(flat, out.params);
  out.epochs_run = epoch;
  out.train_seconds = timer.seconds();
  return out;
}

TrainOptions schedule_options(const Manifest& m, ProblemId id, Scale scale,
                              std::uint64_t seed) {
  const ProblemManifest& pm = m.at(id);
  TrainOptions o;
  o.adam_epochs = m.scaled_epochs(pm.adam_epochs, scale);
  o.ic_epochs = m.scaled_epochs(pm.ic_epochs, scale);
  o.learning_rate = pm.learning_rate;
  o.lbfgs_max_iter = pm.lbfgs_max_iter(scale);
  o.seed = seed;
  return o;
}

}  // namespace pdearena
