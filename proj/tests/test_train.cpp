#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "pdearena/errors.hpp"
#include "pdearena/optim.hpp"
#include "pdearena/train.hpp"

using namespace pdearena;

TEST_CASE("desk schedules scale the paper epoch counts by 0.1") {
  const Manifest m = default_manifest();
  const TrainOptions p1 =
      schedule_options(m, ProblemId::Poisson1d, Scale::Desk, 0);
  CHECK(p1.adam_epochs == 1500);
  CHECK(p1.ic_epochs == 0);
  CHECK(p1.learning_rate == 1e-4);
  CHECK(p1.lbfgs_max_iter == 200);

  const TrainOptions p1p =
      schedule_options(m, ProblemId::Poisson1d, Scale::Paper, 0);
  CHECK(p1p.adam_epochs == 15000);
  CHECK(p1p.lbfgs_max_iter == 500);

  const TrainOptions ac =
      schedule_options(m, ProblemId::AllenCahn1d, Scale::Desk, 0);
  CHECK(ac.adam_epochs == 5000);
  CHECK(ac.ic_epochs == 700);  // pretraining phase on the initial loss alone

  const TrainOptions s2 =
      schedule_options(m, ProblemId::Schrodinger2d, Scale::Paper, 0);
  CHECK(s2.adam_epochs == 50000);
  CHECK(s2.learning_rate == 1e-3);
}

TEST_CASE("manifest collocation counts follow the problem definitions") {
  for (int i = 0; i < kProblemCount; ++i) {
    const ProblemSpec p = build_problem(static_cast<ProblemId>(i));
    CHECK(p.n_f > 0);
  }
  const ProblemSpec p1 = build_problem(ProblemId::Poisson1d);
  CHECK(p1.n_f == 256);
  const ProblemSpec ac = build_problem(ProblemId::AllenCahn1d);
  CHECK(ac.n_f == 20000);
  CHECK(ac.n_g == 250);
  CHECK(ac.n_h == 500);
  CHECK(ac.ic_weight == 1000.0);
}

TEST_CASE("manifest json round trip preserves the schedules") {
  const Manifest m = default_manifest();
  const Manifest back = manifest_from_json(manifest_to_json(m));
  CHECK(back.version == m.version);
  CHECK(back.desk_epoch_factor == m.desk_epoch_factor);
  CHECK(back.problems.size() == m.problems.size());
  for (const auto& [name, pm] : m.problems) {
    const ProblemManifest& bm = back.problems.at(name);
    CHECK(bm.archs_paper == pm.archs_paper);
    CHECK(bm.archs_desk == pm.archs_desk);
    CHECK(bm.adam_epochs == pm.adam_epochs);
    CHECK(bm.ic_epochs == pm.ic_epochs);
    CHECK(bm.learning_rate == pm.learning_rate);
    CHECK(bm.fem_n_paper == pm.fem_n_paper);
    CHECK(bm.eval_grid_desk == pm.eval_grid_desk);
    CHECK(bm.gt_dt_desk == pm.gt_dt_desk);
  }
}

TEST_CASE("paper architecture lists match the study") {
  const Manifest m = default_manifest();
  CHECK(m.at(ProblemId::Poisson1d).archs_paper.size() == 14);
  CHECK(m.at(ProblemId::Poisson2d).archs_paper.size() == 11);
  CHECK(m.at(ProblemId::Poisson3d).archs_paper.size() == 8);
  CHECK(m.at(ProblemId::AllenCahn1d).archs_paper.size() == 14);
  CHECK(m.at(ProblemId::Schrodinger1d).archs_paper.size() == 8);
  CHECK(m.at(ProblemId::Schrodinger2d).archs_paper.size() == 6);
  for (const auto& [name, pm] : m.problems) {
    const auto id = problem_from_string(name);
    REQUIRE(id.has_value());
    const ProblemSpec p = build_problem(*id);
    for (const auto& arch : pm.archs_paper) CHECK(arch.back() == p.components);
    CHECK(pm.archs_desk.size() >= 2);
  }
}

TEST_CASE("tiny training runs are deterministic and improve the loss") {
  const ProblemSpec p = build_problem(ProblemId::Poisson1d);
  TrainOptions opts;
  opts.adam_epochs = 40;
  opts.learning_rate = 1e-3;
  opts.lbfgs_max_iter = 25;
  opts.seed = 11;
  const std::vector<int> arch = {8, 1};

  const TrainResult a = train_pinn(p, arch, opts);
  const TrainResult b = train_pinn(p, arch, opts);
  const std::vector<double> fa = pack_params(a.params), fb = pack_params(b.params);
  CHECK(std::memcmp(fa.data(), fb.data(), fa.size() * sizeof(double)) == 0);
  CHECK(a.epochs_run == 40);
  CHECK(a.train_seconds > 0.0);

  // the refinement leaves a small loss and actually moved the parameters
  CHECK(a.final_loss < 0.1);
  const std::vector<double> f0 =
      pack_params(init_params(std::vector<int>{1, 8, 1}, opts.seed));
  CHECK(fa != f0);
}

TEST_CASE("training log is valid json lines") {
  const ProblemSpec p = build_problem(ProblemId::Poisson1d);
  TrainOptions opts;
  opts.adam_epochs = 5;
  opts.lbfgs_max_iter = 2;
  opts.seed = 3;
  opts.log_path = "/tmp/pdearena_train_log_test.jsonl";
  train_pinn(p, std::vector<int>{4, 1}, opts);
  std::ifstream in(opts.log_path);
  REQUIRE(in.good());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("epoch"));
    CHECK(j.contains("loss"));
    CHECK(j.contains("wall_time"));
    ++lines;
  }
  CHECK(lines == 6);  // five epochs + the refinement summary
}

TEST_CASE("one tiny-step epoch on a fixed batch decreases the loss") {
  const ProblemSpec p = build_problem(ProblemId::Poisson1d);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    MlpParams net = init_params(std::vector<int>{1, 10, 1}, seed);
    CounterRng rng(seed + 100);
    const SampleBatch batch = sample_batch(p, rng);
    const double before = total_loss(p, net, batch);
    std::vector<double> grad(net.parameter_count());
    total_loss_gradient(p, net, batch, grad);
    std::vector<double> flat = pack_params(net);
    AdamState adam;
    adam.lr = 1e-6;
    adam_step(adam, flat, grad);
    unpack_params(flat, net);
    CHECK(total_loss(p, net, batch) < before);
  }
}

TEST_CASE("architecture output width must match the problem") {
  const ProblemSpec p = build_problem(ProblemId::Schrodinger1d);
  TrainOptions opts;
  opts.adam_epochs = 1;
  CHECK_THROWS_AS(train_pinn(p, std::vector<int>{8, 1}, opts), InvalidArgument);
}

TEST_CASE("the shipped manifest file matches the built-in defaults") {
  const char* src = std::getenv("PDEARENA_SOURCE_DIR");
  REQUIRE(src != nullptr);
  const Manifest file = load_manifest(std::string(src) + "/data/manifest.json");
  CHECK(manifest_to_json(file) == manifest_to_json(default_manifest()));
}
