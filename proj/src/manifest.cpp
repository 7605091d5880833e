#include "pdearena/manifest.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pdearena/errors.hpp"

namespace pdearena {

std::string to_string(Scale s) { return s == Scale::Paper ? "paper" : "desk"; }

const ProblemManifest& Manifest::at(ProblemId id) const {
  auto it = problems.find(to_string(id));
  if (it == problems.end())
    throw InvalidArgument("manifest has no entry for " + to_string(id));
  return it->second;
}

long Manifest::scaled_epochs(long paper_epochs, Scale s) const {
  if (s == Scale::Paper) return paper_epochs;
  return std::lround(static_cast<double>(paper_epochs) * desk_epoch_factor);
}

namespace {

std::vector<std::vector<int>> widths(std::initializer_list<std::vector<int>> l) {
  return {l};
}

}  // namespace

Manifest default_manifest() {
  Manifest m;

  {
    ProblemManifest p;
    p.archs_paper = widths({{1, 1}, {2, 1}, {5, 1}, {10, 1}, {20, 1}, {40, 1},
                            {5, 5, 1}, {10, 10, 1}, {20, 20, 1}, {40, 40, 1},
                            {5, 5, 5, 1}, {10, 10, 10, 1}, {20, 20, 20, 1},
                            {40, 40, 40, 1}});
    p.archs_desk = widths({{20, 1}, {20, 20, 1}, {40, 40, 1}});
    p.adam_epochs = 15000;
    p.learning_rate = 1e-4;
    p.fem_n_paper = {64, 128, 256, 512, 1024, 2048, 4096};
    p.fem_n_desk = {64, 128, 256, 512, 1024, 2048, 4096};
    p.eval_grid_paper = {512};
    p.eval_grid_desk = {512};
    m.problems["poisson1d"] = p;
  }
  {
    ProblemManifest p;
    p.archs_paper = widths(
        {{20, 1}, {60, 1}, {20, 20, 1}, {60, 60, 1}, {20, 20, 20, 1},
         {60, 60, 60, 1}, {20, 20, 20, 20, 1}, {60, 60, 60, 60, 1},
         {20, 20, 20, 20, 20, 1}, {60, 60, 60, 60, 60, 1},
         {120, 120, 120, 120, 120, 1}});
    p.archs_desk = widths({{20, 1}, {20, 20, 1}, {60, 60, 1}});
    p.adam_epochs = 20000;
    p.learning_rate = 1e-3;
    p.fem_n_paper = {100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
    p.fem_n_desk = {50, 100, 200};
    p.eval_grid_paper = {2000, 2000};
    p.eval_grid_desk = {200, 200};
    m.problems["poisson2d"] = p;
  }
  {
    ProblemManifest p;
    p.archs_paper = widths({{20, 20, 1}, {60, 60, 1}, {20, 20, 20, 1},
                            {60, 60, 60, 1}, {20, 20, 20, 20, 1},
                            {60, 60, 60, 60, 1}, {20, 20, 20, 20, 20, 1},
                            {60, 60, 60, 60, 60, 1}});
    p.archs_desk = widths({{20, 20, 1}, {60, 60, 1}, {20, 20, 20, 1}});
    p.adam_epochs = 20000;
    p.learning_rate = 1e-3;
    p.fem_n_paper = {16, 32, 64, 128};
    p.fem_n_desk = {16, 32};
    p.eval_grid_paper = {150, 150, 150};
    p.eval_grid_desk = {50, 50, 50};
    m.problems["poisson3d"] = p;
  }
  {
    ProblemManifest p;
    p.archs_paper = widths(
        {{20, 20, 20, 1}, {100, 100, 100, 1}, {500, 500, 500, 1},
         {20, 20, 20, 20, 1}, {100, 100, 100, 100, 1}, {500, 500, 500, 500, 1},
         {20, 20, 20, 20, 20, 1}, {100, 100, 100, 100, 100, 1},
         {500, 500, 500, 500, 500, 1}, {20, 20, 20, 20, 20, 20, 1},
         {100, 100, 100, 100, 100, 100, 1}, {500, 500, 500, 500, 500, 500, 1},
         {20, 20, 20, 20, 20, 20, 20, 1}, {100, 100, 100, 100, 100, 100, 100, 1}});
    p.archs_desk = widths({{20, 20, 20, 1}, {100, 100, 100, 1},
                           {20, 20, 20, 20, 1}});
    p.adam_epochs = 50000;
    p.ic_epochs = 7000;
    p.learning_rate = 1e-4;
    p.fem_n_paper = {32, 128, 512, 2048};
    p.fem_n_desk = {32, 128, 512};
    p.eval_grid_paper = {7993};
    p.eval_grid_desk = {1024};
    p.bench_dt = 1e-3;
    p.gt_n_paper = 7992;  // 7993 mesh points
    p.gt_dt_paper = 1e-4 / 3.0;
    p.gt_n_desk = 2048;
    p.gt_dt_desk = 2.5e-4;
    m.problems["allen_cahn1d"] = p;
  }
  {
    ProblemManifest p;
    p.archs_paper = widths(
        {{20, 20, 20, 2}, {100, 100, 100, 2}, {20, 20, 20, 20, 2},
         {100, 100, 100, 100, 2}, {20, 20, 20, 20, 20, 2},
         {100, 100, 100, 100, 100, 2}, {20, 20, 20, 20, 20, 20, 2},
         {100, 100, 100, 100, 100, 100, 2}});
    p.archs_desk = widths({{20, 20, 20, 2}, {100, 100, 100, 2},
                           {20, 20, 20, 20, 2}});
    p.adam_epochs = 50000;
    p.learning_rate = 1e-4;
    p.fem_n_paper = {32, 128, 512, 2048};
    p.fem_n_desk = {32, 128, 512};
    p.eval_grid_paper = {7993};
    p.eval_grid_desk = {1024};
    p.bench_dt = 1e-3;
    p.gt_n_paper = 7993;
    p.gt_dt_paper = 1e-4 / 3.0;
    p.gt_n_desk = 2048;
    p.gt_dt_desk = 2.5e-4;
    m.problems["schrodinger1d"] = p;
  }
  {
    ProblemManifest p;
    p.archs_paper = widths({{20, 20, 20, 2}, {100, 100, 100, 2},
                            {20, 20, 20, 20, 2}, {100, 100, 100, 100, 2},
                            {20, 20, 20, 20, 20, 2}, {100, 100, 100, 100, 100, 2}});
    p.archs_desk = widths({{20, 20, 20, 2}, {100, 100, 100, 2}});
    p.adam_epochs = 50000;
    p.learning_rate = 1e-3;
    p.fem_n_paper = {16, 32, 40, 64, 128};
    p.fem_n_desk = {16, 32};
    p.eval_grid_paper = {256, 256};
    p.eval_grid_desk = {32, 32};
    p.bench_dt = 1e-3;
    p.gt_n_paper = 256;
    p.gt_dt_paper = 1e-4 / 3.0;
    p.gt_n_desk = 64;
    p.gt_dt_desk = 2.5e-4;
    m.problems["schrodinger2d"] = p;
  }
  return m;
}

namespace {

void to_json(nlohmann::json& j, const ProblemManifest& p) {
  j = {{"archs_paper", p.archs_paper},
       {"archs_desk", p.archs_desk},
       {"adam_epochs", p.adam_epochs},
       {"ic_epochs", p.ic_epochs},
       {"learning_rate", p.learning_rate},
       {"lbfgs_max_iter_paper", p.lbfgs_max_iter_paper},
       {"lbfgs_max_iter_desk", p.lbfgs_max_iter_desk},
       {"fem_n_paper", p.fem_n_paper},
       {"fem_n_desk", p.fem_n_desk},
       {"eval_grid_paper", p.eval_grid_paper},
       {"eval_grid_desk", p.eval_grid_desk},
       {"bench_dt", p.bench_dt},
       {"gt_n_paper", p.gt_n_paper},
       {"gt_n_desk", p.gt_n_desk},
       {"gt_dt_paper", p.gt_dt_paper},
       {"gt_dt_desk", p.gt_dt_desk}};
}

void from_json(const nlohmann::json& j, ProblemManifest& p) {
  j.at("archs_paper").get_to(p.archs_paper);
  j.at("archs_desk").get_to(p.archs_desk);
  j.at("adam_epochs").get_to(p.adam_epochs);
  p.ic_epochs = j.value("ic_epochs", 0l);
  j.at("learning_rate").get_to(p.learning_rate);
  p.lbfgs_max_iter_paper = j.value("lbfgs_max_iter_paper", 500);
  p.lbfgs_max_iter_desk = j.value("lbfgs_max_iter_desk", 200);
  j.at("fem_n_paper").get_to(p.fem_n_paper);
  j.at("fem_n_desk").get_to(p.fem_n_desk);
  j.at("eval_grid_paper").get_to(p.eval_grid_paper);
  j.at("eval_grid_desk").get_to(p.eval_grid_desk);
  p.bench_dt = j.value("bench_dt", 0.0);
  p.gt_n_paper = j.value("gt_n_paper", 0);
  p.gt_n_desk = j.value("gt_n_desk", 0);
  p.gt_dt_paper = j.value("gt_dt_paper", 0.0);
  p.gt_dt_desk = j.value("gt_dt_desk", 0.0);
}

}  // namespace

std::string manifest_to_json(const Manifest& m) {
  nlohmann::json j;
  j["version"] = m.version;
  j["desk_epoch_factor"] = m.desk_epoch_factor;
  j["repeats_paper"] = m.repeats_paper;
  j["repeats_desk"] = m.repeats_desk;
  j["snapshot_fractions"] = m.snapshot_fractions;
  auto& probs = j["problems"] = nlohmann::json::object();
  for (const auto& [name, pm] : m.problems) {
    nlohmann::json pj;
    to_json(pj, pm);
    probs[name] = pj;
  }
  return j.dump(2);
}

Manifest manifest_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Manifest m;
  m.version = j.value("version", std::string("v1"));
  m.desk_epoch_factor = j.value("desk_epoch_factor", 0.1);
  m.repeats_paper = j.value("repeats_paper", 10);
  m.repeats_desk = j.value("repeats_desk", 3);
  if (j.contains("snapshot_fractions"))
    j.at("snapshot_fractions").get_to(m.snapshot_fractions);
  for (const auto& [name, pj] : j.at("problems").items()) {
    ProblemManifest pm;
    from_json(pj, pm);
    m.problems[name] = pm;
  }
  return m;
}

Manifest load_manifest(const std::string& path) {
  if (path.empty()) return default_manifest();
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open manifest file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str());
}

}  // namespace pdearena
