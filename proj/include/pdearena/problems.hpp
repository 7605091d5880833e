#ifndef PDEARENA_PROBLEMS_HPP
#define PDEARENA_PROBLEMS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdearena/net.hpp"
#include "pdearena/rng.hpp"
#include "pdearena/sample.hpp"

namespace pdearena {

enum class ProblemId {
  Poisson1d,
  Poisson2d,
  Poisson3d,
  AllenCahn1d,
  Schrodinger1d,
  Schrodinger2d,
};

std::string to_string(ProblemId id);
std::optional<ProblemId> problem_from_string(const std::string& name);
constexpr int kProblemCount = 6;

/// One model problem: domain, coefficients, data functions, and the
/// collocation counts of its residual loss. Network inputs are ordered
/// (t, x, y) for evolution problems and (x, y, z) for stationary ones.
struct ProblemSpec {
  ProblemId id{};
  int spatial_dim = 1;
  int input_dim = 1;   // spatial_dim (+1 with time)
  int components = 1;  // network output width
  double t_final = 0.0;
  std::array<double, 3> lo{}, hi{};
  double eps = 0.0;        // Allen-Cahn interface width
  double diffusion = 0.0;  // Schroedinger Laplacian coefficient
  double ic_weight = 1.0;
  int n_f = 0, n_g = 0, n_h = 0;
  bool schrod2d_imag_ic = false;  // add the implied uI(0,.)=0 term

  std::function<double(const double*)> source;    // Poisson right-hand side
  std::function<double(const double*)> analytic;  // exact solution (Poisson)
  std::function<double(const double*, int)> initial;  // (spatial point, comp)

  bool stationary() const { return t_final == 0.0; }
};

ProblemSpec build_problem(ProblemId id);

/// Collocation points of one loss evaluation. Boundary points are stored
/// materialized on the faces, `boundary_group` per draw (e.g. the four face
/// points sharing one (x, y) draw in 2D); initial points carry t = 0 in
/// slot 0.
struct SampleBatch {
  std::vector<Point> interior;
  std::vector<Point> boundary;
  int boundary_group = 1;
  std::vector<Point> initial;

  int boundary_draws() const {
    return boundary_group == 0
               ? 0
               : static_cast<int>(boundary.size()) / boundary_group;
  }
};

SampleBatch sample_batch(const ProblemSpec& p, CounterRng& rng);

/// Strong-form PDE residual of the network at one interior point (1 or 2
/// components), via second-order forward-mode jets.
std::vector<double> pde_residual(const ProblemSpec& p, const MlpParams& params,
                                 const Point& x);

/// The full loss: mean squared interior residual plus the problem's
/// boundary and initial-condition terms.
double total_loss(const ProblemSpec& p, const MlpParams& params,
                  const SampleBatch& batch);
double total_loss_gradient(const ProblemSpec& p, const MlpParams& params,
                           const SampleBatch& batch, std::span<double> grad);

/// Allen-Cahn pretraining objective: the weighted initial-condition term
/// alone. Throws for other problems.
double ic_only_loss(const ProblemSpec& p, const MlpParams& params,
                    const SampleBatch& batch);
double ic_only_loss_gradient(const ProblemSpec& p, const MlpParams& params,
                             const SampleBatch& batch, std::span<double> grad);

struct PinnEval {
  std::vector<double> values;  // point-major: [point][component]
  double seconds = 0.0;
};

/// Batched forward passes at `points` (parallel over a fixed partition;
/// output is independent of the thread count). Wall clock covers the
/// forward sweep only.
PinnEval evaluate_pinn(const ProblemSpec& p, const MlpParams& params,
                       std::span<const Point> points);

}  // namespace pdearena

#endif
