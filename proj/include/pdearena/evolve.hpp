#ifndef PDEARENA_EVOLVE_HPP
#define PDEARENA_EVOLVE_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdearena/fem.hpp"
#include "pdearena/mesh.hpp"
#include "pdearena/sparse.hpp"

namespace pdearena {

enum class Scheme { SemiImplicit, Implicit };

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residuals;  // residual norm after each iteration
};

/// Newton did not reach tolerance; carries the residual history.
class NewtonFailure : public std::runtime_error {
 public:
  NewtonFailure(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

/// One time level of an evolution problem: a single field (Allen-Cahn) or a
/// real/imaginary pair (Schroedinger), all sharing one mesh.
struct EvolutionState {
  double t = 0.0;
  std::vector<FemField> fields;
};

/// Time stepping for the Allen-Cahn flow
///   du/dt = eps * Lap(u) - (2/eps) u (1-u)(1-2u)
/// with periodic boundary conditions. The nonlinearity is interpolated
/// nodally. Semi-implicit: one SPD solve (M + eps dt K) u+ = M u - (2dt/eps)
/// M g(u) per step. Implicit: Newton on the implicit weak system.
class AllenCahnStepper {
 public:
  AllenCahnStepper(const Mesh& mesh, double eps, double dt, Scheme scheme,
                   double newton_tol = 1e-10, int newton_max = 25);

  const DofMap& dofs() const { return dofs_; }
  const Mesh& mesh() const { return *mesh_; }

  std::vector<double> initial_dofs(const SpatialFn& ic) const;

  /// Advance u (DOF vector) by one step in place. `predictor`, if given,
  /// seeds the implicit Newton iteration; the default seed is u itself.
  NewtonReport step(std::vector<double>& u,
                    const double* predictor = nullptr) const;

  /// Ginzburg-Landau energy of a DOF state: (eps/2) |grad u|^2 integrated
  /// exactly plus the quartic well integrated either exactly (degree-4
  /// Gauss) or from nodal values with lumped masses.
  double energy(std::span<const double> u, bool nodal_quartic = false) const;

 private:
  const Mesh* mesh_;
  double eps_, dt_, newton_tol_;
  int newton_max_;
  Scheme scheme_;
  DofMap dofs_;
  SparseMatrix mass_, stiffness_, system_;  // system: M + eps dt K
  IluFactors system_ilu_;
  std::vector<double> lumped_;  // row sums of the mass matrix
};

/// Time stepping for the focusing semilinear Schroedinger equation
///   i dh/dt = -diffusion * Lap(h) - |h|^2 h,   h = uR + i uI,
/// periodic boundary conditions. The modulus-squared coefficient enters as
/// a nodally interpolated weight in a weighted mass matrix. Semi-implicit
/// freezes |h|^2 at the current level and solves one 2n-by-2n block system
/// with GMRES; implicit runs Newton on the coupled system.
class SchrodingerStepper {
 public:
  SchrodingerStepper(const Mesh& mesh, double dt, Scheme scheme,
                     double diffusion = 0.5, double newton_tol = 1e-10,
                     int newton_max = 25);

  const DofMap& dofs() const { return dofs_; }

  std::vector<double> initial_dofs(const SpatialFn& ic) const;

  NewtonReport step(std::vector<double>& ur, std::vector<double>& ui) const;

  /// Squared L2 norm of h (the conserved mass of the continuous flow).
  double mass_l2sq(std::span<const double> ur,
                   std::span<const double> ui) const;

 private:
  std::vector<double> node_weights(std::span<const double> ur,
                                   std::span<const double> ui) const;
  void fill_block(const SparseMatrix& j00, const SparseMatrix& j01,
                  const SparseMatrix& j10, const SparseMatrix& j11,
                  SparseMatrix& block) const;
  std::vector<double> solve_block(const SparseMatrix& block,
                                  std::span<const double> rhs) const;

  const Mesh* mesh_;
  double dt_, diffusion_, newton_tol_;
  int newton_max_;
  Scheme scheme_;
  DofMap dofs_;
  SparseMatrix mass_, stiffness_;
  mutable SparseMatrix block_;  // 2n pattern, values refilled per solve
};

// Single-step conveniences mirroring the stepper methods.
EvolutionState step_allen_cahn_semi_implicit(const EvolutionState& state,
                                             double dt, double eps);
EvolutionState step_allen_cahn_implicit(const EvolutionState& state, double dt,
                                        double eps, double newton_tol = 1e-10,
                                        int newton_max = 25,
                                        NewtonReport* report = nullptr);
EvolutionState step_schrodinger_semi_implicit(const EvolutionState& state,
                                              double dt,
                                              double diffusion = 0.5);

struct Trajectory {
  std::vector<EvolutionState> snapshots;
  double solve_seconds = 0.0;
};

struct EvolutionProblem {
  double eps = 0.0;        // Allen-Cahn interface width; 0 selects Schroedinger
  double diffusion = 0.5;  // Schroedinger diffusion coefficient
  int components = 1;
  std::function<double(const double*, int)> initial;  // (point, component)
};

/// March from t=0 over n_steps * dt, recording states at snapshot_times
/// (each must sit on the dt grid to 1e-9). The wall clock covers operator
/// assembly and every step; step failures are rethrown with the failing
/// time stamp.
Trajectory run_evolution(const EvolutionProblem& problem, const Mesh& mesh,
                         double dt, double t_final, Scheme scheme,
                         std::span<const double> snapshot_times);

}  // namespace pdearena

#endif
