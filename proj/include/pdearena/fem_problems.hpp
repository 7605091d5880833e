#ifndef PDEARENA_FEM_PROBLEMS_HPP
#define PDEARENA_FEM_PROBLEMS_HPP

#include "pdearena/evolve.hpp"
#include "pdearena/fem.hpp"
#include "pdearena/problems.hpp"

namespace pdearena {

/// The boundary conditions each model problem prescribes for its FEM solve.
BoundarySpec fem_boundary(const ProblemSpec& p);

Mesh build_problem_mesh(const ProblemSpec& p, int n);

struct StationarySolve {
  FemField field;
  double seconds = 0.0;  // assembly + boundary handling + linear solve
  int cg_iterations = 0;
};

/// Assemble and solve one of the Poisson problems with ILU(0)-preconditioned
/// conjugate gradients (relative residual 1e-10). Mesh construction is the
/// caller's and stays outside the recorded time.
StationarySolve solve_stationary(const ProblemSpec& p, const Mesh& mesh);

EvolutionProblem evolution_problem(const ProblemSpec& p);

}  // namespace pdearena

#endif
