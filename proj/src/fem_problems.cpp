#include "pdearena/fem_problems.hpp"

#include "pdearena/errors.hpp"
#include "pdearena/timer.hpp"

namespace pdearena {

BoundarySpec fem_boundary(const ProblemSpec& p) {
  switch (p.id) {
    case ProblemId::Poisson1d:
    case ProblemId::Poisson3d:
      return BoundarySpec::all_dirichlet(p.analytic);
    case ProblemId::Poisson2d: {
      // Dirichlet u = 0 on the y = 0 face; natural (zero-flux) elsewhere.
      BoundarySpec b;
      b.faces[2].kind = BcKind::Dirichlet;
      b.faces[2].value = p.analytic;
      return b;
    }
    case ProblemId::AllenCahn1d:
    case ProblemId::Schrodinger1d:
    case ProblemId::Schrodinger2d:
      return BoundarySpec::all_periodic(p.spatial_dim);
  }
  throw InvalidArgument("unknown problem");
}

Mesh build_problem_mesh(const ProblemSpec& p, int n) {
  switch (p.spatial_dim) {
    case 1:
      return build_interval_mesh(n, p.lo[0], p.hi[0]);
    case 2:
      return build_triangle_mesh(n, {p.lo[0], p.lo[1]}, {p.hi[0], p.hi[1]});
    default:
      return build_tet_mesh(n, p.lo, p.hi);
  }
}

StationarySolve solve_stationary(const ProblemSpec& p, const Mesh& mesh) {
  if (!p.stationary())
    throw InvalidArgument("solve_stationary expects a Poisson problem");
  StationarySolve out;
  WallTimer timer;
  // Weak form of Lap(u) = f: stiffness u = integral of phi * (-f).
  const auto f = p.source;
  AssembledSystem sys = assemble(
      mesh, 1.0, 0.0, [&f](const double* x) { return -f(x); },
      fem_boundary(p));
  const IluFactors ilu = ilu0_factor(sys.matrix);
  const SolveResult sol =
      cg_solve(sys.matrix, sys.rhs, &ilu, 1e-10, 10 * sys.matrix.n + 100);
  out.field = make_field(mesh, sys.dofs, sol.x);
  out.seconds = timer.seconds();
  out.cg_iterations = sol.iterations;
  return out;
}

EvolutionProblem evolution_problem(const ProblemSpec& p) {
  if (p.stationary())
    throw InvalidArgument("evolution_problem expects a time-dependent problem");
  EvolutionProblem e;
  e.eps = p.eps;
  e.diffusion = p.diffusion;
  e.components = p.components;
  e.initial = p.initial;
  return e;
}

}  // namespace pdearena
