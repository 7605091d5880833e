#ifndef PDEARENA_FEM_HPP
#define PDEARENA_FEM_HPP

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pdearena/mesh.hpp"
#include "pdearena/sparse.hpp"

namespace pdearena {

using SpatialFn = std::function<double(const double*)>;

enum class BcKind { Neumann, Dirichlet, Periodic };

/// Per-face condition. Homogeneous Neumann is the natural condition and
/// adds nothing to the assembled system; inhomogeneous fluxes are not
/// supported (none of the model problems need them), so `value` is the
/// Dirichlet datum and must be null for Neumann faces.
struct FaceCondition {
  BcKind kind = BcKind::Neumann;
  SpatialFn value;
};

/// Conditions per box face, indexed 2*d (low face of dimension d) and
/// 2*d + 1 (high face). Periodic faces must come in opposing pairs.
struct BoundarySpec {
  std::array<FaceCondition, 6> faces;

  static BoundarySpec natural() { return {}; }
  static BoundarySpec all_dirichlet(SpatialFn value);
  static BoundarySpec all_periodic(int dim);
  bool periodic_dim(int d) const {
    return faces[2 * d].kind == BcKind::Periodic;
  }
};

/// Node -> degree-of-freedom map. Periodic boundary conditions are applied
/// by identification: every node on a high periodic face shares the DOF of
/// its wrapped image on the low face.
struct DofMap {
  std::vector<int> node_to_dof;
  std::vector<int> dof_to_node;  // representative node per DOF
  int n_dofs = 0;
};

DofMap build_dof_map(const Mesh& mesh, const BoundarySpec& bcs);

/// Element integrals on one cell; `out` is (dim+1)^2 row-major.
/// Stiffness entries are cell integrals of grad(phi_i) . grad(phi_j); rows
/// sum to zero. Mass entries integrate phi_i phi_j exactly. Both throw on
/// degenerate geometry.
void element_stiffness(const Mesh& mesh, int cell, double* out);
void element_mass(const Mesh& mesh, int cell, double* out);

/// Global matrix stiffness_coeff * K + mass_coeff * M on the DOFs of `dofs`.
SparseMatrix assemble_matrix(const Mesh& mesh, const DofMap& dofs,
                             double stiffness_coeff, double mass_coeff);

/// Weighted mass matrix: integrals of Ih[w] phi_i phi_j with the weight w
/// given nodally and interpolated as a P1 field (exact cubic integration).
SparseMatrix assemble_weighted_mass(const Mesh& mesh, const DofMap& dofs,
                                    std::span<const double> node_weights);

/// Load vector l_i = integral of phi_i * g, with g evaluated by an order-2
/// simplex rule per dimension: 2-point Gauss on intervals, the 3-point
/// edge-midpoint rule on triangles, the symmetric 4-point rule on tets.
std::vector<double> assemble_load(const Mesh& mesh, const DofMap& dofs,
                                  const SpatialFn& g);

struct AssembledSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
  DofMap dofs;
};

/// Assembles (stiffness_coeff * K + mass_coeff * M) u = load + boundary
/// data. Dirichlet DOFs are eliminated symmetrically: their rows/columns
/// are zeroed with a unit diagonal and the known values are moved to the
/// right-hand side, so the Poisson system stays positive definite.
AssembledSystem assemble(const Mesh& mesh, double stiffness_coeff,
                         double mass_coeff, const SpatialFn& load,
                         const BoundarySpec& bcs);

/// Same, with the load given as nodal data: l = M * values.
AssembledSystem assemble(const Mesh& mesh, double stiffness_coeff,
                         double mass_coeff, std::span<const double> nodal_load,
                         const BoundarySpec& bcs);

/// A P1 field: one coefficient per mesh node (slave periodic nodes carry a
/// copy of their master's value, so interpolation needs no DOF lookups).
struct FemField {
  const Mesh* mesh = nullptr;
  std::vector<double> coefficients;

  double value_at(const PointLocation& loc) const {
    const auto& cell = mesh->cells[loc.cell];
    double s = 0.0;
    for (int v = 0; v <= mesh->dim; ++v)
      s += loc.bary[v] * coefficients[cell[v]];
    return s;
  }
};

/// Expand a DOF vector to nodal coefficients.
FemField make_field(const Mesh& mesh, const DofMap& dofs,
                    std::span<const double> dof_values);

struct FieldEval {
  std::vector<double> values;
  double seconds = 0.0;
};

/// P1 interpolation at arbitrary points (exact at nodes); wall-clock time
/// of the interpolation loop is recorded.
FieldEval evaluate_field(const FemField& field,
                         std::span<const std::array<double, 3>> points);

std::string field_to_json(const FemField& field, const std::string& mesh_id);
std::vector<double> field_from_json(const std::string& text,
                                    std::string* mesh_id = nullptr);

}  // namespace pdearena

#endif
