#include "pdearena/fem.hpp"

#include <cmath>
#include <cstring>
#include <json.hpp>

#include "pdearena/errors.hpp"
#include "pdearena/timer.hpp"

namespace pdearena {

BoundarySpec BoundarySpec::all_dirichlet(SpatialFn value) {
  BoundarySpec b;
  for (auto& f : b.faces) f = {BcKind::Dirichlet, value};
  return b;
}

BoundarySpec BoundarySpec::all_periodic(int dim) {
  BoundarySpec b;
  for (int d = 0; d < dim; ++d) {
    b.faces[2 * d].kind = BcKind::Periodic;
    b.faces[2 * d + 1].kind = BcKind::Periodic;
  }
  return b;
}

DofMap build_dof_map(const Mesh& mesh, const BoundarySpec& bcs) {
  for (int d = 0; d < mesh.dim; ++d) {
    const bool lo = bcs.faces[2 * d].kind == BcKind::Periodic;
    const bool hi = bcs.faces[2 * d + 1].kind == BcKind::Periodic;
    if (lo != hi)
      throw InvalidArgument("periodic faces must come in opposing pairs");
  }
  DofMap map;
  map.node_to_dof.assign(mesh.n_nodes(), -1);
  const int n = mesh.cells_per_side, s = n + 1;
  const int sy = mesh.dim >= 2 ? s : 1, sz = mesh.dim >= 3 ? s : 1;
  for (int k = 0; k < sz; ++k)
    for (int j = 0; j < sy; ++j)
      for (int i = 0; i < s; ++i) {
        const int node = (k * (mesh.dim >= 2 ? s : 1) + j) * s + i;
        int ii = i, jj = j, kk = k;
        if (bcs.periodic_dim(0) && ii == n) ii = 0;
        if (mesh.dim >= 2 && bcs.periodic_dim(1) && jj == n) jj = 0;
        if (mesh.dim >= 3 && bcs.periodic_dim(2) && kk == n) kk = 0;
        const int master = (kk * (mesh.dim >= 2 ? s : 1) + jj) * s + ii;
        if (master == node) {
          map.node_to_dof[node] = map.n_dofs++;
          map.dof_to_node.push_back(node);
        }
      }
  // second pass: point slaves at their master's dof
  for (int k = 0; k < sz; ++k)
    for (int j = 0; j < sy; ++j)
      for (int i = 0; i < s; ++i) {
        const int node = (k * (mesh.dim >= 2 ? s : 1) + j) * s + i;
        if (map.node_to_dof[node] >= 0) continue;
        int ii = i == n && bcs.periodic_dim(0) ? 0 : i;
        int jj = mesh.dim >= 2 && j == n && bcs.periodic_dim(1) ? 0 : j;
        int kk = mesh.dim >= 3 && k == n && bcs.periodic_dim(2) ? 0 : k;
        const int master = (kk * (mesh.dim >= 2 ? s : 1) + jj) * s + ii;
        map.node_to_dof[node] = map.node_to_dof[master];
      }
  return map;
}

namespace {

struct CellGeometry {
  double grads[4][3];  // gradient of each P1 basis function
  double measure;
};

CellGeometry cell_geometry(const Mesh& mesh, int cell) {
  const int d = mesh.dim;
  const auto& c = mesh.cells[cell];
  double jac[3][3] = {};  // edge vectors as columns
  for (int v = 0; v < d; ++v)
    for (int r = 0; r < d; ++r)
      jac[r][v] = mesh.nodes[c[v + 1]][r] - mesh.nodes[c[0]][r];

  CellGeometry g{};
  double det = 0.0;
  double inv[3][3] = {};
  if (d == 1) {
    det = jac[0][0];
    if (det == 0.0) throw InvalidArgument("degenerate cell (zero length)");
    inv[0][0] = 1.0 / det;
  } else if (d == 2) {
    det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    if (det == 0.0) throw InvalidArgument("degenerate cell (zero area)");
    inv[0][0] = jac[1][1] / det;
    inv[0][1] = -jac[0][1] / det;
    inv[1][0] = -jac[1][0] / det;
    inv[1][1] = jac[0][0] / det;
  } else {
    det = jac[0][0] * (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1]) -
          jac[0][1] * (jac[1][0] * jac[2][2] - jac[1][2] * jac[2][0]) +
          jac[0][2] * (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]);
    if (det == 0.0) throw InvalidArgument("degenerate cell (zero volume)");
    const double id = 1.0 / det;
    inv[0][0] = (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1]) * id;
    inv[0][1] = (jac[0][2] * jac[2][1] - jac[0][1] * jac[2][2]) * id;
    inv[0][2] = (jac[0][1] * jac[1][2] - jac[0][2] * jac[1][1]) * id;
    inv[1][0] = (jac[1][2] * jac[2][0] - jac[1][0] * jac[2][2]) * id;
    inv[1][1] = (jac[0][0] * jac[2][2] - jac[0][2] * jac[2][0]) * id;
    inv[1][2] = (jac[0][2] * jac[1][0] - jac[0][0] * jac[1][2]) * id;
    inv[2][0] = (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]) * id;
    inv[2][1] = (jac[0][1] * jac[2][0] - jac[0][0] * jac[2][1]) * id;
    inv[2][2] = (jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0]) * id;
  }
  static const double kFact[4] = {1, 1, 2, 6};
  g.measure = std::abs(det) / kFact[d];

  // grad(lambda_{v+1}) = row v of J^{-1}; grad(lambda_0) = -sum of the rest
  for (int v = 0; v < d; ++v)
    for (int r = 0; r < d; ++r) {
      g.grads[v + 1][r] = inv[v][r];
      g.grads[0][r] -= inv[v][r];
    }
  return g;
}

}  // namespace

void element_stiffness(const Mesh& mesh, int cell, double* out) {
  const CellGeometry g = cell_geometry(mesh, cell);
  const int nv = mesh.dim + 1;
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j) {
      double s = 0.0;
      for (int r = 0; r < mesh.dim; ++r) s += g.grads[i][r] * g.grads[j][r];
      out[i * nv + j] = s * g.measure;
    }
}

void element_mass(const Mesh& mesh, int cell, double* out) {
  const int d = mesh.dim, nv = d + 1;
  const double vol = mesh.cell_measure(cell);
  if (vol == 0.0) throw InvalidArgument("degenerate cell");
  static const double kFact[6] = {1, 1, 2, 6, 24, 120};
  const double base = vol * kFact[d] / kFact[d + 2];  // integral of li*lj, i != j
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j) out[i * nv + j] = base * (i == j ? 2.0 : 1.0);
}

namespace {

SparseMatrix build_pattern(const Mesh& mesh, const DofMap& dofs) {
  CsrBuilder builder(dofs.n_dofs);
  const int nv = mesh.dim + 1;
  for (const auto& cell : mesh.cells)
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nv; ++j)
        builder.connect(dofs.node_to_dof[cell[i]], dofs.node_to_dof[cell[j]]);
  return builder.compress();
}

}  // namespace

SparseMatrix assemble_matrix(const Mesh& mesh, const DofMap& dofs,
                             double stiffness_coeff, double mass_coeff) {
  SparseMatrix a = build_pattern(mesh, dofs);
  const int nv = mesh.dim + 1;
  double ke[16], me[16];
  for (int c = 0; c < mesh.n_cells(); ++c) {
    if (stiffness_coeff != 0.0) element_stiffness(mesh, c, ke);
    if (mass_coeff != 0.0) element_mass(mesh, c, me);
    const auto& cell = mesh.cells[c];
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nv; ++j) {
        double v = 0.0;
        if (stiffness_coeff != 0.0) v += stiffness_coeff * ke[i * nv + j];
        if (mass_coeff != 0.0) v += mass_coeff * me[i * nv + j];
        csr_add(a, dofs.node_to_dof[cell[i]], dofs.node_to_dof[cell[j]], v);
      }
  }
  return a;
}

SparseMatrix assemble_weighted_mass(const Mesh& mesh, const DofMap& dofs,
                                    std::span<const double> node_weights) {
  if (static_cast<int>(node_weights.size()) != mesh.n_nodes())
    throw InvalidArgument("weighted mass: need one weight per node");
  SparseMatrix a = build_pattern(mesh, dofs);
  const int d = mesh.dim, nv = d + 1;
  static const double kFact[7] = {1, 1, 2, 6, 24, 120, 720};
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const double scale = mesh.cell_measure(c) * kFact[d] / kFact[d + 3];
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nv; ++j) {
        // integral of Ih[w] li lj = sum_k w_k integral(li lj lk); the
        // multiplicity of (i,j,k) decides the factorial weight.
        double s = 0.0;
        for (int k = 0; k < nv; ++k) {
          double m;
          if (i == j && j == k)
            m = 6.0;
          else if (i == j || j == k || i == k)
            m = 2.0;
          else
            m = 1.0;
          s += node_weights[cell[k]] * m;
        }
        csr_add(a, dofs.node_to_dof[cell[i]], dofs.node_to_dof[cell[j]],
                scale * s);
      }
  }
  return a;
}

namespace {

// Order-2 simplex quadrature: barycentric points and weights (x measure).
struct QuadRule {
  int npoints;
  double bary[4][4];
  double weight[4];
};

const QuadRule& quad_rule(int dim) {
  static const QuadRule k1d = {2,
                               {{0.5 + 0.5 / std::sqrt(3.0), 0.5 - 0.5 / std::sqrt(3.0), 0, 0},
                                {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0), 0, 0}},
                               {0.5, 0.5}};
  static const QuadRule k2d = {3,
                               {{0.5, 0.5, 0.0, 0},
                                {0.0, 0.5, 0.5, 0},
                                {0.5, 0.0, 0.5, 0}},
                               {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  static const double a3 = 0.5854101966249685, b3 = 0.1381966011250105;
  static const QuadRule k3d = {4,
                               {{a3, b3, b3, b3},
                                {b3, a3, b3, b3},
                                {b3, b3, a3, b3},
                                {b3, b3, b3, a3}},
                               {0.25, 0.25, 0.25, 0.25}};
  return dim == 1 ? k1d : dim == 2 ? k2d : k3d;
}

}  // namespace

std::vector<double> assemble_load(const Mesh& mesh, const DofMap& dofs,
                                  const SpatialFn& g) {
  std::vector<double> rhs(dofs.n_dofs, 0.0);
  const int nv = mesh.dim + 1;
  const QuadRule& rule = quad_rule(mesh.dim);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const double vol = mesh.cell_measure(c);
    for (int q = 0; q < rule.npoints; ++q) {
      double x[3] = {0, 0, 0};
      for (int v = 0; v < nv; ++v)
        for (int r = 0; r < mesh.dim; ++r)
          x[r] += rule.bary[q][v] * mesh.nodes[cell[v]][r];
      const double gval = g(x);
      if (std::isnan(gval))
        throw InvalidArgument("load function evaluated to NaN");
      const double wg = vol * rule.weight[q] * gval;
      for (int v = 0; v < nv; ++v)
        rhs[dofs.node_to_dof[cell[v]]] += wg * rule.bary[q][v];
    }
  }
  return rhs;
}

namespace {

AssembledSystem assemble_impl(const Mesh& mesh, double stiffness_coeff,
                              double mass_coeff, const BoundarySpec& bcs,
                              std::vector<double> rhs, DofMap dofs) {
  for (int f = 0; f < 2 * mesh.dim; ++f)
    if (bcs.faces[f].kind == BcKind::Neumann && bcs.faces[f].value)
      throw InvalidArgument(
          "inhomogeneous Neumann conditions are not supported");

  AssembledSystem sys;
  sys.matrix = assemble_matrix(mesh, dofs, stiffness_coeff, mass_coeff);
  sys.rhs = std::move(rhs);
  sys.dofs = std::move(dofs);

  // Dirichlet data per DOF.
  std::vector<char> fixed(sys.dofs.n_dofs, 0);
  std::vector<double> fixed_value(sys.dofs.n_dofs, 0.0);
  for (int node = 0; node < mesh.n_nodes(); ++node) {
    const std::uint8_t mask = mesh.face_mask[node];
    if (mask == 0) continue;
    for (int f = 0; f < 2 * mesh.dim; ++f) {
      if (!(mask & (1u << f)) || bcs.faces[f].kind != BcKind::Dirichlet)
        continue;
      const int dof = sys.dofs.node_to_dof[node];
      fixed[dof] = 1;
      fixed_value[dof] =
          bcs.faces[f].value ? bcs.faces[f].value(mesh.nodes[node].data()) : 0.0;
      break;  // corner nodes take the first Dirichlet face's datum
    }
  }

  // Symmetric elimination: move known columns to the rhs, then identity rows.
  SparseMatrix& a = sys.matrix;
  for (int r = 0; r < a.n; ++r) {
    if (fixed[r]) {
      for (int k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k)
        a.values[k] = a.column_indices[k] == r ? 1.0 : 0.0;
      sys.rhs[r] = fixed_value[r];
      continue;
    }
    for (int k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
      const int c = a.column_indices[k];
      if (fixed[c]) {
        sys.rhs[r] -= a.values[k] * fixed_value[c];
        a.values[k] = 0.0;
      }
    }
  }
  return sys;
}

}  // namespace

AssembledSystem assemble(const Mesh& mesh, double stiffness_coeff,
                         double mass_coeff, const SpatialFn& load,
                         const BoundarySpec& bcs) {
  DofMap dofs = build_dof_map(mesh, bcs);
  std::vector<double> rhs = load ? assemble_load(mesh, dofs, load)
                                 : std::vector<double>(dofs.n_dofs, 0.0);
  return assemble_impl(mesh, stiffness_coeff, mass_coeff, bcs, std::move(rhs),
                       std::move(dofs));
}

AssembledSystem assemble(const Mesh& mesh, double stiffness_coeff,
                         double mass_coeff, std::span<const double> nodal_load,
                         const BoundarySpec& bcs) {
  if (static_cast<int>(nodal_load.size()) != mesh.n_nodes())
    throw InvalidArgument("nodal load: need one value per node");
  DofMap dofs = build_dof_map(mesh, bcs);
  SparseMatrix mass = assemble_matrix(mesh, dofs, 0.0, 1.0);
  std::vector<double> dof_load(dofs.n_dofs);
  for (int d = 0; d < dofs.n_dofs; ++d)
    dof_load[d] = nodal_load[dofs.dof_to_node[d]];
  std::vector<double> rhs = spmv(mass, dof_load);
  return assemble_impl(mesh, stiffness_coeff, mass_coeff, bcs, std::move(rhs),
                       std::move(dofs));
}

FemField make_field(const Mesh& mesh, const DofMap& dofs,
                    std::span<const double> dof_values) {
  FemField f;
  f.mesh = &mesh;
  f.coefficients.resize(mesh.n_nodes());
  for (int node = 0; node < mesh.n_nodes(); ++node)
    f.coefficients[node] = dof_values[dofs.node_to_dof[node]];
  return f;
}

FieldEval evaluate_field(const FemField& field,
                         std::span<const std::array<double, 3>> points) {
  FieldEval out;
  out.values.resize(points.size());
  WallTimer timer;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const PointLocation loc = locate_point(*field.mesh, points[i].data());
    out.values[i] = field.value_at(loc);
  }
  out.seconds = timer.seconds();
  return out;
}

std::string field_to_json(const FemField& field, const std::string& mesh_id) {
  nlohmann::json j;
  j["mesh"] = mesh_id;
  j["coefficients"] = field.coefficients;
  return j.dump();
}

std::vector<double> field_from_json(const std::string& text,
                                    std::string* mesh_id) {
  const auto j = nlohmann::json::parse(text);
  if (mesh_id) *mesh_id = j.at("mesh").get<std::string>();
  return j.at("coefficients").get<std::vector<double>>();
}

}  // namespace pdearena
