#ifndef PDEARENA_MESH_HPP
#define PDEARENA_MESH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace pdearena {

/// Structured simplex mesh of an axis-aligned box: intervals in 1D, squares
/// split into two triangles in 2D, cubes split into six Kuhn tetrahedra in
/// 3D. Immutable after construction; safe to share across threads.
///
/// Node ordering is lexicographic by (z, y, x) lattice index, so meshes are
/// bit-reproducible. Every square is split along its lower-left to
/// upper-right diagonal; every cube is split around its main diagonal.
struct Mesh {
  int dim = 0;
  int cells_per_side = 0;  // n: lattice subdivisions per dimension
  std::array<double, 3> box_lo{};
  std::array<double, 3> box_hi{};
  std::vector<std::array<double, 3>> nodes;  // first `dim` coordinates used
  std::vector<std::array<int, 4>> cells;     // first dim+1 vertices used
  // Bit 2*d marks the low face of dimension d, bit 2*d+1 the high face.
  std::vector<std::uint8_t> face_mask;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int verts_per_cell() const { return dim + 1; }
  bool on_boundary(int node) const { return face_mask[node] != 0; }
  double spacing(int d) const {
    return (box_hi[d] - box_lo[d]) / cells_per_side;
  }
  /// Length / area / volume of one cell (all cells are congruent).
  double cell_measure(int cell) const;
  /// Lattice node index for integer coordinates (i[, j[, k]]).
  int node_index(int i, int j = 0, int k = 0) const;
};

struct PointLocation {
  int cell = -1;
  std::array<double, 4> bary{};  // first dim+1 entries used
};

Mesh build_interval_mesh(int n, double a, double b);
Mesh build_triangle_mesh(int n, const std::array<double, 2>& lo,
                         const std::array<double, 2>& hi);
Mesh build_tet_mesh(int n, const std::array<double, 3>& lo,
                    const std::array<double, 3>& hi);

/// O(1) structured lookup: the containing cell and the barycentric
/// coordinates of `point` within it. Throws OutOfDomain if the point is
/// outside the box by more than a 1e-12 relative tolerance.
PointLocation locate_point(const Mesh& mesh, const double* point);

/// Debug dump (nodes, cells, boundary tags) as a JSON string.
std::string mesh_to_json(const Mesh& mesh);

}  // namespace pdearena

#endif
