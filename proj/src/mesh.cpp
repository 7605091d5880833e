#include "pdearena/mesh.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "pdearena/errors.hpp"

namespace pdearena {

namespace {

// The six Kuhn tetrahedra of a unit cube, one per ordering of the local
// coordinates; tet p covers { x : x[perm[p][0]] >= x[perm[p][1]] >= x[perm[p][2]] }.
constexpr int kCubePerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

void check_box(double a, double b) {
  if (!(a < b)) throw InvalidArgument("mesh box must satisfy lo < hi");
}

void check_n(int n) {
  if (n < 1) throw InvalidArgument("mesh needs at least one cell per side");
}

std::uint8_t lattice_mask(int i, int n, int d) {
  std::uint8_t m = 0;
  if (i == 0) m |= std::uint8_t(1u << (2 * d));
  if (i == n) m |= std::uint8_t(1u << (2 * d + 1));
  return m;
}

}  // namespace

int Mesh::node_index(int i, int j, int k) const {
  const int s = cells_per_side + 1;
  return (k * s + j) * s + i;
}

double Mesh::cell_measure(int cell) const {
  const auto& c = cells[cell];
  const auto& p0 = nodes[c[0]];
  if (dim == 1) return std::abs(nodes[c[1]][0] - p0[0]);
  if (dim == 2) {
    const double ax = nodes[c[1]][0] - p0[0], ay = nodes[c[1]][1] - p0[1];
    const double bx = nodes[c[2]][0] - p0[0], by = nodes[c[2]][1] - p0[1];
    return std::abs(ax * by - ay * bx) / 2.0;
  }
  double e[3][3];
  for (int v = 1; v <= 3; ++v)
    for (int d = 0; d < 3; ++d) e[v - 1][d] = nodes[c[v]][d] - p0[d];
  const double det = e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
                     e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
                     e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
  return std::abs(det) / 6.0;
}

Mesh build_interval_mesh(int n, double a, double b) {
  check_n(n);
  check_box(a, b);
  Mesh m;
  m.dim = 1;
  m.cells_per_side = n;
  m.box_lo = {a, 0, 0};
  m.box_hi = {b, 0, 0};
  m.nodes.resize(n + 1);
  m.face_mask.resize(n + 1, 0);
  const double h = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    m.nodes[i] = {i == n ? b : a + i * h, 0, 0};
    m.face_mask[i] = lattice_mask(i, n, 0);
  }
  m.cells.resize(n);
  for (int i = 0; i < n; ++i) m.cells[i] = {i, i + 1, 0, 0};
  return m;
}

Mesh build_triangle_mesh(int n, const std::array<double, 2>& lo,
                         const std::array<double, 2>& hi) {
  check_n(n);
  check_box(lo[0], hi[0]);
  check_box(lo[1], hi[1]);
  Mesh m;
  m.dim = 2;
  m.cells_per_side = n;
  m.box_lo = {lo[0], lo[1], 0};
  m.box_hi = {hi[0], hi[1], 0};
  const int s = n + 1;
  m.nodes.resize(s * s);
  m.face_mask.resize(s * s, 0);
  const double hx = (hi[0] - lo[0]) / n, hy = (hi[1] - lo[1]) / n;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const int id = j * s + i;
      m.nodes[id] = {i == n ? hi[0] : lo[0] + i * hx,
                     j == n ? hi[1] : lo[1] + j * hy, 0};
      m.face_mask[id] =
          std::uint8_t(lattice_mask(i, n, 0) | lattice_mask(j, n, 1));
    }
  m.cells.reserve(2 * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int v00 = j * s + i, v10 = v00 + 1, v01 = v00 + s, v11 = v01 + 1;
      m.cells.push_back({v00, v10, v11, 0});  // below the diagonal
      m.cells.push_back({v00, v11, v01, 0});  // above the diagonal
    }
  return m;
}

Mesh build_tet_mesh(int n, const std::array<double, 3>& lo,
                    const std::array<double, 3>& hi) {
  check_n(n);
  for (int d = 0; d < 3; ++d) check_box(lo[d], hi[d]);
  Mesh m;
  m.dim = 3;
  m.cells_per_side = n;
  m.box_lo = lo;
  m.box_hi = hi;
  const int s = n + 1;
  m.nodes.resize(std::size_t(s) * s * s);
  m.face_mask.resize(m.nodes.size(), 0);
  const double h[3] = {(hi[0] - lo[0]) / n, (hi[1] - lo[1]) / n,
                       (hi[2] - lo[2]) / n};
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        const int id = (k * s + j) * s + i;
        m.nodes[id] = {i == n ? hi[0] : lo[0] + i * h[0],
                       j == n ? hi[1] : lo[1] + j * h[1],
                       k == n ? hi[2] : lo[2] + k * h[2]};
        m.face_mask[id] =
            std::uint8_t(lattice_mask(i, n, 0) | lattice_mask(j, n, 1) |
                         lattice_mask(k, n, 2));
      }
  m.cells.reserve(std::size_t(6) * n * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int base[3] = {i, j, k};
        for (const auto& perm : kCubePerms) {
          std::array<int, 4> cell;
          int v[3] = {base[0], base[1], base[2]};
          cell[0] = (v[2] * s + v[1]) * s + v[0];
          for (int step = 0; step < 3; ++step) {
            ++v[perm[step]];
            cell[step + 1] = (v[2] * s + v[1]) * s + v[0];
          }
          m.cells.push_back(cell);
        }
      }
  return m;
}

PointLocation locate_point(const Mesh& mesh, const double* point) {
  const int n = mesh.cells_per_side;
  double local[3] = {0, 0, 0};
  int idx[3] = {0, 0, 0};
  for (int d = 0; d < mesh.dim; ++d) {
    const double lo = mesh.box_lo[d], hi = mesh.box_hi[d];
    const double tol = 1e-12 * std::max(1.0, std::abs(hi - lo));
    double x = point[d];
    if (x < lo - tol || x > hi + tol)
      throw OutOfDomain("point outside mesh box in dimension " +
                        std::to_string(d));
    x = std::min(std::max(x, lo), hi);
    const double t = (x - lo) / (hi - lo) * n;
    int c = static_cast<int>(t);
    if (c >= n) c = n - 1;
    idx[d] = c;
    local[d] = t - c;
  }

  PointLocation loc;
  if (mesh.dim == 1) {
    loc.cell = idx[0];
    loc.bary = {1.0 - local[0], local[0], 0, 0};
    return loc;
  }
  if (mesh.dim == 2) {
    const double xi = local[0], eta = local[1];
    const int square = idx[1] * n + idx[0];
    if (xi >= eta) {
      loc.cell = 2 * square;
      loc.bary = {1.0 - xi, xi - eta, eta, 0};
    } else {
      loc.cell = 2 * square + 1;
      loc.bary = {1.0 - eta, xi, eta - xi, 0};
    }
    return loc;
  }
  // 3D: pick the Kuhn tet whose coordinate ordering matches; ties resolve
  // to the first matching permutation, which is consistent with kCubePerms.
  int p = 0;
  for (; p < 5; ++p) {
    const auto& perm = kCubePerms[p];
    if (local[perm[0]] >= local[perm[1]] && local[perm[1]] >= local[perm[2]])
      break;
  }
  const auto& perm = kCubePerms[p];
  const double a = local[perm[0]], b = local[perm[1]], c = local[perm[2]];
  const int cube = (idx[2] * n + idx[1]) * n + idx[0];
  loc.cell = 6 * cube + p;
  loc.bary = {1.0 - a, a - b, b - c, c};
  return loc;
}

std::string mesh_to_json(const Mesh& mesh) {
  nlohmann::json j;
  j["dim"] = mesh.dim;
  j["cells_per_side"] = mesh.cells_per_side;
  j["box_lo"] = std::vector<double>(mesh.box_lo.begin(),
                                    mesh.box_lo.begin() + mesh.dim);
  j["box_hi"] = std::vector<double>(mesh.box_hi.begin(),
                                    mesh.box_hi.begin() + mesh.dim);
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (const auto& p : mesh.nodes)
    nodes.push_back(std::vector<double>(p.begin(), p.begin() + mesh.dim));
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const auto& c : mesh.cells)
    cells.push_back(std::vector<int>(c.begin(), c.begin() + mesh.dim + 1));
  auto& tags = j["boundary_faces"] = nlohmann::json::object();
  for (int v = 0; v < mesh.n_nodes(); ++v)
    if (mesh.face_mask[v] != 0) tags[std::to_string(v)] = mesh.face_mask[v];
  return j.dump();
}

}  // namespace pdearena
