#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "pdearena/errors.hpp"
#include "pdearena/mesh.hpp"
#include "pdearena/rng.hpp"

using namespace pdearena;

namespace {

double total_measure(const Mesh& m) {
  double s = 0.0;
  for (int c = 0; c < m.n_cells(); ++c) s += m.cell_measure(c);
  return s;
}

double box_measure(const Mesh& m) {
  double s = 1.0;
  for (int d = 0; d < m.dim; ++d) s *= m.box_hi[d] - m.box_lo[d];
  return s;
}

}  // namespace

TEST_CASE("interval mesh basics") {
  const Mesh m = build_interval_mesh(2, 0.0, 1.0);
  REQUIRE(m.n_nodes() == 3);
  REQUIRE(m.n_cells() == 2);
  CHECK(m.nodes[0][0] == 0.0);
  CHECK(m.nodes[1][0] == 0.5);
  CHECK(m.nodes[2][0] == 1.0);
  CHECK(m.cells[0][0] == 0);
  CHECK(m.cells[0][1] == 1);
  CHECK(m.cells[1][0] == 1);
  CHECK(m.cells[1][1] == 2);
  CHECK(m.on_boundary(0));
  CHECK(!m.on_boundary(1));
  CHECK(m.on_boundary(2));
}

TEST_CASE("interval mesh families") {
  const Mesh m64 = build_interval_mesh(64, 0.0, 1.0);
  CHECK(m64.n_nodes() == 65);
  CHECK(m64.n_cells() == 64);

  const Mesh m3 = build_interval_mesh(3, -5.0, 5.0);
  CHECK(m3.spacing(0) == doctest::Approx(10.0 / 3).epsilon(1e-15));
  CHECK(total_measure(m3) == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("interval mesh rejects bad arguments") {
  CHECK_THROWS_AS(build_interval_mesh(0, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_interval_mesh(4, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_interval_mesh(4, 2.0, 1.0), InvalidArgument);
}

TEST_CASE("triangle mesh basics") {
  const Mesh m = build_triangle_mesh(1, {0, 0}, {1, 1});
  REQUIRE(m.n_nodes() == 4);
  REQUIRE(m.n_cells() == 2);
  CHECK(m.cell_measure(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.cell_measure(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(build_triangle_mesh(0, {0, 0}, {1, 1}), InvalidArgument);
}

TEST_CASE("triangle mesh counts and partition") {
  const Mesh m = build_triangle_mesh(100, {0, 0}, {1, 1});
  CHECK(m.n_nodes() == 10201);
  CHECK(m.n_cells() == 20000);
  for (int n : {1, 3, 7}) {
    const Mesh mm = build_triangle_mesh(n, {0, 0}, {1, 1});
    CHECK(std::abs(total_measure(mm) - 1.0) <= 1e-12);
    const double area = 1.0 / (2.0 * n * n);
    for (int c = 0; c < mm.n_cells(); ++c)
      CHECK(mm.cell_measure(c) == doctest::Approx(area).epsilon(1e-12));
  }
}

TEST_CASE("tet mesh Kuhn split") {
  const Mesh m = build_tet_mesh(1, {0, 0, 0}, {1, 1, 1});
  REQUIRE(m.n_nodes() == 8);
  REQUIRE(m.n_cells() == 6);
  for (int c = 0; c < 6; ++c)
    CHECK(m.cell_measure(c) == doctest::Approx(1.0 / 6).epsilon(1e-14));

  const Mesh m16 = build_tet_mesh(16, {0, 0, 0}, {1, 1, 1});
  CHECK(m16.n_nodes() == 4913);
  CHECK(m16.n_cells() == 6 * 16 * 16 * 16);

  const Mesh m4 = build_tet_mesh(4, {0, 0, 0}, {1, 1, 1});
  CHECK(std::abs(total_measure(m4) - 1.0) <= 1e-12);
}

TEST_CASE("cell count doubles as 2^dim") {
  CHECK(build_interval_mesh(10, 0, 1).n_cells() * 2 ==
        build_interval_mesh(20, 0, 1).n_cells());
  CHECK(build_triangle_mesh(5, {0, 0}, {1, 1}).n_cells() * 4 ==
        build_triangle_mesh(10, {0, 0}, {1, 1}).n_cells());
  CHECK(build_tet_mesh(3, {0, 0, 0}, {1, 1, 1}).n_cells() * 8 ==
        build_tet_mesh(6, {0, 0, 0}, {1, 1, 1}).n_cells());
}

TEST_CASE("boundary tagging") {
  const Mesh m = build_tet_mesh(4, {0, 0, 0}, {1, 1, 1});
  // every corner is tagged
  for (int i : {0, 4})
    for (int j : {0, 4})
      for (int k : {0, 4}) CHECK(m.on_boundary(m.node_index(i, j, k)));
  // interior lattice nodes are never tagged
  CounterRng rng(7);
  for (int t = 0; t < 50; ++t) {
    const int i = 1 + static_cast<int>(rng.next_below(3));
    const int j = 1 + static_cast<int>(rng.next_below(3));
    const int k = 1 + static_cast<int>(rng.next_below(3));
    CHECK(!m.on_boundary(m.node_index(i, j, k)));
  }
  // a node is tagged iff some coordinate sits on a box face
  for (int v = 0; v < m.n_nodes(); ++v) {
    bool on_face = false;
    for (int d = 0; d < 3; ++d)
      on_face |= m.nodes[v][d] == 0.0 || m.nodes[v][d] == 1.0;
    CHECK(m.on_boundary(v) == on_face);
  }
}

TEST_CASE("locate_point basics") {
  const Mesh m = build_interval_mesh(2, 0.0, 1.0);
  const double mid[1] = {0.25};
  const PointLocation at_mid = locate_point(m, mid);
  CHECK(at_mid.cell == 0);
  CHECK(at_mid.bary[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(at_mid.bary[1] == doctest::Approx(0.5).epsilon(1e-14));

  const double node[1] = {0.5};
  const PointLocation at_node = locate_point(m, node);
  const double big = std::max(at_node.bary[0], at_node.bary[1]);
  const double small = std::min(at_node.bary[0], at_node.bary[1]);
  CHECK(big == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(small) <= 1e-14);

  const double q[1] = {0.3};
  const PointLocation at_q = locate_point(m, q);
  CHECK(at_q.cell == 0);
  CHECK(at_q.bary[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(at_q.bary[1] == doctest::Approx(0.6).epsilon(1e-12));

  const double outside[1] = {1.5};
  CHECK_THROWS_AS(locate_point(m, outside), OutOfDomain);
}

TEST_CASE("locate_point reproduces query points in every dimension") {
  CounterRng rng(99);
  const Mesh meshes[3] = {build_interval_mesh(7, -2.0, 3.0),
                          build_triangle_mesh(5, {-1, 0}, {2, 4}),
                          build_tet_mesh(3, {0, -1, 2}, {1, 1, 5})};
  for (const Mesh& m : meshes) {
    for (int t = 0; t < 200; ++t) {
      double p[3] = {0, 0, 0};
      for (int d = 0; d < m.dim; ++d)
        p[d] = rng.next_double(m.box_lo[d], m.box_hi[d]);
      const PointLocation loc = locate_point(m, p);
      double sum = 0.0;
      double rec[3] = {0, 0, 0};
      for (int v = 0; v <= m.dim; ++v) {
        CHECK(loc.bary[v] >= -1e-12);
        CHECK(loc.bary[v] <= 1.0 + 1e-12);
        sum += loc.bary[v];
        for (int d = 0; d < m.dim; ++d)
          rec[d] += loc.bary[v] * m.nodes[m.cells[loc.cell][v]][d];
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
      for (int d = 0; d < m.dim; ++d) CHECK(std::abs(rec[d] - p[d]) <= 1e-12);
    }
  }
}

TEST_CASE("partition of the box in every dimension") {
  const Mesh m1 = build_interval_mesh(13, -1.0, 2.5);
  CHECK(std::abs(total_measure(m1) / box_measure(m1) - 1.0) <= 1e-12);
  const Mesh m2 = build_triangle_mesh(9, {-2, 1}, {0.5, 3});
  CHECK(std::abs(total_measure(m2) / box_measure(m2) - 1.0) <= 1e-12);
  const Mesh m3 = build_tet_mesh(5, {0, 0, 0}, {2, 1, 3});
  CHECK(std::abs(total_measure(m3) / box_measure(m3) - 1.0) <= 1e-12);
}

TEST_CASE("mesh json dump includes nodes cells and tags") {
  const Mesh m = build_interval_mesh(2, 0.0, 1.0);
  const std::string js = mesh_to_json(m);
  CHECK(js.find("\"nodes\"") != std::string::npos);
  CHECK(js.find("\"cells\"") != std::string::npos);
  CHECK(js.find("\"boundary_faces\"") != std::string::npos);
}
