#include <doctest.h>

#include "gradedrt/mesh.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace gradedrt;

TEST_CASE("grade points match the algebraic law") {
  auto p = grade_points({4, 2.0});
  REQUIRE(p.size() == 5);
  CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(p[2] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p[3] == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(p[4] == doctest::Approx(1.0).epsilon(1e-15));

  auto q = grade_points({1, 7.0});
  CHECK(q == std::vector<double>{0.0, 1.0});

  auto r = grade_points({3, 1.0});
  CHECK(r[1] == doctest::Approx(1.0 / 3));
  CHECK(r[2] == doctest::Approx(2.0 / 3));
}

TEST_CASE("grade points strictly increasing with nondecreasing steps") {
  for (double beta : {1.0, 1.5, 2.0, 2.5}) {
    for (int n : {2, 5, 16}) {
      auto p = grade_points({n, beta});
      double prev_step = 0;
      for (int i = 1; i <= n; ++i) {
        CHECK(p[i] > p[i - 1]);
        CHECK(p[i] - p[i - 1] >= prev_step - 1e-15);
        prev_step = p[i] - p[i - 1];
      }
    }
  }
}

TEST_CASE("grading spec validation") {
  CHECK_THROWS_AS(grade_points({0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(grade_points({4, 0.5}), std::invalid_argument);
}

TEST_CASE("reference graded square") {
  GradedMesh m = build_reference_graded_square({2, 2.0});
  CHECK(m.elements.size() == 4);
  // smallest cell (0, 0.25)^2
  double amin = 1e9;
  for (std::size_t k = 0; k < m.elements.size(); ++k)
    amin = std::min(amin, m.element_area(int(k)));
  CHECK(amin == doctest::Approx(1.0 / 16).epsilon(1e-13));

  GradedMesh one = build_reference_graded_square({1, 3.0});
  CHECK(one.elements.size() == 1);
  CHECK(one.domain_area() == doctest::Approx(1.0).epsilon(1e-14));

  GradedMesh big = build_reference_graded_square({8, 1.5});
  CHECK(big.elements.size() == 64);
  CHECK(big.domain_area() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(is_conforming(big));
}

TEST_CASE("reference graded triangle") {
  GradedMesh m2 = build_reference_graded_triangle({2, 1.0});
  int quads = 0, tris = 0;
  for (const auto& e : m2.elements) (e.kind == CellKind::Quad ? quads : tris)++;
  CHECK(quads == 1);
  CHECK(tris == 2);

  GradedMesh m1 = build_reference_graded_triangle({1, 2.0});
  CHECK(m1.elements.size() == 1);
  CHECK(m1.elements[0].kind == CellKind::Triangle);

  GradedMesh m4 = build_reference_graded_triangle({4, 2.0});
  quads = tris = 0;
  for (const auto& e : m4.elements) (e.kind == CellKind::Quad ? quads : tris)++;
  CHECK(quads == 6);
  CHECK(tris == 4);
  CHECK(m4.domain_area() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(is_conforming(m4));
}

TEST_CASE("anisotropy law: cell sides equal grading increments") {
  GradingSpec spec{5, 2.0};
  auto pts = grade_points(spec);
  GradedMesh m = build_reference_graded_triangle(spec);
  for (const auto& el : m.elements) {
    if (el.kind != CellKind::Quad) continue;
    double hx = std::abs(el.map.a(0, 0));
    double hy = std::abs(el.map.a(1, 1));
    CHECK(hx == doctest::Approx(pts[el.gi] - pts[el.gi - 1]).epsilon(1e-14));
    CHECK(hy == doctest::Approx(pts[el.gj] - pts[el.gj - 1]).epsilon(1e-14));
  }
}

TEST_CASE("graded face mesh") {
  FaceGeometry face;
  face.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};

  GradedMesh m1 = build_graded_face_mesh(face, {1, 2.0});
  CHECK(m1.elements.size() == 6);
  int quads = 0;
  for (const auto& e : m1.elements) quads += e.kind == CellKind::Quad;
  CHECK(quads == 3);

  GradedMesh m2 = build_graded_face_mesh(face, {2, 2.0});
  CHECK(m2.elements.size() == 21);  // 3*4 + 3*3
  CHECK(is_conforming(m2));
  CHECK(m2.domain_area() == doctest::Approx(0.5).epsilon(1e-12));

  // skewed face in 3D; partition property
  FaceGeometry skew;
  skew.vertices = {Vec3(0, 0, 1), Vec3(2, 0.3, 1.5), Vec3(0.4, 1.7, 0.2)};
  double exact = 0.5 * ((skew.vertices[1] - skew.vertices[0])
                            .cross(skew.vertices[2] - skew.vertices[0]))
                           .norm();
  for (int n : {1, 3}) {
    GradedMesh m = build_graded_face_mesh(skew, {n, 1.5});
    CHECK(m.domain_area() == doctest::Approx(exact).epsilon(1e-12));
    CHECK(is_conforming(m));
  }

  FaceGeometry degenerate;
  degenerate.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  CHECK_THROWS_AS(build_graded_face_mesh(degenerate, {2, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("positive jacobians everywhere") {
  FaceGeometry face;
  face.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.2, 1.1, 0)};
  GradedMesh meshes[] = {build_graded_face_mesh(face, {3, 2.0}),
                         build_reference_graded_square({3, 2.0}),
                         build_reference_graded_triangle({3, 2.0})};
  for (const auto& m : meshes)
    for (const auto& el : m.elements) CHECK(el.map.jacobian() > 0);
}

TEST_CASE("mesh quality report") {
  MeshQuality q = mesh_quality_report(build_reference_graded_square({2, 1.0}));
  CHECK(q.h_max == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
  CHECK(q.conforming);
  CHECK(q.area == doctest::Approx(1.0).epsilon(1e-13));

  MeshQuality q2 = mesh_quality_report(build_reference_graded_square({4, 2.0}));
  CHECK(q2.h_max == doctest::Approx(std::sqrt(2.0) * 0.4375).epsilon(1e-13));

  // proportionality band h_max * N / beta
  double lo = 1e9, hi = 0;
  for (int n : {4, 8, 16, 32}) {
    MeshQuality qq = mesh_quality_report(build_reference_graded_square({n, 2.0}));
    double v = qq.h_max * n / 2.0;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo < 2.0);
}

TEST_CASE("coarsening to quasi-uniform") {
  GradedMesh m1 = build_reference_graded_square({1, 2.0});
  CoarseMesh c1 = coarsen_to_quasi_uniform(m1);
  CHECK(c1.mesh.elements.size() == 1);
  CHECK(c1.children[0].size() == 1);

  CoarseMesh c = coarsen_to_quasi_uniform(build_reference_graded_square({4, 2.0}));
  CHECK(c.diameter_ratio <= 4.0);
  // nesting: coarse areas equal the sum of child areas
  const GradedMesh& fine = build_reference_graded_square({4, 2.0});
  for (std::size_t k = 0; k < c.mesh.elements.size(); ++k) {
    double sum = 0;
    for (int ch : c.children[k]) sum += fine.element_area(ch);
    CHECK(c.mesh.element_area(int(k)) == doctest::Approx(sum).epsilon(1e-12));
  }

  // shape regularity across the test grid, triangle domain included
  for (double beta : {1.0, 2.0, 2.5}) {
    for (int n : {4, 8, 16}) {
      CoarseMesh cs = coarsen_to_quasi_uniform(build_reference_graded_square({n, beta}));
      CoarseMesh ct =
          coarsen_to_quasi_uniform(build_reference_graded_triangle({n, beta}));
      CHECK(cs.max_aspect < 8.0);
      CHECK(ct.max_aspect < 8.0);
      CHECK(cs.diameter_ratio < 8.0);
      CHECK(is_conforming(cs.mesh));
      CHECK(is_conforming(ct.mesh));
      // exhaustive child cover
      std::set<int> seen;
      std::size_t total = 0;
      for (const auto& ch : ct.children) {
        total += ch.size();
        seen.insert(ch.begin(), ch.end());
      }
      CHECK(total == build_reference_graded_triangle({n, beta}).elements.size());
      CHECK(seen.size() == total);
    }
  }

  GradedMesh untagged = build_reference_graded_square({2, 1.0});
  untagged.has_block_tags = false;
  CHECK_THROWS_AS(coarsen_to_quasi_uniform(untagged), std::invalid_argument);
}

TEST_CASE("mesh text round trip") {
  FaceGeometry face;
  face.vertices = {Vec3(0, 0, 0), Vec3(1.5, 0, 0), Vec3(0.3, 1.2, 0)};
  GradedMesh m = build_graded_face_mesh(face, {2, 1.5});
  std::stringstream ss;
  write_mesh(ss, m);
  GradedMesh r = read_mesh(ss);
  REQUIRE(r.vertices.size() == m.vertices.size());
  REQUIRE(r.elements.size() == m.elements.size());
  REQUIRE(r.edges.size() == m.edges.size());
  CHECK(r.checksum() == m.checksum());
  for (std::size_t k = 0; k < m.elements.size(); ++k)
    CHECK(r.element_area(int(k)) ==
          doctest::Approx(m.element_area(int(k))).epsilon(1e-12));
}
