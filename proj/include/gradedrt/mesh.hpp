#pragma once

#include "gradedrt/geometry.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gradedrt {

/// Algebraic grading x_i = (i/N)^beta.
struct GradingSpec {
  int n = 1;          // refinement level, N >= 1
  double beta = 1.0;  // grading parameter, beta >= 1

  double mesh_parameter() const { return 1.0 / n; }
  void validate() const;
};

/// Nodes (i/N)^beta, i = 0..N, strictly increasing.
std::vector<double> grade_points(const GradingSpec& spec);

enum class CellKind { Triangle, Quad };
enum class DomainKind { UnitSquare, UnitTriangle, Face };

/// Planar triangular face embedded in R^3.
struct FaceGeometry {
  std::array<Vec3, 3> vertices;
  int orientation = +1;
  std::string id = "face";

  void validate() const;
};

struct Element {
  CellKind kind = CellKind::Quad;
  std::array<int, 4> v{-1, -1, -1, -1};       // CCW vertex ids (3 used for Triangle)
  AffineMap map;                              // reference element -> physical
  int block = -1;                             // face block id 0..5, -1 on reference domains
  int gi = 0, gj = 0;                         // 1-based grading indices
  std::array<int, 4> edge{-1, -1, -1, -1};    // global edge id per local edge
  std::array<int, 4> esign{0, 0, 0, 0};       // +1 if global normal is outward here

  int nverts() const { return kind == CellKind::Triangle ? 3 : 4; }
  int nedges() const { return nverts(); }
};

struct Edge {
  int v0 = -1, v1 = -1;   // v0 < v1; global normal = rot(-90) of unit(v1 - v0)
  int elem0 = -1, elem1 = -1;

  bool boundary() const { return elem1 < 0; }
};

/// Conforming hybrid triangle/parallelogram mesh in face-local 2D coordinates.
struct GradedMesh {
  DomainKind domain = DomainKind::UnitSquare;
  GradingSpec grading;
  std::string face_id;
  // frame for Face domains: 3D point = frame_origin + x*frame_e1 + y*frame_e2
  Vec3 frame_origin = Vec3::Zero();
  Vec3 frame_e1 = Vec3::UnitX(), frame_e2 = Vec3::UnitY();
  bool has_block_tags = true;

  std::vector<Vec2> vertices;
  std::vector<Element> elements;
  std::vector<Edge> edges;

  double element_area(int k) const;
  double element_diameter(int k) const;
  double domain_area() const;
  Vec2 edge_normal(int e) const;   // global unit normal
  double edge_length(int e) const;
  /// Reference outward normal of a local edge.
  static Vec2 reference_normal(CellKind kind, int ledge);
  /// Reference endpoints of a local edge (oriented as stored in Element::v).
  static std::pair<Vec2, Vec2> reference_edge(CellKind kind, int ledge);
  std::uint64_t checksum() const;
  int boundary_edge_count() const;
};

GradedMesh build_reference_graded_square(const GradingSpec& spec);
GradedMesh build_reference_graded_triangle(const GradingSpec& spec);
GradedMesh build_graded_face_mesh(const FaceGeometry& face, const GradingSpec& spec);

/// Quasi-uniform shape-regular mesh whose cells are unions of graded cells.
struct CoarseMesh {
  GradedMesh mesh;
  std::vector<std::vector<int>> children;  // fine element ids per coarse element
  double max_aspect = 0.0;
  double diameter_ratio = 1.0;             // max/min coarse diameter
};
CoarseMesh coarsen_to_quasi_uniform(const GradedMesh& mesh);

struct MeshQuality {
  double h_max = 0, h_min = 0, max_aspect = 0, area = 0;
  bool conforming = true;
};
MeshQuality mesh_quality_report(const GradedMesh& mesh);

/// True when every interior edge has exactly two incident elements and
/// endpoints of incident local edges coincide (no hanging nodes).
bool is_conforming(const GradedMesh& mesh);

void write_mesh(std::ostream& os, const GradedMesh& mesh);
GradedMesh read_mesh(std::istream& is);

}  // namespace gradedrt
