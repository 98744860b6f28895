#include "gradedrt/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace gradedrt {

void GradingSpec::validate() const {
  if (n < 1) throw std::invalid_argument("GradingSpec: N must be >= 1");
  if (beta < 1.0) throw std::invalid_argument("GradingSpec: beta must be >= 1");
}

std::vector<double> grade_points(const GradingSpec& spec) {
  spec.validate();
  std::vector<double> x(spec.n + 1);
  for (int i = 0; i <= spec.n; ++i)
    x[i] = std::pow(double(i) / spec.n, spec.beta);
  return x;
}

void FaceGeometry::validate() const {
  Vec3 d1 = vertices[1] - vertices[0];
  Vec3 d2 = vertices[2] - vertices[0];
  double area2 = d1.cross(d2).norm();
  if (!(area2 > 1e-14 * (d1.norm() + d2.norm()) * (d1.norm() + d2.norm())))
    throw std::invalid_argument("FaceGeometry: degenerate face");
  if (orientation != 1 && orientation != -1)
    throw std::invalid_argument("FaceGeometry: orientation must be +1 or -1");
}

Vec2 GradedMesh::reference_normal(CellKind kind, int ledge) {
  static const Vec2 tri[3] = {{0, -1}, {1, 0}, {-M_SQRT1_2, M_SQRT1_2}};
  static const Vec2 quad[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
  return kind == CellKind::Triangle ? tri[ledge] : quad[ledge];
}

std::pair<Vec2, Vec2> GradedMesh::reference_edge(CellKind kind, int ledge) {
  static const Vec2 tv[3] = {{0, 0}, {1, 0}, {1, 1}};
  static const Vec2 qv[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  if (kind == CellKind::Triangle) {
    static const int idx[3][2] = {{0, 1}, {1, 2}, {0, 2}};
    return {tv[idx[ledge][0]], tv[idx[ledge][1]]};
  }
  static const int idx[4][2] = {{0, 1}, {1, 2}, {3, 2}, {0, 3}};
  return {qv[idx[ledge][0]], qv[idx[ledge][1]]};
}

double GradedMesh::element_area(int k) const {
  const Element& e = elements[k];
  double ref = e.kind == CellKind::Triangle ? 0.5 : 1.0;
  return std::abs(e.map.jacobian()) * ref;
}

double GradedMesh::element_diameter(int k) const {
  const Element& e = elements[k];
  double d = 0;
  int nv = e.nverts();
  for (int i = 0; i < nv; ++i)
    for (int j = i + 1; j < nv; ++j)
      d = std::max(d, (vertices[e.v[i]] - vertices[e.v[j]]).norm());
  return d;
}

double GradedMesh::domain_area() const {
  double s = 0;
  for (std::size_t k = 0; k < elements.size(); ++k) s += element_area(int(k));
  return s;
}

Vec2 GradedMesh::edge_normal(int e) const {
  Vec2 d = vertices[edges[e].v1] - vertices[edges[e].v0];
  d.normalize();
  return {d.y(), -d.x()};
}

double GradedMesh::edge_length(int e) const {
  return (vertices[edges[e].v1] - vertices[edges[e].v0]).norm();
}

int GradedMesh::boundary_edge_count() const {
  int c = 0;
  for (const auto& e : edges) c += e.boundary() ? 1 : 0;
  return c;
}

std::uint64_t GradedMesh::checksum() const {
  Fnv1a h;
  h.add_int(int(domain));
  h.add_int(grading.n);
  h.add_double(grading.beta);
  for (const auto& v : vertices) {
    h.add_double(v.x());
    h.add_double(v.y());
  }
  for (const auto& e : elements) {
    h.add_int(int(e.kind));
    for (int i = 0; i < e.nverts(); ++i) h.add_int(e.v[i]);
  }
  return h.h;
}

namespace {

// Builds the global edge table from element connectivity and assigns
// orientation signs. Global edge normal: rot(-90) of unit(v1 - v0), v0 < v1.
void finalize_edges(GradedMesh& m) {
  std::map<std::pair<int, int>, int> table;
  for (std::size_t k = 0; k < m.elements.size(); ++k) {
    Element& el = m.elements[k];
    static const int tri_e[3][2] = {{0, 1}, {1, 2}, {0, 2}};
    static const int quad_e[4][2] = {{0, 1}, {1, 2}, {3, 2}, {0, 3}};
    for (int le = 0; le < el.nedges(); ++le) {
      const int* idx = el.kind == CellKind::Triangle ? tri_e[le] : quad_e[le];
      int a = el.v[idx[0]], b = el.v[idx[1]];
      std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = table.find(key);
      int eid;
      if (it == table.end()) {
        eid = int(m.edges.size());
        table.emplace(key, eid);
        m.edges.push_back({key.first, key.second, int(k), -1});
      } else {
        eid = it->second;
        if (m.edges[eid].elem1 >= 0)
          throw std::runtime_error("mesh: edge with more than two incident elements");
        m.edges[eid].elem1 = int(k);
      }
      el.edge[le] = eid;
      // outward normal at this local edge
      Vec2 nout = el.map.push_normal(GradedMesh::reference_normal(el.kind, le));
      Vec2 d = (m.vertices[key.second] - m.vertices[key.first]).normalized();
      Vec2 ng(d.y(), -d.x());
      el.esign[le] = nout.dot(ng) > 0 ? 1 : -1;
    }
  }
}

int add_vertex(GradedMesh& m, std::unordered_map<std::uint64_t, int>& lut,
               const Vec2& p, double quantum) {
  auto q = [&](double x) { return std::int64_t(std::llround(x / quantum)); };
  std::uint64_t key = (std::uint64_t(std::uint32_t(q(p.x()))) << 32) ^
                      std::uint64_t(std::uint32_t(q(p.y())));
  auto it = lut.find(key);
  if (it != lut.end()) return it->second;
  int id = int(m.vertices.size());
  m.vertices.push_back(p);
  lut.emplace(key, id);
  return id;
}

// Instantiates the reference graded square/triangle pattern under an affine
// block map, sharing vertices with previously emitted blocks.
void emit_block(GradedMesh& m, std::unordered_map<std::uint64_t, int>& lut,
                double quantum, const AffineMap& bmap, int block,
                const std::vector<double>& pts, bool triangle_block) {
  int n = int(pts.size()) - 1;
  auto vid = [&](double x, double y) {
    return add_vertex(m, lut, bmap(Vec2(x, y)), quantum);
  };
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= (triangle_block ? i : n); ++j) {
      if (triangle_block && j == i) {
        Element el;
        el.kind = CellKind::Triangle;
        el.v = {vid(pts[i - 1], pts[i - 1]), vid(pts[i], pts[i - 1]),
                vid(pts[i], pts[i]), -1};
        double h = pts[i] - pts[i - 1];
        el.map.a = bmap.a * (h * Mat2::Identity());
        el.map.b = bmap(Vec2(pts[i - 1], pts[i - 1]));
        el.block = block;
        el.gi = i;
        el.gj = i;
        m.elements.push_back(el);
      } else {
        Element el;
        el.kind = CellKind::Quad;
        el.v = {vid(pts[i - 1], pts[j - 1]), vid(pts[i], pts[j - 1]),
                vid(pts[i], pts[j]), vid(pts[i - 1], pts[j])};
        Mat2 s = Mat2::Zero();
        s(0, 0) = pts[i] - pts[i - 1];
        s(1, 1) = pts[j] - pts[j - 1];
        el.map.a = bmap.a * s;
        el.map.b = bmap(Vec2(pts[i - 1], pts[j - 1]));
        el.block = block;
        el.gi = i;
        el.gj = j;
        m.elements.push_back(el);
      }
    }
  }
}

}  // namespace

GradedMesh build_reference_graded_square(const GradingSpec& spec) {
  auto pts = grade_points(spec);
  GradedMesh m;
  m.domain = DomainKind::UnitSquare;
  m.grading = spec;
  std::unordered_map<std::uint64_t, int> lut;
  emit_block(m, lut, 1e-12, AffineMap{}, -1, pts, false);
  finalize_edges(m);
  return m;
}

GradedMesh build_reference_graded_triangle(const GradingSpec& spec) {
  auto pts = grade_points(spec);
  GradedMesh m;
  m.domain = DomainKind::UnitTriangle;
  m.grading = spec;
  std::unordered_map<std::uint64_t, int> lut;
  emit_block(m, lut, 1e-12, AffineMap{}, -1, pts, true);
  finalize_edges(m);
  return m;
}

GradedMesh build_graded_face_mesh(const FaceGeometry& face, const GradingSpec& spec) {
  face.validate();
  auto pts = grade_points(spec);

  GradedMesh m;
  m.domain = DomainKind::Face;
  m.grading = spec;
  m.face_id = face.id;

  // face-local orthonormal frame
  std::array<Vec3, 3> fv = face.vertices;
  if (face.orientation < 0) std::swap(fv[1], fv[2]);
  Vec3 e1 = (fv[1] - fv[0]).normalized();
  Vec3 d2 = fv[2] - fv[0];
  Vec3 e2 = (d2 - d2.dot(e1) * e1).normalized();
  m.frame_origin = fv[0];
  m.frame_e1 = e1;
  m.frame_e2 = e2;

  std::array<Vec2, 3> p;
  p[0] = Vec2(0, 0);
  p[1] = Vec2((fv[1] - fv[0]).norm(), 0);
  p[2] = Vec2((fv[2] - fv[0]).dot(e1), (fv[2] - fv[0]).dot(e2));
  Vec2 g = (p[0] + p[1] + p[2]) / 3.0;

  double diam = std::max({(p[1] - p[0]).norm(), (p[2] - p[1]).norm(),
                          (p[0] - p[2]).norm()});
  double quantum = 1e-12 * diam;

  std::unordered_map<std::uint64_t, int> lut;
  for (int c = 0; c < 3; ++c) {
    const Vec2& a = p[c];
    const Vec2& b = p[(c + 1) % 3];
    const Vec2& d = p[(c + 2) % 3];
    // parallelogram anchored at vertex a; (0,0) -> a, (1,1) -> centroid
    AffineMap par;
    par.a.col(0) = (b - a) / 3.0;
    par.a.col(1) = (d - a) / 3.0;
    par.b = a;
    emit_block(m, lut, quantum, par, c, pts, false);
    // triangle block along side a-b; (1,1) -> centroid
    Vec2 q1 = a + (b - a) / 3.0;
    Vec2 q2 = a + 2.0 * (b - a) / 3.0;
    AffineMap tri;
    tri.a.col(0) = q2 - q1;
    tri.a.col(1) = g - q2;
    tri.b = q1;
    emit_block(m, lut, quantum, tri, 3 + c, pts, true);
  }
  finalize_edges(m);
  return m;
}

bool is_conforming(const GradedMesh& mesh) {
  // finalize_edges already guarantees <= 2 incidences; a hanging node would
  // show up as a boundary-flagged edge lying inside the domain, i.e. some
  // vertex of one element strictly inside another element's edge. Scan all
  // edge/vertex pairs at mesh scale.
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const Edge& ed = mesh.edges[e];
    if (!ed.boundary()) continue;
    const Vec2& a = mesh.vertices[ed.v0];
    const Vec2& b = mesh.vertices[ed.v1];
    double len = (b - a).norm();
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      if (int(v) == ed.v0 || int(v) == ed.v1) continue;
      const Vec2& x = mesh.vertices[v];
      double t = (x - a).dot(b - a) / (len * len);
      if (t <= 1e-10 || t >= 1 - 1e-10) continue;
      double dist = std::abs(cross2(b - a, x - a)) / len;
      if (dist < 1e-10 * len) return false;  // vertex splits this edge
    }
  }
  // every interior edge has exactly two incident elements by construction
  return true;
}

MeshQuality mesh_quality_report(const GradedMesh& mesh) {
  MeshQuality q;
  q.h_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    double d = mesh.element_diameter(int(k));
    double a = mesh.element_area(int(k));
    q.h_max = std::max(q.h_max, d);
    q.h_min = std::min(q.h_min, d);
    q.max_aspect = std::max(q.max_aspect, d * d / (2.0 * a));
    q.area += a;
  }
  q.conforming = is_conforming(mesh);
  return q;
}

namespace {

// Greedy grouping of graded intervals into pieces of length ~ 1/N.
std::vector<int> coarse_cuts(const std::vector<double>& pts) {
  int n = int(pts.size()) - 1;
  double target = 1.0 / n;
  std::vector<int> cuts{0};
  for (int i = 1; i <= n; ++i) {
    if (pts[i] - pts[cuts.back()] >= target || i == n) cuts.push_back(i);
  }
  // merge an undersized trailing piece
  if (cuts.size() >= 3 && pts[cuts.back()] - pts[cuts[cuts.size() - 2]] < 0.5 * target)
    cuts.erase(cuts.end() - 2);
  return cuts;
}

}  // namespace

CoarseMesh coarsen_to_quasi_uniform(const GradedMesh& mesh) {
  if (!mesh.has_block_tags)
    throw std::invalid_argument("coarsen_to_quasi_uniform: mesh lacks block tags");
  auto pts = grade_points(mesh.grading);
  auto cuts = coarse_cuts(pts);
  int nc = int(cuts.size()) - 1;
  std::vector<double> cpts(nc + 1);
  for (int i = 0; i <= nc; ++i) cpts[i] = pts[cuts[i]];

  // coarse interval index of fine interval i (1-based)
  auto cindex = [&](int i) {
    for (int c = 1; c <= nc; ++c)
      if (i <= cuts[c]) return c;
    return nc;
  };

  CoarseMesh out;
  out.mesh.domain = mesh.domain;
  out.mesh.grading = {nc, 1.0};  // synthetic tag: coarse pattern is ~uniform
  out.mesh.grading.beta = mesh.grading.beta;
  out.mesh.face_id = mesh.face_id;
  out.mesh.frame_origin = mesh.frame_origin;
  out.mesh.frame_e1 = mesh.frame_e1;
  out.mesh.frame_e2 = mesh.frame_e2;

  // Rebuild per block with the coarse 1D pattern, reusing block maps from any
  // fine element of that block (they share the same block-level affine map).
  std::map<int, AffineMap> block_maps;
  std::map<int, bool> block_is_tri;
  for (const auto& el : mesh.elements) {
    if (block_maps.count(el.block)) continue;
    // reconstruct block map: fine cell map = block_map * diag(h_i, h_j) + shift
    AffineMap bm;
    Mat2 s = Mat2::Zero();
    double hi = pts[el.gi] - pts[el.gi - 1];
    double hj = (el.kind == CellKind::Triangle) ? hi : pts[el.gj] - pts[el.gj - 1];
    s(0, 0) = 1.0 / hi;
    s(1, 1) = 1.0 / hj;
    bm.a = el.map.a * s;
    bm.b = el.map.b - bm.a * Vec2(pts[el.gi - 1], pts[el.gj - 1]);
    block_maps[el.block] = bm;
    block_is_tri[el.block] =
        mesh.domain == DomainKind::UnitTriangle || (el.block >= 3 && el.block <= 5);
  }

  std::unordered_map<std::uint64_t, int> lut;
  double quantum = 1e-12;
  if (mesh.domain == DomainKind::Face) {
    double diam = 0;
    for (const auto& v : mesh.vertices)
      for (const auto& w : mesh.vertices) diam = std::max(diam, (v - w).norm());
    quantum = 1e-12 * diam;
  }
  for (auto& [block, bm] : block_maps)
    emit_block(out.mesh, lut, quantum, bm, block, cpts, block_is_tri[block]);
  finalize_edges(out.mesh);

  // children: fine element belongs to the coarse cell covering its (gi, gj)
  out.children.assign(out.mesh.elements.size(), {});
  std::map<std::tuple<int, int, int>, int> coarse_of;  // (block, ci, cj) -> id
  for (std::size_t k = 0; k < out.mesh.elements.size(); ++k) {
    const Element& el = out.mesh.elements[k];
    coarse_of[{el.block, el.gi, el.gj}] = int(k);
  }
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    const Element& el = mesh.elements[k];
    int ci = cindex(el.gi), cj = cindex(el.gj);
    if (block_is_tri[el.block] && cj > ci) cj = ci;
    auto it = coarse_of.find({el.block, ci, cj});
    if (it == coarse_of.end()) throw std::runtime_error("coarsen: lost child");
    out.children[it->second].push_back(int(k));
  }

  double dmin = std::numeric_limits<double>::infinity(), dmax = 0;
  for (std::size_t k = 0; k < out.mesh.elements.size(); ++k) {
    double d = out.mesh.element_diameter(int(k));
    double a = out.mesh.element_area(int(k));
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
    out.max_aspect = std::max(out.max_aspect, d * d / (2.0 * a));
  }
  out.diameter_ratio = dmax / dmin;
  return out;
}

namespace {
std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

void write_mesh(std::ostream& os, const GradedMesh& mesh) {
  const char* dom = mesh.domain == DomainKind::UnitSquare    ? "unit-square"
                    : mesh.domain == DomainKind::UnitTriangle ? "unit-triangle"
                                                              : "face";
  os << "# gradedrt-mesh 1\n";
  os << "# domain " << dom << "\n";
  if (mesh.domain == DomainKind::Face) os << "# face-id " << mesh.face_id << "\n";
  os << "# n " << mesh.grading.n << "\n";
  os << "# beta " << fmt_double(mesh.grading.beta) << "\n";
  os << "# counts " << mesh.vertices.size() << " " << mesh.elements.size() << " "
     << mesh.edges.size() << "\n";
  for (const auto& v : mesh.vertices) {
    os << "v " << fmt_double(v.x()) << " " << fmt_double(v.y());
    if (mesh.domain == DomainKind::Face) {
      Vec3 x = mesh.frame_origin + v.x() * mesh.frame_e1 + v.y() * mesh.frame_e2;
      os << " " << fmt_double(x.x()) << " " << fmt_double(x.y()) << " "
         << fmt_double(x.z());
    }
    os << "\n";
  }
  for (const auto& e : mesh.elements) {
    os << "c " << (e.kind == CellKind::Triangle ? "tri" : "quad");
    for (int i = 0; i < e.nverts(); ++i) os << " " << e.v[i];
    os << " block " << e.block << " ij " << e.gi << " " << e.gj << "\n";
  }
  for (const auto& e : mesh.edges)
    os << "g " << e.v0 << " " << e.v1 << " " << e.elem0 << " " << e.elem1 << "\n";
}

GradedMesh read_mesh(std::istream& is) {
  GradedMesh m;
  m.has_block_tags = true;
  std::string line;
  std::vector<std::array<int, 3>> tags;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "#") {
      std::string key;
      ss >> key;
      if (key == "domain") {
        std::string d;
        ss >> d;
        m.domain = d == "unit-square"   ? DomainKind::UnitSquare
                   : d == "unit-triangle" ? DomainKind::UnitTriangle
                                          : DomainKind::Face;
      } else if (key == "face-id") {
        ss >> m.face_id;
      } else if (key == "n") {
        ss >> m.grading.n;
      } else if (key == "beta") {
        ss >> m.grading.beta;
      }
    } else if (tok == "v") {
      Vec2 p;
      ss >> p.x() >> p.y();
      m.vertices.push_back(p);
    } else if (tok == "c") {
      std::string kind;
      ss >> kind;
      Element el;
      el.kind = kind == "tri" ? CellKind::Triangle : CellKind::Quad;
      for (int i = 0; i < el.nverts(); ++i) ss >> el.v[i];
      std::string kw;
      ss >> kw >> el.block >> kw >> el.gi >> el.gj;
      m.elements.push_back(el);
    }
  }
  // rebuild affine maps from vertex coordinates
  for (auto& el : m.elements) {
    const Vec2& p0 = m.vertices[el.v[0]];
    const Vec2& p1 = m.vertices[el.v[1]];
    if (el.kind == CellKind::Triangle) {
      const Vec2& p2 = m.vertices[el.v[2]];
      // t0=(0,0), t1=(1,0), t2=(1,1): columns (p1-p0, p2-p1)
      el.map.a.col(0) = p1 - p0;
      el.map.a.col(1) = p2 - p1;
      el.map.b = p0;
    } else {
      const Vec2& p3 = m.vertices[el.v[3]];
      el.map.a.col(0) = p1 - p0;
      el.map.a.col(1) = p3 - p0;
      el.map.b = p0;
    }
  }
  finalize_edges(m);
  return m;
}

}  // namespace gradedrt
