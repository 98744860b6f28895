#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

namespace gradedrt {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Affine map x = A x_ref + b with constant Jacobian.
struct AffineMap {
  Mat2 a = Mat2::Identity();
  Vec2 b = Vec2::Zero();

  Vec2 operator()(const Vec2& xr) const { return a * xr + b; }
  double jacobian() const { return a.determinant(); }
  Vec2 pull_back(const Vec2& x) const { return a.inverse() * (x - b); }
  /// Unit outward normal of the image edge given the reference outward normal.
  Vec2 push_normal(const Vec2& nref) const {
    Vec2 n = a.inverse().transpose() * nref;
    return n / n.norm();
  }
};

/// Small convex polygon with clipping; used for panel-pair overlap regions.
struct ConvexPoly {
  static constexpr int kMaxVerts = 16;
  std::array<Vec2, kMaxVerts> v;
  int n = 0;

  void clear() { n = 0; }
  void push(const Vec2& p) { v[n++] = p; }

  static ConvexPoly triangle(const Vec2& a, const Vec2& b, const Vec2& c) {
    ConvexPoly p;
    p.push(a); p.push(b); p.push(c);
    return p;
  }
  static ConvexPoly rect(const Vec2& lo, const Vec2& hi) {
    ConvexPoly p;
    p.push(lo); p.push({hi.x(), lo.y()}); p.push(hi); p.push({lo.x(), hi.y()});
    return p;
  }

  double area() const {
    double s = 0;
    for (int i = 0; i < n; ++i) s += cross2(v[i], v[(i + 1) % n]);
    return 0.5 * s;
  }

  Vec2 centroid() const {
    Vec2 c = Vec2::Zero();
    double s = 0;
    for (int i = 0; i < n; ++i) {
      double w = cross2(v[i], v[(i + 1) % n]);
      s += w;
      c += w * (v[i] + v[(i + 1) % n]);
    }
    if (std::abs(s) < 1e-300) return n ? v[0] : c;
    return c / (3.0 * s);
  }

  /// Keep the part with dot(p, normal) <= offset (Sutherland-Hodgman step).
  ConvexPoly clip_halfplane(const Vec2& normal, double offset) const {
    ConvexPoly out;
    if (n == 0) return out;
    for (int i = 0; i < n; ++i) {
      const Vec2& p = v[i];
      const Vec2& q = v[(i + 1) % n];
      double dp = normal.dot(p) - offset;
      double dq = normal.dot(q) - offset;
      bool inp = dp <= 0, inq = dq <= 0;
      if (inp) out.push(p);
      if (inp != inq) {
        double t = dp / (dp - dq);
        out.push(p + t * (q - p));
      }
    }
    return out;
  }

  /// Intersection with another convex polygon.
  ConvexPoly clip(const ConvexPoly& other) const {
    ConvexPoly cur = *this;
    for (int i = 0; i < other.n && cur.n; ++i) {
      const Vec2& p = other.v[i];
      const Vec2& q = other.v[(i + 1) % other.n];
      Vec2 edge = q - p;
      Vec2 nrm(edge.y(), -edge.x());  // outward for a CCW polygon
      cur = cur.clip_halfplane(nrm, nrm.dot(p));
    }
    return cur;
  }
};

/// FNV-1a over a byte stream; used for text-format checksums.
struct Fnv1a {
  std::uint64_t h = 1469598103934665603ull;
  void add(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  }
  void add_double(double x) { add(&x, sizeof x); }
  void add_int(std::int64_t x) { add(&x, sizeof x); }
};

}  // namespace gradedrt
