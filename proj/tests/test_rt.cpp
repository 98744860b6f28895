#include <doctest.h>

#include "gradedrt/rt.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace gradedrt;

namespace {

GradedMesh unit_square_cell() { return build_reference_graded_square({1, 1.0}); }
GradedMesh unit_triangle_cell() { return build_reference_graded_triangle({1, 1.0}); }

// DOF functional: outward flux of a reference basis field across a local edge,
// by direct line quadrature. Independent of the interpolation path.
double ref_dof(CellKind kind, int dof_edge, int basis) {
  auto [p, q] = GradedMesh::reference_edge(kind, dof_edge);
  Vec2 n = GradedMesh::reference_normal(kind, dof_edge);
  const GaussRule& g = gauss_rule(12);
  double len = (q - p).norm();
  double s = 0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    Vec2 x = p + g.x[i] * (q - p);
    s += g.w[i] * rt_basis(kind, basis, x).dot(n);
  }
  return s * len;
}

}  // namespace

TEST_CASE("unisolvence: DOF matrix of each local basis is the identity") {
  for (CellKind kind : {CellKind::Quad, CellKind::Triangle}) {
    int n = kind == CellKind::Quad ? 4 : 3;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(ref_dof(kind, i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-13));
  }
}

TEST_CASE("edge flux examples") {
  VectorField c10 = make_rt_square(1, 0, 0, 0);  // (1, 0)
  // edge e2 of the unit square: x1 = 1, outward n = (1,0)
  CHECK(edge_flux(c10, {1, 0}, {1, 1}, {1, 0}) == doctest::Approx(1.0).epsilon(1e-14));

  VectorField swap;
  swap.u1 = [](const Vec2& x) { return x.y(); };
  swap.u2 = [](const Vec2& x) { return x.x(); };
  swap.div = [](const Vec2&) { return 0.0; };
  // edge e3: x2 = 1, n = (0,1): integral of x1 = 1/2
  CHECK(edge_flux(swap, {0, 1}, {1, 1}, {0, 1}) == doctest::Approx(0.5).epsilon(1e-13));

  for (double eps : {1.0, 0.5, 0.2, 0.1, 0.05}) {
    VectorField ce = make_counterexample(eps);
    // edge e1 of the triangle: x2 = 0, n = (0,-1): u2(x1, 0) = w(0) = 1
    CHECK(edge_flux(ce, {0, 0}, {1, 0}, {0, -1}) ==
          doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("edge flux convergence status") {
  VectorField sm = make_trig();
  QuadStatus st;
  edge_flux(sm, {0, 0}, {1, 0}, {0, -1}, {}, &st);
  CHECK(st.converged);
}

TEST_CASE("interpolation reproduces RT0 members") {
  for (double beta : {1.0, 2.0}) {
    GradedMesh mq = build_reference_graded_square({3, beta});
    VectorField u = make_rt_square(0.3, -0.2, 0.7, 0.4);
    RtFunction f = interpolate_rt(u, mq);
    // exact fluxes: affine normal component, midpoint value times length
    for (std::size_t e = 0; e < mq.edges.size(); ++e) {
      Vec2 mid = 0.5 * (mq.vertices[mq.edges[e].v0] + mq.vertices[mq.edges[e].v1]);
      Vec2 n = mq.edge_normal(int(e));
      double exact = (u.u1(mid) * n.x() + u.u2(mid) * n.y()) * mq.edge_length(int(e));
      CHECK(f.coef[Eigen::Index(e)] == doctest::Approx(exact).epsilon(1e-12));
    }

    GradedMesh mt = build_reference_graded_triangle({3, beta});
    VectorField v = make_affine_rt(0.4, 0.1, -0.6);
    RtFunction g = interpolate_rt(v, mt);
    for (std::size_t e = 0; e < mt.edges.size(); ++e) {
      Vec2 mid = 0.5 * (mt.vertices[mt.edges[e].v0] + mt.vertices[mt.edges[e].v1]);
      Vec2 n = mt.edge_normal(int(e));
      double exact = (v.u1(mid) * n.x() + v.u2(mid) * n.y()) * mt.edge_length(int(e));
      CHECK(g.coef[Eigen::Index(e)] == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("interpolation of (x2, x1) on the unit square") {
  VectorField swap;
  swap.u1 = [](const Vec2& x) { return x.y(); };
  swap.u2 = [](const Vec2& x) { return x.x(); };
  swap.div = [](const Vec2&) { return 0.0; };
  GradedMesh m = unit_square_cell();
  RtFunction f = interpolate_rt(swap, m);
  Eigen::Vector4d cf = f.local_coeffs(0);
  CHECK(cf[0] == doctest::Approx(0.5).epsilon(1e-13));  // a
  CHECK(cf[1] == doctest::Approx(0.5).epsilon(1e-13));  // b
  CHECK(cf[2] == doctest::Approx(0.0).epsilon(1e-13));  // c
  CHECK(cf[3] == doctest::Approx(0.0).epsilon(1e-13));  // d
}

TEST_CASE("counterexample interpolant is (0,1) on the unit triangle") {
  GradedMesh m = unit_triangle_cell();
  for (double eps : {0.5, 0.2, 0.1, 0.05}) {
    RtFunction f = interpolate_rt(make_counterexample(eps), m);
    Eigen::Vector4d cf = f.local_coeffs(0);
    CHECK(std::abs(cf[0]) < 1e-7);        // a
    CHECK(cf[1] == doctest::Approx(1.0).epsilon(1e-7));  // b
    CHECK(std::abs(cf[2]) < 1e-7);        // c
    // outward fluxes of the interpolant (0,1): (-1, 0, 1)
    CHECK(f.outward_flux(0, 0) == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(std::abs(f.outward_flux(0, 1)) < 1e-7);
    CHECK(f.outward_flux(0, 2) == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("counterexample field basics") {
  LogLogProfile p(1.0);
  CHECK(p.w(0.1) == doctest::Approx(1.0));  // eps loglog(e/0.1) ~ 1.19 >= 1
  LogLogProfile q(0.5);
  CHECK(q.w(0.5) == doctest::Approx(0.5 * std::log(1.0 - std::log(0.5))).epsilon(1e-14));
  VectorField ce = make_counterexample(0.2);
  CHECK(ce.div(Vec2(0.3, 0.4)) == 0.0);
  // pointwise branch: u2 = eps loglog(e/x2) above the kink radius
  CHECK(ce.u2(Vec2(0.0, 0.3)) ==
        doctest::Approx(0.2 * std::log(1.0 - std::log(0.3))).epsilon(1e-14));
}

TEST_CASE("eval and divergence of RT functions") {
  GradedMesh m = unit_square_cell();
  RtFunction f = interpolate_rt(make_rt_square(1, 0, 0, 0), m);
  for (double x : {0.1, 0.5, 0.9})
    for (double y : {0.2, 0.7}) {
      Vec2 v = eval_rt(f, 0, {x, y});
      CHECK(v.x() == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(v.y() == doctest::Approx(0.0).epsilon(1e-13));
    }
  CHECK_THROWS_AS(eval_rt(f, 0, {1.5, 0.5}), std::invalid_argument);

  // triangle with outward fluxes (-1, 0, 1) represents the constant (0,1)
  GradedMesh t = unit_triangle_cell();
  RtFunction g;
  g.mesh = &t;
  g.coef.resize(Eigen::Index(t.edges.size()));
  const Element& el = t.elements[0];
  double want[3] = {-1.0, 0.0, 1.0};
  for (int le = 0; le < 3; ++le) g.coef[el.edge[le]] = want[le] * el.esign[le];
  for (double x : {0.2, 0.8})
    for (double y : {0.1}) {
      Vec2 v = eval_rt(g, 0, {x, y});
      CHECK(v.x() == doctest::Approx(0.0).epsilon(1e-13));
      CHECK(v.y() == doctest::Approx(1.0).epsilon(1e-13));
    }
  CHECK(div_rt(g, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("divergence equals signed flux sum over area (divergence theorem)") {
  GradedMesh m = build_reference_graded_triangle({2, 1.5});
  VectorField u = make_trig();
  RtFunction f = interpolate_rt(u, m);
  QuadOptions opts;
  opts.order = 12;
  for (std::size_t k = 0; k < m.elements.size(); ++k) {
    // brute-force surface integral of div u over the element
    double brute = integrate_element(m, int(k), [&](const Vec2& x) { return u.div(x); },
                                     {}, opts);
    CHECK(f.div_on(int(k)) ==
          doctest::Approx(brute / m.element_area(int(k))).epsilon(1e-9));
  }
}

TEST_CASE("piecewise constant projection") {
  GradedMesh m = unit_square_cell();
  auto p = project_piecewise_constant(make_scalar_const(3.0), m);
  CHECK(p[0] == doctest::Approx(3.0).epsilon(1e-14));
  auto q = project_piecewise_constant(make_scalar_coord(0), m);
  CHECK(q[0] == doctest::Approx(0.5).epsilon(1e-13));

  // divergence of the model singular field profile on a graded mesh:
  // per-cell means of 0.39 x2^-0.7 against a closed-form oracle
  GradedMesh g = build_reference_graded_square({2, 2.0});
  ScalarField sing = make_scalar_power(-0.7);
  ScalarField scaled{[&](const Vec2& x) { return 0.3 * 1.3 * sing.eval(x); },
                     sing.singular,
                     "div-sing"};
  auto means = project_piecewise_constant(
      scaled, g, {.order = 12, .split_ratio = 0.25, .split_levels = 60});
  auto pts = grade_points({2, 2.0});
  for (std::size_t k = 0; k < g.elements.size(); ++k) {
    const Element& el = g.elements[k];
    double y0 = pts[el.gj - 1], y1 = pts[el.gj];
    double exact = 0.39 * (std::pow(y1, 0.3) - std::pow(y0, 0.3)) / 0.3 / (y1 - y0);
    CHECK(means[k] == doctest::Approx(exact).epsilon(1e-8));
  }
}

TEST_CASE("commuting diagram") {
  GradedMesh m = build_reference_graded_square({2, 1.0});
  VectorField rt0 = make_rt_square(0.2, 0.4, -1.0, 0.3);
  CHECK(commuting_defect(rt0, m) < 1e-12);

  VectorField quad;
  quad.u1 = [](const Vec2& x) { return x.x() * x.x(); };
  quad.u2 = [](const Vec2& x) { return x.y(); };
  quad.div = [](const Vec2& x) { return 2 * x.x() + 1; };
  CHECK(commuting_defect(quad, m) < 1e-10);

  VectorField sing = make_edge_singular(0.3);
  CHECK(commuting_defect(sing, build_reference_graded_square({2, 2.0})) < 1e-10);

  VectorField nodiv;
  nodiv.u1 = [](const Vec2&) { return 0.0; };
  nodiv.u2 = [](const Vec2&) { return 0.0; };
  CHECK_THROWS_AS(commuting_defect(nodiv, m), std::invalid_argument);
}

TEST_CASE("interpolation is a projection (idempotence)") {
  for (double beta : {1.0, 2.0}) {
    GradedMesh m = build_reference_graded_square({3, beta});
    RtFunction f = interpolate_rt(make_trig(), m);
    // wrap the discrete field as an analytic field via point location on the
    // tensor mesh, then re-interpolate
    auto pts = grade_points(m.grading);
    auto locate = [&, pts](const Vec2& x) -> std::pair<int, Vec2> {
      auto idx = [&](double v) {
        int i = 1;
        while (i < int(pts.size()) - 1 && v > pts[i]) ++i;
        return i;
      };
      int i = idx(x.x()), j = idx(x.y());
      for (std::size_t k = 0; k < m.elements.size(); ++k)
        if (m.elements[k].gi == i && m.elements[k].gj == j)
          return {int(k), m.elements[k].map.pull_back(x)};
      return {-1, {}};
    };
    VectorField wrapped;
    wrapped.u1 = [&m, f, locate](const Vec2& x) {
      auto [k, xr] = locate(x);
      return f.eval_local(k, xr).x();
    };
    wrapped.u2 = [&m, f, locate](const Vec2& x) {
      auto [k, xr] = locate(x);
      return f.eval_local(k, xr).y();
    };
    RtFunction g = interpolate_rt(wrapped, m, {.order = 10});
    CHECK((g.coef - f.coef).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("piola flux preservation") {
  // push a field through an affine map and compare corresponding edge fluxes
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Mat2 a;
    a << 1.0 + 0.2 * dist(rng), 0.4 * dist(rng), 0.3 * dist(rng),
        0.8 + 0.2 * dist(rng);
    if (a.determinant() < 0.1) continue;
    Vec2 b(dist(rng), dist(rng));
    AffineMap map{a, b};
    VectorField ref = make_trig();
    VectorField pushed;
    pushed.u1 = [=](const Vec2& x) {
      Vec2 xr = map.pull_back(x);
      Vec2 v = a * Vec2(ref.u1(xr), ref.u2(xr)) / a.determinant();
      return v.x();
    };
    pushed.u2 = [=](const Vec2& x) {
      Vec2 xr = map.pull_back(x);
      Vec2 v = a * Vec2(ref.u1(xr), ref.u2(xr)) / a.determinant();
      return v.y();
    };
    for (int le = 0; le < 4; ++le) {
      auto [p, q] = GradedMesh::reference_edge(CellKind::Quad, le);
      Vec2 nref = GradedMesh::reference_normal(CellKind::Quad, le);
      double ref_flux = edge_flux(ref, p, q, nref, {.order = 12});
      double phys_flux =
          edge_flux(pushed, map(p), map(q), map.push_normal(nref), {.order = 12});
      CHECK(phys_flux == doctest::Approx(ref_flux).epsilon(1e-10));
    }
  }
}

TEST_CASE("normal continuity across interior edges") {
  GradedMesh m = build_reference_graded_triangle({3, 2.0});
  RtFunction f = interpolate_rt(make_trig(), m);
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    const Edge& ed = m.edges[e];
    if (ed.boundary()) continue;
    Vec2 pa = m.vertices[ed.v0], pb = m.vertices[ed.v1];
    Vec2 n = m.edge_normal(int(e));
    for (double t : {0.25, 0.5, 0.75}) {
      Vec2 x = pa + t * (pb - pa);
      Vec2 va = f.eval_local(ed.elem0, m.elements[ed.elem0].map.pull_back(x));
      Vec2 vb = f.eval_local(ed.elem1, m.elements[ed.elem1].map.pull_back(x));
      CHECK(va.dot(n) == doctest::Approx(vb.dot(n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("rt coefficient export carries the mesh checksum") {
  GradedMesh m = build_reference_graded_square({2, 1.0});
  RtFunction f = interpolate_rt(make_trig(), m);
  std::stringstream ss;
  write_rt(ss, f);
  std::string text = ss.str();
  char expect[32];
  std::snprintf(expect, sizeof expect, "%016llx",
                static_cast<unsigned long long>(m.checksum()));
  CHECK(text.find(expect) != std::string::npos);
  CHECK(text.find("# coefficients 12") != std::string::npos);
}
