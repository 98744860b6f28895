#include "gradedrt/rt.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace gradedrt {

Vec2 rt_basis(CellKind kind, int i, const Vec2& x) {
  if (kind == CellKind::Quad) {
    switch (i) {
      case 0: return {0.0, x.y() - 1.0};
      case 1: return {x.x(), 0.0};
      case 2: return {0.0, x.y()};
      case 3: return {x.x() - 1.0, 0.0};
    }
  } else {
    switch (i) {
      case 0: return {x.x() - 1.0, x.y() - 1.0};
      case 1: return {x.x(), x.y()};
      case 2: return {x.x() - 1.0, x.y()};
    }
  }
  throw std::invalid_argument("rt_basis: bad index");
}

namespace {

double flux_generic(const VectorField& u, const Vec2& p, const Vec2& q, const Vec2& n,
                    int order, const QuadOptions& opts) {
  Vec2 d = q - p;
  double len = d.norm();
  Panelization panels;
  for (const auto& s : u.singular) {
    double da = d[s.axis];
    if (std::abs(da) < 1e-14 * (len + 1)) continue;  // edge parallel to the line
    double ts = (s.at - p[s.axis]) / da;
    if (ts > -1e-12 && ts < 1 + 1e-12)
      panels.add_geometric(0, 1, std::clamp(ts, 0.0, 1.0), opts.split_ratio,
                           opts.split_levels);
  }
  auto cuts = panels.build(0, 1);
  return integrate_panels(
      [&](double t) {
        Vec2 x = p + t * d;
        return (u.u1(x) * n.x() + u.u2(x) * n.y()) * len;
      },
      0, 1, cuts, order);
}

// u = (0,1)^T + ((1-x1) w'(x2), w(x2) - 1); the w' part is integrated in the
// profile's substitution variable, the rest by panelized Gauss.
double flux_profile(const VectorField& u, const Vec2& p, const Vec2& q, const Vec2& n,
                    int order, const QuadOptions& opts) {
  const LogLogProfile& prof = *u.profile;
  Vec2 d = q - p;
  double len = d.norm();
  double flux = n.y() * len * 1.0;  // constant part (0,1)

  // (w(x2) - 1) term
  if (std::abs(n.y()) > 0) {
    double y0 = p.y(), dy = d.y();
    Panelization panels;
    if (std::abs(dy) > 1e-14) {
      for (double c : prof.panel_cuts(std::min(y0, y0 + dy), std::max(y0, y0 + dy)))
        panels.add_cut((c - y0) / dy);
      double t0 = (0.0 - y0) / dy;  // preimage of x2 = 0
      if (t0 > -1e-12 && t0 < 1 + 1e-12)
        panels.add_geometric(0, 1, std::clamp(t0, 0.0, 1.0), opts.split_ratio,
                             opts.split_levels);
    }
    auto cuts = panels.build(0, 1);
    flux += n.y() * len *
            integrate_panels([&](double t) { return prof.w(y0 + t * dy) - 1.0; }, 0,
                             1, cuts, order);
  }

  // (1 - x1) w'(x2) term
  if (std::abs(n.x()) > 0) {
    double dy = d.y();
    if (std::abs(dy) < 1e-14 * (len + 1)) {
      double wp = prof.dw(p.y());
      if (wp != 0.0) {
        double val = integrate_panels(
            [&](double t) { return 1.0 - (p.x() + t * d.x()); }, 0, 1, {}, order);
        flux += n.x() * len * wp * val;
      }
    } else {
      double a = std::min(p.y(), q.y()), b = std::max(p.y(), q.y());
      a = std::max(a, 0.0);
      auto g = [&](double y) {
        double t = (y - p.y()) / dy;
        return 1.0 - (p.x() + t * d.x());
      };
      double w_int = prof.integrate_g_dw(g, a, b);
      flux += n.x() * len * w_int / std::abs(dy);
    }
  }
  return flux;
}

double flux_at_order(const VectorField& u, const Vec2& p, const Vec2& q, const Vec2& n,
                     int order, const QuadOptions& opts) {
  return u.profile ? flux_profile(u, p, q, n, order, opts)
                   : flux_generic(u, p, q, n, order, opts);
}

}  // namespace

double edge_flux(const VectorField& u, const Vec2& p, const Vec2& q, const Vec2& n,
                 const QuadOptions& opts, QuadStatus* status) {
  double v1 = flux_at_order(u, p, q, n, opts.order, opts);
  if (!status) return v1;
  double v2 = flux_at_order(u, p, q, n, opts.order + 6, opts);
  QuadStatus st;
  st.est_error = std::abs(v2 - v1);
  st.converged = st.est_error <= opts.rel_tol * (1.0 + std::abs(v2));
  status->merge(st);
  return v2;
}

RtFunction interpolate_rt(const VectorField& u, const GradedMesh& mesh,
                          const QuadOptions& opts, QuadStatus* status) {
  RtFunction f;
  f.mesh = &mesh;
  f.coef.resize(Eigen::Index(mesh.edges.size()));
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const Edge& ed = mesh.edges[e];
    f.coef[Eigen::Index(e)] = edge_flux(u, mesh.vertices[ed.v0], mesh.vertices[ed.v1],
                                        mesh.edge_normal(int(e)), opts, status);
  }
  return f;
}

Eigen::Vector4d RtFunction::local_coeffs(int k) const {
  const Element& el = mesh->elements[k];
  if (el.kind == CellKind::Quad) {
    double f1 = outward_flux(k, 0), f2 = outward_flux(k, 1), f3 = outward_flux(k, 2),
           f4 = outward_flux(k, 3);
    return {-f4, -f1, f2 + f4, f3 + f1};  // (a, b, c, d)
  }
  double f1 = outward_flux(k, 0), f2 = outward_flux(k, 1), f3 = outward_flux(k, 2);
  double b = -f1;
  double a = b - f3;
  double c = f2 - a;
  return {a, b, c, c};
}

Vec2 RtFunction::eval_local(int k, const Vec2& xr) const {
  const Element& el = mesh->elements[k];
  Eigen::Vector4d cf = local_coeffs(k);
  Vec2 uhat(cf[0] + cf[2] * xr.x(), cf[1] + cf[3] * xr.y());
  return el.map.a * uhat / el.map.jacobian();
}

double RtFunction::div_on(int k) const {
  const Element& el = mesh->elements[k];
  double s = 0;
  for (int le = 0; le < el.nedges(); ++le) s += outward_flux(k, le);
  return s / mesh->element_area(k);
}

Vec2 eval_rt(const RtFunction& f, int element, const Vec2& xr) {
  const Element& el = f.mesh->elements[element];
  double tol = 1e-12;
  bool inside = xr.x() >= -tol && xr.y() >= -tol && xr.x() <= 1 + tol &&
                xr.y() <= 1 + tol;
  if (el.kind == CellKind::Triangle) inside = inside && xr.y() <= xr.x() + tol;
  if (!inside) throw std::invalid_argument("eval_rt: point outside reference element");
  return f.eval_local(element, xr);
}

double div_rt(const RtFunction& f, int element) { return f.div_on(element); }

double integrate_element(const GradedMesh& mesh, int k, const Fn2& f_phys,
                         std::span<const SingularLine> singular,
                         const QuadOptions& opts) {
  const Element& el = mesh.elements[k];
  double jac = std::abs(el.map.jacobian());
  double diam = mesh.element_diameter(k);

  // graded targets in reference coordinates, from corners lying on a line
  std::vector<double> gx, gy;
  int nv = el.nverts();
  static const Vec2 tref[3] = {{0, 0}, {1, 0}, {1, 1}};
  static const Vec2 qref[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Vec2* ref = el.kind == CellKind::Triangle ? tref : qref;
  for (const auto& s : singular) {
    for (int i = 0; i < nv; ++i) {
      double coord = mesh.vertices[el.v[i]][s.axis];
      if (std::abs(coord - s.at) < 1e-12 * (diam + 1)) {
        if (std::abs(el.map.a(s.axis, 0)) > 1e-14 * (diam + 1))
          gx.push_back(ref[i].x());
        if (std::abs(el.map.a(s.axis, 1)) > 1e-14 * (diam + 1))
          gy.push_back(ref[i].y());
      }
    }
  }
  const QuadOptions& eopts = opts;

  if (el.kind == CellKind::Quad) {
    return jac * integrate_rect([&](const Vec2& xr) { return f_phys(el.map(xr)); },
                                {0, 0}, {1, 1}, gx, gy, eopts);
  }
  // Duffy collapse (u, uv) of the reference triangle
  bool grade_u0 = false, grade_v0 = false, grade_u1 = false, grade_v1 = false;
  for (double t : gx) (t < 0.5 ? grade_u0 : grade_u1) = true;
  for (double t : gy) (t < 0.5 ? grade_v0 : grade_v1) = true;
  std::vector<double> gu, gv;
  if (grade_u0 || grade_v0) {  // ref corner (0,0): u -> 0
    gu.push_back(0.0);
    gv.push_back(0.0);  // x2 = u v vanishes along v = 0 too
  }
  if (grade_u1) gu.push_back(1.0);
  if (grade_v1) gv.push_back(1.0);
  return jac * integrate_rect(
                   [&](const Vec2& uv) {
                     Vec2 xr(uv.x(), uv.x() * uv.y());
                     return uv.x() * f_phys(el.map(xr));
                   },
                   {0, 0}, {1, 1}, gu, gv, eopts);
}

std::vector<double> project_piecewise_constant(const ScalarField& g,
                                               const GradedMesh& mesh,
                                               const QuadOptions& opts) {
  std::vector<double> out(mesh.elements.size());
  for (std::size_t k = 0; k < mesh.elements.size(); ++k)
    out[k] = integrate_element(mesh, int(k),
                               [&](const Vec2& x) { return g.eval(x); }, g.singular,
                               opts) /
             mesh.element_area(int(k));
  return out;
}

double commuting_defect(const VectorField& u, const GradedMesh& mesh,
                        const QuadOptions& opts) {
  if (!u.has_div())
    throw std::invalid_argument("commuting_defect: field lacks analytic divergence");
  RtFunction f = interpolate_rt(u, mesh, opts);
  ScalarField dv{u.div, u.singular, "div"};
  auto p0 = project_piecewise_constant(dv, mesh, opts);
  double defect = 0;
  for (std::size_t k = 0; k < mesh.elements.size(); ++k)
    defect = std::max(defect, std::abs(f.div_on(int(k)) - p0[k]));
  return defect;
}

void write_rt(std::ostream& os, const RtFunction& f) {
  char buf[32];
  os << "# gradedrt-rt 1\n";
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(f.mesh->checksum()));
  os << "# mesh-checksum " << buf << "\n";
  os << "# coefficients " << f.coef.size() << "\n";
  for (Eigen::Index e = 0; e < f.coef.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%.17g", f.coef[e]);
    os << e << " " << buf << "\n";
  }
}

}  // namespace gradedrt
